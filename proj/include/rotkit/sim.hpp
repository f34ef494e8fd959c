#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotkit/hand.hpp"
#include "rotkit/math.hpp"
#include "rotkit/rng.hpp"
#include "rotkit/toml.hpp"

namespace rotkit::sim {

enum class Shape { Capsule, Box, Sphere };

inline std::string shape_name(Shape s) {
    switch (s) {
        case Shape::Capsule: return "capsule";
        case Shape::Box: return "box";
        case Shape::Sphere: return "sphere";
    }
    return "?";
}

inline Shape shape_from_name(const std::string& name) {
    if (name == "capsule") return Shape::Capsule;
    if (name == "box") return Shape::Box;
    if (name == "sphere") return Shape::Sphere;
    throw std::runtime_error("unknown object shape: " + name);
}

/// Rigid manipulation object. Dimensions by shape:
///   capsule: dims = {radius, half_length of the cylindrical section}, axis x
///   box:     dims = {width, height} -> extents (width, width, height)
///   sphere:  dims = {radius, 0}
struct ObjectModel {
    Shape shape = Shape::Capsule;
    std::array<double, 2> dims{0.03, 0.006};
    double mass = 0.1;
    Vec3 com_offset{};          // from the geometric center, object frame
    double friction = 1.0;

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("object mass must be positive");
        if (!(dims[0] > 0.0)) throw std::invalid_argument("object dims must be positive");
        if (shape == Shape::Box && !(dims[1] > 0.0))
            throw std::invalid_argument("box height must be positive");
    }

    /// Diagonal body-frame inertia of the solid shape about its COM.
    Vec3 inertia_diagonal() const {
        switch (shape) {
            case Shape::Sphere: {
                const double i = 0.4 * mass * dims[0] * dims[0];
                return {i, i, i};
            }
            case Shape::Box: {
                const double w = dims[0], h = dims[1];
                return {mass / 12.0 * (w * w + h * h), mass / 12.0 * (w * w + h * h),
                        mass / 12.0 * (w * w + w * w)};
            }
            case Shape::Capsule: {
                // Cylinder formula with the caps folded into the length.
                const double r = dims[0];
                const double l = 2.0 * dims[1] + 2.0 * r;
                const double ax = 0.5 * mass * r * r;
                const double tr = mass * (3.0 * r * r + l * l) / 12.0;
                return {ax, tr, tr};
            }
        }
        return {1e-5, 1e-5, 1e-5};
    }

    /// Signed distance from a point in the object frame to the surface.
    double sdf(const Vec3& p) const {
        switch (shape) {
            case Shape::Sphere:
                return p.norm() - dims[0];
            case Shape::Capsule: {
                const double ax = std::clamp(p.x, -dims[1], dims[1]);
                return (p - Vec3{ax, 0, 0}).norm() - dims[0];
            }
            case Shape::Box: {
                const Vec3 half{0.5 * dims[0], 0.5 * dims[0], 0.5 * dims[1]};
                const Vec3 d{std::abs(p.x) - half.x, std::abs(p.y) - half.y,
                             std::abs(p.z) - half.z};
                const Vec3 outside{std::max(d.x, 0.0), std::max(d.y, 0.0),
                                   std::max(d.z, 0.0)};
                const double inside = std::min(std::max({d.x, d.y, d.z}), 0.0);
                return outside.norm() + inside;
            }
        }
        return 0.0;
    }

    /// Outward surface normal at/near a point in the object frame.
    Vec3 sdf_gradient(const Vec3& p) const {
        switch (shape) {
            case Shape::Sphere: {
                const double n = p.norm();
                return n > 1e-12 ? p / n : Vec3{0, 0, 1};
            }
            case Shape::Capsule: {
                const double ax = std::clamp(p.x, -dims[1], dims[1]);
                const Vec3 d = p - Vec3{ax, 0, 0};
                const double n = d.norm();
                return n > 1e-12 ? d / n : Vec3{0, 0, 1};
            }
            case Shape::Box: {
                const Vec3 half{0.5 * dims[0], 0.5 * dims[0], 0.5 * dims[1]};
                const Vec3 d{std::abs(p.x) - half.x, std::abs(p.y) - half.y,
                             std::abs(p.z) - half.z};
                if (d.x > 0 || d.y > 0 || d.z > 0) {
                    Vec3 g{std::max(d.x, 0.0) * (p.x < 0 ? -1.0 : 1.0),
                           std::max(d.y, 0.0) * (p.y < 0 ? -1.0 : 1.0),
                           std::max(d.z, 0.0) * (p.z < 0 ? -1.0 : 1.0)};
                    return g.normalized();
                }
                // Inside: face with the smallest penetration wins.
                if (d.x >= d.y && d.x >= d.z) return {p.x < 0 ? -1.0 : 1.0, 0, 0};
                if (d.y >= d.z) return {0, p.y < 0 ? -1.0 : 1.0, 0};
                return {0, 0, p.z < 0 ? -1.0 : 1.0};
            }
        }
        return {0, 0, 1};
    }
};

inline ObjectModel object_model_from_toml(const toml::Table& table) {
    ObjectModel object;
    object.shape = shape_from_name(table.string_or("shape", "capsule"));
    if (table.has("dims")) {
        const auto& dims = table.array("dims");
        if (dims.size() != 2) throw std::runtime_error("object config: dims needs 2 entries");
        object.dims = {dims[0], dims[1]};
    }
    object.mass = table.number_or("mass", object.mass);
    object.friction = table.number_or("friction", object.friction);
    if (table.has("com_offset")) {
        const auto& com = table.array("com_offset");
        if (com.size() != 3)
            throw std::runtime_error("object config: com_offset needs 3 entries");
        object.com_offset = {com[0], com[1], com[2]};
    }
    object.validate();
    return object;
}

inline void object_model_to_toml(const ObjectModel& object, toml::Table& table) {
    table.set_string("shape", shape_name(object.shape));
    table.set_array("dims", {object.dims[0], object.dims[1]});
    table.set_number("mass", object.mass);
    table.set_number("friction", object.friction);
    table.set_array("com_offset",
                    {object.com_offset.x, object.com_offset.y, object.com_offset.z});
}

/// One detected contact. `force_on_object` is the total force the hand link
/// applies to the object at `point_world`; the fingertip sensor reads the
/// reaction -force_on_object. `local_on_tip` is the contact location on the
/// fingertip sphere expressed in the fingertip frame (tip contacts only).
struct ContactRecord {
    int finger = -1;        // owning finger
    int link = -1;          // chain link index; kJointsPerFinger-1 == distal
    bool fingertip = false;
    Vec3 point_world;
    Vec3 normal_world;      // outward object surface normal
    Vec3 force_on_object;
    Vec3 local_on_tip;
    double penetration = 0.0;
};

struct SimParams {
    double contact_stiffness = 1500.0;  // N/m
    double contact_damping = 8.0;       // N*s/m, pressing only
    double friction_vel_eps = 0.01;     // m/s, Coulomb regularization knee
    double linear_damping = 0.01;       // 1/s on object linear velocity
    double angular_damping = 0.3;       // 1/s on object angular velocity
    double hand_friction = 1.0;         // fingertip surface friction coefficient
    double dt = 1.0 / 60.0;
    int substeps_per_control = 3;       // 3 * (1/60 s) = one 20 Hz control step
};

inline SimParams sim_params_from_toml(const toml::Table& table) {
    SimParams p;
    p.contact_stiffness = table.number_or("contact_stiffness", p.contact_stiffness);
    p.contact_damping = table.number_or("contact_damping", p.contact_damping);
    p.friction_vel_eps = table.number_or("friction_vel_eps", p.friction_vel_eps);
    p.linear_damping = table.number_or("linear_damping", p.linear_damping);
    p.angular_damping = table.number_or("angular_damping", p.angular_damping);
    p.hand_friction = table.number_or("hand_friction", p.hand_friction);
    p.dt = table.number_or("dt", p.dt);
    p.substeps_per_control = static_cast<int>(
        table.integer_or("substeps_per_control", p.substeps_per_control));
    return p;
}

/// Full simulation snapshot: everything step() needs to advance.
struct HandObjectState {
    JointVector q{};
    JointVector qdot{};
    JointVector target{};           // PD setpoints
    Pose object_pose;               // geometric center
    Vec3 object_linear_velocity;
    Vec3 object_angular_velocity;   // world frame
    Vec3 gravity{0.0, 0.0, -9.81};  // hand-frame gravity (m/s^2)
    Vec3 disturbance_force;         // world frame, acts at the COM
    std::vector<ContactRecord> contacts;
    long step_index = 0;

    bool finite() const {
        for (int j = 0; j < kNumJoints; ++j)
            if (!std::isfinite(q[j]) || !std::isfinite(qdot[j]) || !std::isfinite(target[j]))
                return false;
        return object_pose.position.finite() && object_linear_velocity.finite() &&
               object_angular_velocity.finite() && gravity.finite() &&
               disturbance_force.finite();
    }
};

namespace detail {

struct LinkSample {
    Vec3 point;      // world
    Vec3 velocity;   // world
    double radius;
    int link;
    bool fingertip;
};

/// Point velocity of a chain point from joint rates: sum of axis x lever.
inline Vec3 chain_point_velocity(const FingerFrames& finger, const JointVector& qdot,
                                 int finger_index, int distal_link, const Vec3& point) {
    Vec3 v{};
    for (int j = 0; j <= distal_link; ++j) {
        const Vec3 lever = point - finger.frames[j].position;
        v += qdot[finger_index * kJointsPerFinger + j] * finger.joint_axes[j].cross(lever);
    }
    return v;
}

inline void collect_samples(const HandModel& model, const FingerFrames& finger,
                            const JointVector& qdot, int f,
                            std::vector<LinkSample>& samples) {
    // Fingertip sphere.
    const Vec3 tip = finger.tip().position;
    samples.push_back({tip, chain_point_velocity(finger, qdot, f, kJointsPerFinger - 1, tip),
                       model.fingertip_radius, kJointsPerFinger - 1, true});
    // Link shaft proxies; the distal link keeps clear of the tip sphere.
    for (int link = 0; link < kJointsPerFinger; ++link) {
        const Vec3 a = finger.frames[link].position;
        const Vec3 b = finger.frames[link + 1].position;
        const bool distal = (link == kJointsPerFinger - 1);
        const std::array<double, 2> ts = distal ? std::array<double, 2>{0.25, 0.55}
                                                : std::array<double, 2>{0.4, 0.85};
        for (double t : ts) {
            const Vec3 p = a + (b - a) * t;
            samples.push_back({p, chain_point_velocity(finger, qdot, f, link, p),
                               model.link_radius, link, false});
        }
    }
}

}  // namespace detail

/// Penalty contact between hand link spheres and the object signed-distance
/// field. Normal force is a spring-damper clamped to be non-adhesive;
/// tangential force is regularized Coulomb friction capped at mu * normal.
inline std::vector<ContactRecord> detect_contacts(const HandModel& model,
                                                  const HandObjectState& state,
                                                  const ObjectModel& object,
                                                  const SimParams& params,
                                                  const FkResult& fk) {
    std::vector<ContactRecord> records;
    const Quat& rot = state.object_pose.orientation;
    const Quat inv = rot.inverse();
    const Vec3 com_world = state.object_pose.transform_point(object.com_offset);
    const double mu = std::min(params.hand_friction, object.friction);

    for (int f = 0; f < kNumFingers; ++f) {
        std::vector<detail::LinkSample> samples;
        samples.reserve(1 + 2 * kJointsPerFinger);
        detail::collect_samples(model, fk.fingers[f], state.qdot, f, samples);

        for (const auto& sample : samples) {
            const Vec3 local = inv.rotate(sample.point - state.object_pose.position);
            const double dist = object.sdf(local);
            const double penetration = sample.radius - dist;
            if (penetration <= 0.0) continue;

            const Vec3 normal = rot.rotate(object.sdf_gradient(local));
            const Vec3 surface = sample.point - normal * dist;
            const Vec3 v_obj = state.object_linear_velocity +
                               state.object_angular_velocity.cross(surface - com_world);
            const Vec3 v_rel = sample.velocity - v_obj;  // hand relative to object
            const double pen_rate = -v_rel.dot(normal);

            double fn = params.contact_stiffness * penetration +
                        params.contact_damping * pen_rate;
            fn = std::max(fn, 0.0);

            const Vec3 v_tan = v_rel - normal * v_rel.dot(normal);
            const double vt = v_tan.norm();
            const double cap = mu * fn;
            const double scale =
                vt > 1e-12 ? cap / std::sqrt(vt * vt + params.friction_vel_eps *
                                                           params.friction_vel_eps)
                           : 0.0;
            const Vec3 friction_force = v_tan * scale;  // drags the object along

            ContactRecord rec;
            rec.finger = f;
            rec.link = sample.link;
            rec.fingertip = sample.fingertip;
            rec.point_world = surface;
            rec.normal_world = normal;
            rec.force_on_object = normal * (-fn) + friction_force;
            rec.penetration = penetration;
            if (sample.fingertip) {
                const Quat tip_inv = fk.fingers[f].tip().orientation.inverse();
                rec.local_on_tip = tip_inv.rotate(-normal) * model.fingertip_radius;
            }
            records.push_back(rec);
        }
    }
    return records;
}

/// One semi-implicit physics substep. Deterministic: identical state and
/// inputs produce identical successors.
inline HandObjectState step(const HandModel& model, const HandObjectState& state,
                            const ObjectModel& object, const SimParams& params,
                            const JointVector& torques, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    for (double t : torques)
        if (!std::isfinite(t)) throw std::runtime_error("step: NaN in input torques");
    if (!state.finite()) throw std::runtime_error("step: NaN in simulation state");

    HandObjectState next = state;
    const FkResult fk = forward_kinematics(model, state.q);
    next.contacts = detect_contacts(model, state, object, params, fk);

    // Joint torque accumulation: PD input + contact reaction + gravity load
    // on the link masses - dry friction.
    JointVector tau = torques;
    for (const auto& rec : next.contacts) {
        const Vec3 force_on_hand = -rec.force_on_object;
        const auto& finger = fk.fingers[rec.finger];
        for (int j = 0; j <= rec.link; ++j) {
            const int idx = rec.finger * kJointsPerFinger + j;
            const Vec3 lever = rec.point_world - finger.frames[j].position;
            tau[idx] += lever.cross(force_on_hand).dot(finger.joint_axes[j]);
        }
    }
    for (int f = 0; f < kNumFingers; ++f) {
        const auto& finger = fk.fingers[f];
        for (int j = 0; j < kJointsPerFinger; ++j) {
            const int idx = f * kJointsPerFinger + j;
            // Weight of each distal link mass, lumped at the link end.
            for (int l = j; l < kJointsPerFinger; ++l) {
                const Vec3 weight = state.gravity * model.mass[f * kJointsPerFinger + l];
                const Vec3 lever = finger.frames[l + 1].position - finger.frames[j].position;
                tau[idx] += lever.cross(weight).dot(finger.joint_axes[j]);
            }
            tau[idx] -= model.friction[idx] * std::tanh(state.qdot[idx] / 0.02);
        }
    }

    for (int f = 0; f < kNumFingers; ++f) {
        for (int j = 0; j < kJointsPerFinger; ++j) {
            const int idx = f * kJointsPerFinger + j;
            const double len = model.link_lengths[f][j];
            const double inertia = model.armature[idx] + model.mass[idx] * len * len;
            const double qddot = tau[idx] / inertia;
            next.qdot[idx] = state.qdot[idx] + dt * qddot;
            next.q[idx] = state.q[idx] + dt * next.qdot[idx];
            if (next.q[idx] < model.limit_lower[idx]) {
                next.q[idx] = model.limit_lower[idx];
                next.qdot[idx] = std::max(next.qdot[idx], 0.0);
            } else if (next.q[idx] > model.limit_upper[idx]) {
                next.q[idx] = model.limit_upper[idx];
                next.qdot[idx] = std::min(next.qdot[idx], 0.0);
            }
        }
    }

    // Object: aggregate contact wrench about the COM, then integrate
    // semi-implicitly. The disturbance acts at the COM (no torque).
    Vec3 force = state.gravity * object.mass + state.disturbance_force;
    Vec3 torque{};
    const Vec3 com_world = state.object_pose.transform_point(object.com_offset);
    for (const auto& rec : next.contacts) {
        force += rec.force_on_object;
        torque += (rec.point_world - com_world).cross(rec.force_on_object);
    }

    const Vec3 accel = force / object.mass;
    Vec3 vel = state.object_linear_velocity + dt * accel;
    vel *= std::max(0.0, 1.0 - params.linear_damping * dt);
    const Vec3 new_com = com_world + dt * vel;

    const Quat& rot = state.object_pose.orientation;
    const Vec3 inertia = object.inertia_diagonal();
    const Vec3 w_body = rot.inverse().rotate(state.object_angular_velocity);
    const Vec3 t_body = rot.inverse().rotate(torque);
    const Vec3 l_body{inertia.x * w_body.x, inertia.y * w_body.y, inertia.z * w_body.z};
    const Vec3 gyro = w_body.cross(l_body);
    Vec3 w_dot{(t_body.x - gyro.x) / inertia.x, (t_body.y - gyro.y) / inertia.y,
               (t_body.z - gyro.z) / inertia.z};
    Vec3 w_new_body = w_body + dt * w_dot;
    w_new_body *= std::max(0.0, 1.0 - params.angular_damping * dt);
    Vec3 omega = rot.rotate(w_new_body);

    Quat new_rot = rot;
    const double omega_norm = omega.norm();
    if (omega_norm > 1e-12)
        new_rot = Quat::from_axis_angle(UnitVec3::normalized(omega), omega_norm * dt) * rot;

    next.object_pose.orientation = new_rot;
    next.object_pose.position = new_com - new_rot.rotate(object.com_offset);
    next.object_linear_velocity = vel;
    next.object_angular_velocity = omega;
    next.step_index = state.step_index + 1;
    return next;
}

struct DisturbanceParams {
    double scale = 2.0;        // force = scale * mass * g
    double probability = 0.25; // per control step
    double decay = 0.99;       // per control step otherwise
};

/// Per-control-step random disturbance wrench on the object: with the given
/// probability a fresh force replaces the active one, otherwise the active
/// force decays geometrically.
inline Vec3 apply_disturbance(const Vec3& current, Rng& rng, const DisturbanceParams& params,
                              double object_mass, double gravity_magnitude = 9.81) {
    if (params.probability > 0.0 && rng.bernoulli(params.probability)) {
        const UnitVec3 dir = UnitVec3::random(rng);
        return dir.vec() * (params.scale * object_mass * gravity_magnitude);
    }
    return current * params.decay;
}

}  // namespace rotkit::sim
