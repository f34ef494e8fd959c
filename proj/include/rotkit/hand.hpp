#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "rotkit/math.hpp"
#include "rotkit/toml.hpp"

namespace rotkit::sim {

using math::Pose;
using math::Quat;
using math::UnitVec3;
using math::Vec3;

constexpr int kNumFingers = 4;
constexpr int kJointsPerFinger = 4;
constexpr int kNumJoints = kNumFingers * kJointsPerFinger;

using JointVector = std::array<double, kNumJoints>;

inline JointVector joint_vector(double fill) {
    JointVector v;
    v.fill(fill);
    return v;
}

/// Four-finger 16-DoF serial-chain hand. Fingers are mounted radially on a
/// circular palm; joint 0 of each finger abducts about the mount normal and
/// joints 1-3 flex the finger toward the palm axis. This is a generic
/// stand-in for a fully actuated hand; every dimension is configurable.
struct HandModel {
    // Geometry.
    double mount_radius = 0.05;                // palm circle radius (m)
    double mount_pitch = 1.0;                  // base tilt of the finger plane (rad)
    std::array<double, kNumFingers> mount_azimuth{0.0, math::kPi / 2, math::kPi,
                                                  3 * math::kPi / 2};
    std::array<std::array<double, kJointsPerFinger>, kNumFingers> link_lengths{};
    double fingertip_radius = 0.015;
    double link_radius = 0.007;

    // Per-joint actuation and dynamics parameters.
    JointVector stiffness = joint_vector(3.0);
    JointVector damping = joint_vector(0.1);
    JointVector mass = joint_vector(0.05);      // link point mass (kg)
    JointVector friction = joint_vector(0.02);  // dry joint friction torque (N*m)
    JointVector armature = joint_vector(0.003); // added rotor inertia (kg*m^2)
    JointVector limit_lower{};
    JointVector limit_upper{};
    JointVector canonical_pose{};               // q0, the canonical grasp pose
    double torque_limit = 0.7;

    HandModel() {
        for (auto& finger : link_lengths) finger = {0.022, 0.040, 0.030, 0.032};
        for (int f = 0; f < kNumFingers; ++f) {
            const int base = f * kJointsPerFinger;
            limit_lower[base] = -0.47;
            limit_upper[base] = 0.47;
            canonical_pose[base] = 0.0;
            for (int j = 1; j < kJointsPerFinger; ++j) {
                limit_lower[base + j] = -0.25;
                limit_upper[base + j] = 1.60;
            }
            canonical_pose[base + 1] = 0.30;
            canonical_pose[base + 2] = 0.45;
            canonical_pose[base + 3] = 0.55;
        }
    }

    void validate() const {
        for (const auto& finger : link_lengths)
            for (double l : finger)
                if (!(l > 0.0)) throw std::invalid_argument("link lengths must be positive");
        if (!(fingertip_radius > 0.0) || !(link_radius > 0.0))
            throw std::invalid_argument("radii must be positive");
        for (int j = 0; j < kNumJoints; ++j) {
            if (stiffness[j] < 0.0 || damping[j] < 0.0)
                throw std::invalid_argument("stiffness/damping must be non-negative");
            if (!(limit_lower[j] < limit_upper[j]))
                throw std::invalid_argument("joint limits must satisfy lower < upper");
        }
    }

    JointVector clamp_to_limits(const JointVector& q) const {
        JointVector out;
        for (int j = 0; j < kNumJoints; ++j)
            out[j] = std::clamp(q[j], limit_lower[j], limit_upper[j]);
        return out;
    }

    /// Mount frame of a finger: local +x points toward the palm axis, raised
    /// by mount_pitch; local +z is the abduction axis.
    Pose mount_frame(int finger) const {
        const double phi = mount_azimuth[finger];
        Quat orient = Quat::from_axis_angle(UnitVec3::z_axis(), phi + math::kPi) *
                      Quat::from_axis_angle(UnitVec3::y_axis(), -mount_pitch);
        return Pose{Vec3{mount_radius * std::cos(phi), mount_radius * std::sin(phi), 0.0},
                    orient};
    }
};

/// World frames along one finger chain: joint origins 0..3 followed by the
/// fingertip frame. Frame i carries the orientation after joint i's rotation.
struct FingerFrames {
    std::array<Pose, kJointsPerFinger + 1> frames;
    std::array<Vec3, kJointsPerFinger> joint_axes;  // world rotation axes

    const Pose& tip() const { return frames[kJointsPerFinger]; }
};

struct FkResult {
    std::array<FingerFrames, kNumFingers> fingers;
    bool clamped = false;  // set when an out-of-limit q was clamped

    std::array<Pose, kNumFingers> fingertips() const {
        std::array<Pose, kNumFingers> tips;
        for (int f = 0; f < kNumFingers; ++f) tips[f] = fingers[f].tip();
        return tips;
    }
};

namespace detail {
inline Pose compose(const Pose& a, const Pose& b) {
    return Pose{a.position + a.orientation.rotate(b.position), a.orientation * b.orientation};
}
}  // namespace detail

/// Serial-chain forward kinematics for all four fingers.
///
/// Chain per finger: mount * Rz(q0) * Tx(l0) * R(-y, q1) * Tx(l1)
///                   * R(-y, q2) * Tx(l2) * R(-y, q3) * Tx(l3).
/// Positive flexion curls the fingertip toward the palm axis and upward.
inline FkResult forward_kinematics(const HandModel& model, const JointVector& q_in) {
    FkResult result;
    JointVector q = model.clamp_to_limits(q_in);
    for (int j = 0; j < kNumJoints; ++j)
        if (q[j] != q_in[j]) result.clamped = true;

    for (int f = 0; f < kNumFingers; ++f) {
        FingerFrames& finger = result.fingers[f];
        Pose cursor = model.mount_frame(f);
        const int base = f * kJointsPerFinger;
        for (int j = 0; j < kJointsPerFinger; ++j) {
            const bool abduction = (j == 0);
            const Vec3 local_axis = abduction ? Vec3{0, 0, 1} : Vec3{0, -1, 0};
            finger.joint_axes[j] = cursor.orientation.rotate(local_axis);
            cursor.orientation =
                cursor.orientation *
                Quat::from_axis_angle(UnitVec3(local_axis), q[base + j]);
            finger.frames[j] = cursor;
            cursor = detail::compose(
                cursor, Pose{Vec3{model.link_lengths[f][j], 0.0, 0.0}, Quat::identity()});
        }
        finger.frames[kJointsPerFinger] = cursor;
    }
    return result;
}

/// PD torque law: tau = kp * (target - q) - kd * qdot, clamped to the
/// actuator limit. Gain multipliers come from domain randomization.
inline JointVector pd_torques(const HandModel& model, const JointVector& q,
                              const JointVector& qdot, const JointVector& target,
                              double stiffness_scale = 1.0, double damping_scale = 1.0) {
    JointVector tau;
    for (int j = 0; j < kNumJoints; ++j) {
        const double raw = stiffness_scale * model.stiffness[j] * (target[j] - q[j]) -
                           damping_scale * model.damping[j] * qdot[j];
        tau[j] = std::clamp(raw, -model.torque_limit, model.torque_limit);
    }
    return tau;
}

inline void load_joint_vector(const toml::Table& table, const std::string& key,
                              JointVector& out) {
    if (!table.has(key)) return;
    const auto& values = table.array(key);
    if (values.size() == 1) {
        out.fill(values[0]);
    } else if (values.size() == kNumJoints) {
        std::copy(values.begin(), values.end(), out.begin());
    } else {
        throw std::runtime_error("hand config: '" + key + "' needs 1 or 16 entries");
    }
}

/// Populate a HandModel from a TOML table (absent keys keep defaults).
inline HandModel hand_model_from_toml(const toml::Table& table) {
    HandModel model;
    model.mount_radius = table.number_or("mount_radius", model.mount_radius);
    model.mount_pitch = table.number_or("mount_pitch", model.mount_pitch);
    model.fingertip_radius = table.number_or("fingertip_radius", model.fingertip_radius);
    model.link_radius = table.number_or("link_radius", model.link_radius);
    model.torque_limit = table.number_or("torque_limit", model.torque_limit);
    if (table.has("link_lengths")) {
        const auto& lengths = table.array("link_lengths");
        if (lengths.size() == kJointsPerFinger) {
            for (auto& finger : model.link_lengths)
                std::copy(lengths.begin(), lengths.end(), finger.begin());
        } else if (lengths.size() == kNumJoints) {
            for (int f = 0; f < kNumFingers; ++f)
                for (int j = 0; j < kJointsPerFinger; ++j)
                    model.link_lengths[f][j] = lengths[f * kJointsPerFinger + j];
        } else {
            throw std::runtime_error("hand config: 'link_lengths' needs 4 or 16 entries");
        }
    }
    load_joint_vector(table, "stiffness", model.stiffness);
    load_joint_vector(table, "damping", model.damping);
    load_joint_vector(table, "mass", model.mass);
    load_joint_vector(table, "friction", model.friction);
    load_joint_vector(table, "armature", model.armature);
    load_joint_vector(table, "limit_lower", model.limit_lower);
    load_joint_vector(table, "limit_upper", model.limit_upper);
    load_joint_vector(table, "canonical_pose", model.canonical_pose);
    model.validate();
    return model;
}

inline void hand_model_to_toml(const HandModel& model, toml::Table& table) {
    table.set_number("mount_radius", model.mount_radius);
    table.set_number("mount_pitch", model.mount_pitch);
    table.set_number("fingertip_radius", model.fingertip_radius);
    table.set_number("link_radius", model.link_radius);
    table.set_number("torque_limit", model.torque_limit);
    std::vector<double> lengths;
    for (const auto& finger : model.link_lengths)
        lengths.insert(lengths.end(), finger.begin(), finger.end());
    table.set_array("link_lengths", lengths);
    const auto put = [&](const char* key, const JointVector& v) {
        table.set_array(key, std::vector<double>(v.begin(), v.end()));
    };
    put("stiffness", model.stiffness);
    put("damping", model.damping);
    put("mass", model.mass);
    put("friction", model.friction);
    put("armature", model.armature);
    put("limit_lower", model.limit_lower);
    put("limit_upper", model.limit_upper);
    put("canonical_pose", model.canonical_pose);
}

}  // namespace rotkit::sim
