#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>

#include "rotkit/rng.hpp"

namespace rotkit::math {

constexpr double kPi = 3.14159265358979323846;
constexpr double kUnitTol = 1e-9;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    Vec3 normalized() const {
        const double n = norm();
        if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
        return *this / n;
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Direction on S^2; construction enforces unit norm to 1e-9.
class UnitVec3 {
public:
    UnitVec3() : v_{0.0, 0.0, 1.0} {}
    UnitVec3(double x, double y, double z) : UnitVec3(Vec3{x, y, z}) {}
    explicit UnitVec3(const Vec3& v) : v_(v) {
        if (!v.finite() || std::abs(v.norm() - 1.0) > kUnitTol)
            throw std::domain_error("UnitVec3: input is not unit length");
    }

    /// Normalize an arbitrary non-zero vector into a direction.
    static UnitVec3 normalized(const Vec3& v) { return UnitVec3(v.normalized()); }

    static UnitVec3 x_axis() { return UnitVec3(Vec3{1, 0, 0}); }
    static UnitVec3 y_axis() { return UnitVec3(Vec3{0, 1, 0}); }
    static UnitVec3 z_axis() { return UnitVec3(Vec3{0, 0, 1}); }

    /// Uniform direction on the sphere.
    static UnitVec3 random(Rng& rng) {
        const double z = rng.uniform(-1.0, 1.0);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        return UnitVec3(Vec3{r * std::cos(phi), r * std::sin(phi), z});
    }

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }
    double dot(const UnitVec3& o) const { return v_.dot(o.v_); }
    UnitVec3 operator-() const { UnitVec3 u; u.v_ = -v_; return u; }

private:
    Vec3 v_;
};

/// Unit quaternion (w, x, y, z), right-handed, active rotation convention.
/// Every constructor normalizes, so instances stay within 1e-9 of unit norm.
struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Quat() = default;
    Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {
        normalize();
    }

    static Quat identity() { return Quat{}; }

    static Quat from_axis_angle(const UnitVec3& axis, double angle) {
        const double half = 0.5 * angle;
        const double s = std::sin(half);
        Quat q;
        q.w = std::cos(half);
        q.x = s * axis.x();
        q.y = s * axis.y();
        q.z = s * axis.z();
        return q;
    }

    /// Uniform random rotation (Shoemake's method).
    static Quat random(Rng& rng) {
        const double u1 = rng.uniform();
        const double u2 = rng.uniform(0.0, 2.0 * kPi);
        const double u3 = rng.uniform(0.0, 2.0 * kPi);
        const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
        return Quat(a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3));
    }

    void normalize() {
        const double n = std::sqrt(w * w + x * x + y * y + z * z);
        if (!(n > 0.0) || !std::isfinite(n))
            throw std::domain_error("Quat: cannot normalize degenerate quaternion");
        w /= n; x /= n; y /= n; z /= n;
    }

    Quat conjugate() const { Quat q; q.w = w; q.x = -x; q.y = -y; q.z = -z; return q; }
    Quat inverse() const { return conjugate(); }

    /// Hamilton product; composition of active rotations.
    Quat operator*(const Quat& o) const {
        Quat q;
        q.w = w * o.w - x * o.x - y * o.y - z * o.z;
        q.x = w * o.x + x * o.w + y * o.z - z * o.y;
        q.y = w * o.y - x * o.z + y * o.w + z * o.x;
        q.z = w * o.z + x * o.y - y * o.x + z * o.w;
        q.normalize();
        return q;
    }

    Vec3 rotate(const Vec3& v) const {
        const Vec3 u{x, y, z};
        const Vec3 t = 2.0 * u.cross(v);
        return v + w * t + u.cross(t);
    }

    double dot(const Quat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

    /// Rotation angle in [0, pi] taking the double cover into account.
    double angle_to(const Quat& o) const {
        const double d = std::min(1.0, std::abs(dot(o)));
        return 2.0 * std::acos(d);
    }

    /// Axis-angle vector theta * axis with theta in [0, pi]; zero rotation
    /// maps to the zero vector.
    Vec3 to_rotation_vector() const {
        Quat q = *this;
        if (q.w < 0.0) { q.w = -q.w; q.x = -q.x; q.y = -q.y; q.z = -q.z; }
        const double sin_half = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
        if (sin_half < 1e-12) return {0.0, 0.0, 0.0};
        const double angle = 2.0 * std::atan2(sin_half, q.w);
        return Vec3{q.x, q.y, q.z} * (angle / sin_half);
    }
};

struct Pose {
    Vec3 position;
    Quat orientation;

    Vec3 transform_point(const Vec3& local) const {
        return position + orientation.rotate(local);
    }
};

/// Six points fixed to the object frame, one at +/-0.05 m along each
/// principal axis. They turn orientation error into a position metric.
constexpr double kKeypointRadius = 0.05;
constexpr int kNumKeypoints = 6;

struct KeypointSet {
    std::array<Vec3, kNumKeypoints> points;

    static KeypointSet canonical() {
        const double r = kKeypointRadius;
        KeypointSet set;
        set.points = {Vec3{r, 0, 0}, Vec3{-r, 0, 0}, Vec3{0, r, 0},
                      Vec3{0, -r, 0}, Vec3{0, 0, r}, Vec3{0, 0, -r}};
        return set;
    }
};

/// Compose an axis-angle rotation about a world-frame axis onto q.
inline Quat rotate_about_axis(const Quat& q, const UnitVec3& axis, double angle) {
    if (std::abs(angle) > kPi + kUnitTol)
        throw std::domain_error("rotate_about_axis: |angle| must be <= pi");
    return Quat::from_axis_angle(axis, angle) * q;
}

/// Canonical object keypoints transformed into the world frame.
inline KeypointSet keypoints_of(const Pose& pose) {
    KeypointSet set = KeypointSet::canonical();
    for (auto& p : set.points) p = pose.transform_point(p);
    return set;
}

/// Mean pairwise distance between correspondingly ordered keypoints.
inline double keypoint_distance(const KeypointSet& a, const KeypointSet& b) {
    double sum = 0.0;
    for (int i = 0; i < kNumKeypoints; ++i) sum += (a.points[i] - b.points[i]).norm();
    return sum / kNumKeypoints;
}

inline double keypoint_distance(const Pose& a, const Pose& b) {
    return keypoint_distance(keypoints_of(a), keypoints_of(b));
}

/// Signed rotation between two orientations projected on an axis: the
/// axis-angle vector of q_curr * q_prev^-1 dotted with the axis.
inline double delta_rotation_about_axis(const Quat& q_prev, const Quat& q_curr,
                                        const UnitVec3& axis) {
    const Quat rel = q_curr * q_prev.inverse();
    return rel.to_rotation_vector().dot(axis.vec());
}

/// Net rotation angle below which the instantaneous rotation axis is treated
/// as undefined and the deviation reported as zero.
constexpr double kAxisRestEpsilon = 0.005;

/// Angle between the desired axis and the axis of the net rotation across an
/// orientation window. Returns 0 when the window rotates less than eps (the
/// axis is noise-dominated near rest).
inline double axis_deviation(std::span<const Quat> window, const UnitVec3& axis,
                             double eps = kAxisRestEpsilon) {
    if (window.size() < 2)
        throw std::domain_error("axis_deviation: window needs at least 2 samples");
    const Quat net = window.back() * window.front().inverse();
    const Vec3 rotvec = net.to_rotation_vector();
    const double angle = rotvec.norm();
    if (angle < eps) return 0.0;
    const double cosang = std::clamp(rotvec.dot(axis.vec()) / angle, -1.0, 1.0);
    return std::acos(cosang);
}

}  // namespace rotkit::math
