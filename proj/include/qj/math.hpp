#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace qj {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Vec13 = Eigen::Matrix<double, 13, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;  // m/s^2, plain simulator default

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double y = std::fmod(a + kPi, 2.0 * kPi);
    if (y <= 0.0) y += 2.0 * kPi;
    return y - kPi;
}

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline Mat3 rot_x(double a) {
    Mat3 r;
    r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
    return r;
}

inline Mat3 rot_y(double a) {
    Mat3 r;
    r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
    return r;
}

inline Mat3 rot_z(double a) {
    Mat3 r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
}

// ZYX Euler angles stored as (roll, pitch, yaw): R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Mat3 euler_zyx_to_rot(const Vec3& rpy) {
    return rot_z(rpy.z()) * rot_y(rpy.y()) * rot_x(rpy.x());
}

// omega_world = euler_rate_map(rpy) * d/dt(roll, pitch, yaw)
inline Mat3 euler_rate_map(const Vec3& rpy) {
    const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
    const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
    Mat3 e;
    e << cp * cy, -sy, 0, cp * sy, cy, 0, -sp, 0, 1;
    return e;
}

// Euler rates from a world angular velocity; singular at pitch = +-pi/2 (gimbal),
// which thrust-phase orientations stay well clear of.
inline Vec3 euler_rates_from_omega(const Vec3& rpy, const Vec3& omega_world) {
    return euler_rate_map(rpy).partialPivLu().solve(omega_world);
}

}  // namespace qj
