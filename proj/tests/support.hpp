#pragma once

// Random generators and independent reference implementations shared by the
// test suites. The oracles here deliberately avoid the library's own
// product and rotation code.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "dqilc/dqilc.hpp"

namespace testing_support {

using namespace dqilc;

inline constexpr int random_cases = 1000;

class Rng
{
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

    Vector3 vec(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }
    Vector3 unit_vec()
    {
        Vector3 v;
        do {
            v = vec();
        } while (v.norm() < 1e-3);
        return v.normalized();
    }
    DualVector3 dual_vec(double real_scale = 1.0, double dual_scale = 1.0)
    {
        return {vec(real_scale), vec(dual_scale)};
    }
    Quaternion quat(double scale = 1.0) { return {scale * normal(), vec(scale)}; }
    UnitQuaternion unit_quat() { return normalize(Quaternion{normal(), vec()}); }
    DualQuaternion dual_quat() { return {quat(), quat()}; }
    Pose pose(double max_position)
    {
        const Vector3 dir = unit_vec();
        return {unit_quat(), dir * uniform(0.0, max_position)};
    }
    UnitDualQuaternion unit_dq(double max_position = 10.0) { return pose_to_dq(pose(max_position)); }
    Matrix3 spd()
    {
        Matrix3 a;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a(i, j) = normal();
        return a * a.transpose() + 0.5 * Matrix3::Identity();
    }

private:
    std::mt19937_64 gen_;
};

/// Hamilton product through the 4x4 left-multiplication matrix.
inline Eigen::Vector4d hamilton(const Eigen::Vector4d& a, const Eigen::Vector4d& b)
{
    Eigen::Matrix4d l;
    l << a[0], -a[1], -a[2], -a[3],
         a[1],  a[0], -a[3],  a[2],
         a[2],  a[3],  a[0], -a[1],
         a[3], -a[2],  a[1],  a[0];
    return l * b;
}

/// Matrix that maps a vector expressed in frame 1 to the same vector
/// expressed in frame 2, for the attitude [s, v] of frame 2 w.r.t. frame 1:
/// (s^2 - v.v) I + 2 v v^T - 2 s [v]x.
inline Matrix3 frame_rotation(const Quaternion& q)
{
    const double s = q.scalar;
    const Vector3& v = q.vec;
    Matrix3 vx;
    vx << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return (s * s - v.dot(v)) * Matrix3::Identity() + 2.0 * v * v.transpose() - 2.0 * s * vx;
}

inline double rel(double a, double b)
{
    return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline double dq_distance(const DualQuaternion& a, const DualQuaternion& b)
{
    return std::max((a.real.coeffs() - b.real.coeffs()).norm(), (a.dual.coeffs() - b.dual.coeffs()).norm());
}

inline Matrix3 reference_inertia()
{
    return (Matrix3() << 12, 1, 1, 1, 10, 2, 1, 2, 10).finished();
}

} // namespace testing_support
