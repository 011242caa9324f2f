#pragma once

// Scalar-first quaternions [s, v] with the Hamilton product.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>

#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"

namespace dqilc {

template <typename T>
struct Quat
{
    T scalar = T(0);
    Vec3<T> vec = Vec3<T>::Zero();

    Quat() = default;
    Quat(T s, const Vec3<T>& v) : scalar(s), vec(v) {}
    Quat(T s, T x, T y, T z) : scalar(s), vec(x, y, z) {}

    static Quat identity() { return {T(1), Vec3<T>::Zero()}; }
    static Quat zero() { return {}; }

    Eigen::Matrix<T, 4, 1> coeffs() const { return {scalar, vec.x(), vec.y(), vec.z()}; }
    static Quat from_coeffs(const Eigen::Matrix<T, 4, 1>& c) { return {c[0], c[1], c[2], c[3]}; }

    T dot(const Quat& o) const { return scalar * o.scalar + vec.dot(o.vec); }
    T squared_norm() const { return dot(*this); }
    T norm() const { return std::sqrt(squared_norm()); }
    bool is_finite() const { return std::isfinite(scalar) && vec.allFinite(); }

    Quat& operator+=(const Quat& o)
    {
        scalar += o.scalar;
        vec += o.vec;
        return *this;
    }
    Quat& operator-=(const Quat& o)
    {
        scalar -= o.scalar;
        vec -= o.vec;
        return *this;
    }
    Quat& operator*=(T s)
    {
        scalar *= s;
        vec *= s;
        return *this;
    }

    friend Quat operator+(Quat a, const Quat& b) { return a += b; }
    friend Quat operator-(Quat a, const Quat& b) { return a -= b; }
    friend Quat operator-(const Quat& a) { return {-a.scalar, -a.vec}; }
    friend Quat operator*(T s, Quat a) { return a *= s; }
    friend Quat operator*(Quat a, T s) { return a *= s; }
    friend bool operator==(const Quat& a, const Quat& b)
    {
        return a.scalar == b.scalar && a.vec == b.vec;
    }

    // Hamilton product.
    friend Quat operator*(const Quat& a, const Quat& b)
    {
        return {a.scalar * b.scalar - a.vec.dot(b.vec),
                a.scalar * b.vec + b.scalar * a.vec + a.vec.cross(b.vec)};
    }
};

using Quaternion = Quat<double>;

template <typename T>
Quat<T> quat_mul(const Quat<T>& a, const Quat<T>& b)
{
    return a * b;
}

template <typename T>
Quat<T> quat_conj(const Quat<T>& a)
{
    return {a.scalar, -a.vec};
}

template <typename T>
Quat<T> aug(const Vec3<T>& x)
{
    return {T(0), x};
}

template <typename T>
const Vec3<T>& red(const Quat<T>& q)
{
    return q.vec;
}

/// Quaternion on S^3. The unit-norm invariant is checked on every checked
/// construction path.
template <typename T>
class UnitQuat
{
public:
    static constexpr T tolerance = T(1e-9);
    static constexpr T min_norm = T(1e-12);

    UnitQuat() : q_(Quat<T>::identity()) {}

    static UnitQuat identity() { return {}; }

    /// Throws InvariantError unless |q| = 1 within `tol`.
    static UnitQuat checked(const Quat<T>& q, T tol = tolerance)
    {
        if (!q.is_finite() || std::abs(q.norm() - T(1)) > tol) {
            throw InvariantError("UnitQuaternion: norm deviates from 1");
        }
        return UnitQuat(q);
    }

    /// For results that are unit by construction (products, conjugates).
    static UnitQuat unchecked(const Quat<T>& q) { return UnitQuat(q); }

    const Quat<T>& quat() const { return q_; }
    operator const Quat<T>&() const { return q_; }
    T scalar() const { return q_.scalar; }
    const Vec3<T>& vec() const { return q_.vec; }

    UnitQuat conj() const { return UnitQuat(quat_conj(q_)); }

    friend UnitQuat operator*(const UnitQuat& a, const UnitQuat& b) { return UnitQuat(a.q_ * b.q_); }
    friend UnitQuat operator-(const UnitQuat& a) { return UnitQuat(-a.q_); }
    friend bool operator==(const UnitQuat& a, const UnitQuat& b) { return a.q_ == b.q_; }

private:
    explicit UnitQuat(const Quat<T>& q) : q_(q) {}
    Quat<T> q_;
};

using UnitQuaternion = UnitQuat<double>;

template <typename T>
UnitQuat<T> normalize(const Quat<T>& a)
{
    const T n = a.norm();
    if (!std::isfinite(n) || n <= UnitQuat<T>::min_norm) {
        throw ArgumentError("normalize: quaternion norm is zero or not finite");
    }
    return UnitQuat<T>::unchecked(a * (T(1) / n));
}

/// [cos(phi/2), e sin(phi/2)] for a unit axis e.
template <typename T>
UnitQuat<T> from_axis_angle(const Vec3<T>& axis, T angle)
{
    if (!axis.allFinite() || std::abs(axis.norm() - T(1)) > UnitQuat<T>::tolerance) {
        throw ArgumentError("from_axis_angle: axis must have unit length");
    }
    const T half = angle / T(2);
    return UnitQuat<T>::unchecked({std::cos(half), axis * std::sin(half)});
}

/// Principal rotation angle in [0, pi]; Q and -Q give the same angle.
template <typename T>
T to_angle(const UnitQuat<T>& q)
{
    return T(2) * std::acos(std::min(T(1), std::abs(q.scalar())));
}

} // namespace dqilc
