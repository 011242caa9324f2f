#pragma once

// Dual quaternions Q_r + eps Q_c, the unit subset DS^3 and the pose encoding
// Q + eps 1/2 Q o aug(P).

#include <algorithm>
#include <cmath>

#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"
#include "dqilc/quaternion.hpp"

namespace dqilc {

template <typename T>
struct DualQuat
{
    Quat<T> real = Quat<T>::zero();
    Quat<T> dual = Quat<T>::zero();

    DualQuat() = default;
    DualQuat(const Quat<T>& r, const Quat<T>& d) : real(r), dual(d) {}

    static DualQuat identity() { return {Quat<T>::identity(), Quat<T>::zero()}; }
    static DualQuat zero() { return {}; }

    bool is_finite() const { return real.is_finite() && dual.is_finite(); }

    DualQuat& operator+=(const DualQuat& o)
    {
        real += o.real;
        dual += o.dual;
        return *this;
    }
    DualQuat& operator-=(const DualQuat& o)
    {
        real -= o.real;
        dual -= o.dual;
        return *this;
    }
    DualQuat& operator*=(T s)
    {
        real *= s;
        dual *= s;
        return *this;
    }

    friend DualQuat operator+(DualQuat a, const DualQuat& b) { return a += b; }
    friend DualQuat operator-(DualQuat a, const DualQuat& b) { return a -= b; }
    friend DualQuat operator-(const DualQuat& a) { return {-a.real, -a.dual}; }
    friend DualQuat operator*(T s, DualQuat a) { return a *= s; }
    friend DualQuat operator*(DualQuat a, T s) { return a *= s; }
    friend bool operator==(const DualQuat& a, const DualQuat& b)
    {
        return a.real == b.real && a.dual == b.dual;
    }

    // Hamilton product over dual numbers, truncated at eps^2.
    friend DualQuat operator*(const DualQuat& a, const DualQuat& b)
    {
        return {a.real * b.real, a.real * b.dual + a.dual * b.real};
    }
};

using DualQuaternion = DualQuat<double>;

template <typename T>
DualQuat<T> dq_mul(const DualQuat<T>& a, const DualQuat<T>& b)
{
    return a * b;
}

template <typename T>
DualQuat<T> dq_conj(const DualQuat<T>& a)
{
    return {quat_conj(a.real), quat_conj(a.dual)};
}

template <typename T>
T crs(const DualQuat<T>& x, const DualQuat<T>& y)
{
    return x.real.dot(y.dual) + x.dual.dot(y.real);
}

template <typename T>
DualQuat<T> exch(const DualQuat<T>& x)
{
    return {x.dual, x.real};
}

template <typename T>
DualQuat<T> aug(const DualVec3<T>& x)
{
    return {aug(x.real), aug(x.dual)};
}

template <typename T>
DualVec3<T> red(const DualQuat<T>& x)
{
    return {x.real.vec, x.dual.vec};
}

namespace detail {

// Orthogonality residual of the dual part, relative to its own magnitude so
// that poses millions of meters from the origin are judged fairly.
template <typename T>
T orthogonality_residual(const DualQuat<T>& a)
{
    return std::abs(a.real.dot(a.dual)) / std::max(T(1), a.dual.norm());
}

} // namespace detail

/// True iff |Q_r| = 1 and Q_r . Q_c = 0, both within `tol` (the second
/// relative to max(1, |Q_c|)).
template <typename T>
bool is_unit(const DualQuat<T>& a, T tol)
{
    if (!a.is_finite()) {
        return false;
    }
    return std::abs(a.real.norm() - T(1)) <= tol && detail::orthogonality_residual(a) <= tol;
}

template <typename T>
class UnitDualQuat
{
public:
    static constexpr T tolerance = T(1e-9);

    UnitDualQuat() : q_(DualQuat<T>::identity()) {}

    static UnitDualQuat identity() { return {}; }

    static UnitDualQuat checked(const DualQuat<T>& q, T tol = tolerance)
    {
        if (!is_unit(q, tol)) {
            throw InvariantError("UnitDualQuaternion: real part not unit or dual part not orthogonal");
        }
        return UnitDualQuat(q);
    }

    static UnitDualQuat unchecked(const DualQuat<T>& q) { return UnitDualQuat(q); }

    const DualQuat<T>& dq() const { return q_; }
    operator const DualQuat<T>&() const { return q_; }
    const Quat<T>& real() const { return q_.real; }
    const Quat<T>& dual() const { return q_.dual; }

    UnitDualQuat conj() const { return UnitDualQuat(dq_conj(q_)); }

    friend UnitDualQuat operator*(const UnitDualQuat& a, const UnitDualQuat& b)
    {
        return UnitDualQuat(a.q_ * b.q_);
    }
    friend UnitDualQuat operator-(const UnitDualQuat& a) { return UnitDualQuat(-a.q_); }
    friend bool operator==(const UnitDualQuat& a, const UnitDualQuat& b) { return a.q_ == b.q_; }

private:
    explicit UnitDualQuat(const DualQuat<T>& q) : q_(q) {}
    DualQuat<T> q_;
};

using UnitDualQuaternion = UnitDualQuat<double>;

/// Attitude Q of frame 2 relative to frame 1 and the position P of frame 2's
/// origin, expressed in frame 2.
template <typename T>
struct BasicPose
{
    UnitQuat<T> attitude;
    Vec3<T> position = Vec3<T>::Zero();
};

using Pose = BasicPose<double>;

template <typename T>
UnitDualQuat<T> pose_to_dq(const BasicPose<T>& p)
{
    const Quat<T>& q = p.attitude;
    return UnitDualQuat<T>::unchecked({q, T(0.5) * (q * aug(p.position))});
}

template <typename T>
BasicPose<T> dq_to_pose(const DualQuat<T>& x, T tol = UnitDualQuat<T>::tolerance)
{
    if (!is_unit(x, tol)) {
        throw InvariantError("dq_to_pose: input is not a unit dual quaternion");
    }
    const Quat<T> p = T(2) * (quat_conj(x.real) * x.dual);
    return {UnitQuat<T>::unchecked(x.real), red(p)};
}

template <typename T>
BasicPose<T> dq_to_pose(const UnitDualQuat<T>& x, T tol = UnitDualQuat<T>::tolerance)
{
    return dq_to_pose(x.dq(), tol);
}

/// conj(desired) o actual, left in DS^3 without sign canonicalization.
template <typename T>
UnitDualQuat<T> error_dq(const UnitDualQuat<T>& desired, const UnitDualQuat<T>& actual)
{
    return desired.conj() * actual;
}

/// red(e* o aug(x) o e): expresses a dual vector given in the frame of
/// e's left factor in the frame of its right factor.
template <typename T>
DualVec3<T> frame_transform(const DualVec3<T>& x, const UnitDualQuat<T>& e)
{
    const DualQuat<T> y = dq_conj(e.dq()) * aug(x) * e.dq();
    constexpr T tol = T(1e-9);
    const T real_scale = std::max(T(1), x.real.norm());
    const T dual_scale = std::max(T(1), x.dual.norm() + T(2) * x.real.norm() * e.dual().norm());
    if (!(std::abs(y.real.scalar) <= tol * real_scale) || !(std::abs(y.dual.scalar) <= tol * dual_scale)) {
        throw InvariantError("frame_transform: sandwich product has a nonzero scalar part");
    }
    return red(y);
}

template <typename T>
DualVec3<T> error_twist(const DualVec3<T>& actual_twist, const DualVec3<T>& desired_twist,
                        const UnitDualQuat<T>& e)
{
    return actual_twist - frame_transform(desired_twist, e);
}

} // namespace dqilc
