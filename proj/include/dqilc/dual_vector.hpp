#pragma once

// Dual 3-vectors x_r + eps x_c (eps^2 = 0) stored as explicit (real, dual)
// pairs, the dual inertia operator and the vector operators the controller
// is written in.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dqilc/error.hpp"

namespace dqilc {

template <typename T>
using Vec3 = Eigen::Matrix<T, 3, 1>;

template <typename T>
using Mat3 = Eigen::Matrix<T, 3, 3>;

template <typename T>
struct DualVec3
{
    Vec3<T> real = Vec3<T>::Zero();
    Vec3<T> dual = Vec3<T>::Zero();

    DualVec3() = default;
    DualVec3(const Vec3<T>& r, const Vec3<T>& d) : real(r), dual(d) {}

    static DualVec3 zero() { return {}; }

    bool is_finite() const { return real.allFinite() && dual.allFinite(); }

    DualVec3& operator+=(const DualVec3& o)
    {
        real += o.real;
        dual += o.dual;
        return *this;
    }
    DualVec3& operator-=(const DualVec3& o)
    {
        real -= o.real;
        dual -= o.dual;
        return *this;
    }
    DualVec3& operator*=(T s)
    {
        real *= s;
        dual *= s;
        return *this;
    }

    friend DualVec3 operator+(DualVec3 a, const DualVec3& b) { return a += b; }
    friend DualVec3 operator-(DualVec3 a, const DualVec3& b) { return a -= b; }
    friend DualVec3 operator-(const DualVec3& a) { return {-a.real, -a.dual}; }
    friend DualVec3 operator*(T s, DualVec3 a) { return a *= s; }
    friend DualVec3 operator*(DualVec3 a, T s) { return a *= s; }
    friend bool operator==(const DualVec3& a, const DualVec3& b)
    {
        return a.real == b.real && a.dual == b.dual;
    }
};

using DualVector3 = DualVec3<double>;
using Vector3 = Vec3<double>;
using Matrix3 = Mat3<double>;

template <typename T>
Mat3<T> skew(const Vec3<T>& v)
{
    Mat3<T> s;
    s << T(0), -v.z(), v.y(),
         v.z(), T(0), -v.x(),
        -v.y(), v.x(), T(0);
    return s;
}

template <typename T>
constexpr T sgn(T v)
{
    return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0));
}

template <typename T>
Vec3<T> sgn(const Vec3<T>& v)
{
    return v.unaryExpr([](T c) { return sgn(c); });
}

// Saturated sign sat(v / width). width == 0 gives the exact sign function.
template <typename T>
Vec3<T> sgn_layer(const Vec3<T>& v, T width)
{
    if (width <= T(0)) {
        return sgn(v);
    }
    return v.unaryExpr([width](T c) { return std::clamp(c / width, T(-1), T(1)); });
}

template <typename T>
const Vec3<T>& real_part(const DualVec3<T>& x)
{
    return x.real;
}

template <typename T>
const Vec3<T>& comp_part(const DualVec3<T>& x)
{
    return x.dual;
}

template <typename T>
DualVec3<T> exch(const DualVec3<T>& x)
{
    return {x.dual, x.real};
}

template <typename T>
DualVec3<T> sgn_dual(const DualVec3<T>& x)
{
    return {sgn(x.real), sgn(x.dual)};
}

/// crs(x, y) = x_r . y_c + x_c . y_r, the dual part of the dual inner product.
template <typename T>
T crs(const DualVec3<T>& x, const DualVec3<T>& y)
{
    return x.real.dot(y.dual) + x.dual.dot(y.real);
}

/// Runtime-sized variant for dual vectors of arbitrary dimension.
template <typename T>
T crs(std::span<const T> x_real, std::span<const T> x_dual, std::span<const T> y_real,
      std::span<const T> y_dual)
{
    const auto n = x_real.size();
    if (x_dual.size() != n || y_real.size() != n || y_dual.size() != n) {
        throw ArgumentError("crs: dimension mismatch");
    }
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        acc += x_real[i] * y_dual[i] + x_dual[i] * y_real[i];
    }
    return acc;
}

/// y^x x expanded with eps^2 = 0.
template <typename T>
DualVec3<T> dual_cross(const DualVec3<T>& y, const DualVec3<T>& x)
{
    return {y.real.cross(x.real), y.real.cross(x.dual) + y.dual.cross(x.real)};
}

/// Mass and symmetric positive definite inertia matrix of a rigid body,
/// acting on twists as M(a + eps b) = m b + eps J a.
template <typename T>
class BasicDualInertia
{
public:
    static constexpr T symmetry_tolerance = T(1e-9);

    BasicDualInertia(T mass, const Mat3<T>& inertia)
    {
        if (!std::isfinite(mass) || !(mass > T(0))) {
            throw ArgumentError("DualInertia: mass must be positive and finite");
        }
        if (!inertia.allFinite()) {
            throw ArgumentError("DualInertia: inertia has non-finite entries");
        }
        const T asym = (inertia - inertia.transpose()).cwiseAbs().maxCoeff();
        if (asym > symmetry_tolerance) {
            throw ArgumentError("DualInertia: inertia asymmetry " + std::to_string(asym) +
                                " exceeds tolerance");
        }
        inertia_ = T(0.5) * (inertia + inertia.transpose());
        Eigen::LLT<Mat3<T>> llt(inertia_);
        if (llt.info() != Eigen::Success) {
            throw ArgumentError("DualInertia: inertia is not positive definite");
        }
        inertia_inv_ = llt.solve(Mat3<T>::Identity());
        mass_ = mass;
    }

    T mass() const { return mass_; }
    const Mat3<T>& inertia() const { return inertia_; }
    const Mat3<T>& inertia_inverse() const { return inertia_inv_; }

private:
    T mass_{};
    Mat3<T> inertia_;
    Mat3<T> inertia_inv_;
};

using DualInertia = BasicDualInertia<double>;

template <typename T>
DualVec3<T> apply_inertia(const BasicDualInertia<T>& m, const DualVec3<T>& w)
{
    return {m.mass() * w.dual, m.inertia() * w.real};
}

template <typename T>
DualVec3<T> invert_inertia(const BasicDualInertia<T>& m, const DualVec3<T>& r)
{
    return {m.inertia_inverse() * r.dual, r.real / m.mass()};
}

/// Robust-term direction used by the learning controller. Note the cross
/// wiring: the real output follows sgn(x_c), the dual output sgn(x_r).
/// A positive `boundary_layer` replaces sgn by a saturation of that width.
template <typename T>
DualVec3<T> func_op(const DualVec3<T>& x, const DualVec3<T>& y, const DualVec3<T>& z,
                    T boundary_layer = T(0))
{
    const T real_gain = (y.real.cross(y.dual) + z.dual).norm() + T(1);
    const T dual_gain = y.real.squaredNorm() + z.real.norm() + T(1);
    return {real_gain * sgn_layer(x.dual, boundary_layer),
            dual_gain * sgn_layer(x.real, boundary_layer)};
}

} // namespace dqilc
