#pragma once

// Rigid-body pose/twist propagation in dual-quaternion form and the tracking
// error between an actual and a desired body.

#include <cmath>
#include <string>
#include <utility>

#include "dqilc/dual_quaternion.hpp"
#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"
#include "dqilc/quaternion.hpp"

namespace dqilc {

/// Pose of the body frame w.r.t. the inertial frame, and the body twist
/// (real: angular velocity rad/s, dual: linear velocity m/s, body frame).
struct RigidBodyState
{
    UnitDualQuaternion pose;
    DualVector3 twist;
};

/// Desired frame pose, its twist (expressed in the desired frame) and the
/// twist's time derivative.
struct DesiredState
{
    UnitDualQuaternion pose;
    DualVector3 twist;
    DualVector3 twist_rate;
};

struct ErrorState
{
    UnitDualQuaternion e_pose;
    DualVector3 e_twist;
    Vector3 e_position = Vector3::Zero();
    Vector3 e_qvec = Vector3::Zero();
};

struct TwistSample
{
    DualVector3 twist;
    DualVector3 rate;
};

/// Unnormalized integrator output, kept separate so drift can be observed.
struct RawBodyState
{
    DualQuaternion pose;
    DualVector3 twist;
};

/// Hard limit on pre-renormalization drift; anything beyond this indicates
/// an integrator failure rather than round-off.
inline constexpr double max_step_drift = 1e-6;

/// Decoding tolerance for error poses. The dual parts of the operands carry
/// orbital-scale positions, so cancellation noise reaches ~1e-9 there.
inline constexpr double error_decode_tolerance = 1e-6;

inline DualQuaternion kinematics_rate(const DualQuaternion& pose, const DualVector3& twist)
{
    return 0.5 * (pose * aug(twist));
}

inline DualQuaternion kinematics_rate(const RigidBodyState& state)
{
    return kinematics_rate(state.pose.dq(), state.twist);
}

/// M^-1 (-w^x M w + f + d).
inline DualVector3 dynamics_rate(const DualVector3& twist, const DualInertia& m,
                                 const DualVector3& wrench, const DualVector3& disturbance)
{
    const DualVector3 gyro = dual_cross(twist, apply_inertia(m, twist));
    return invert_inertia(m, wrench + disturbance - gyro);
}

inline DualVector3 dynamics_rate(const RigidBodyState& state, const DualInertia& m,
                                 const DualVector3& wrench, const DualVector3& disturbance)
{
    return dynamics_rate(state.twist, m, wrench, disturbance);
}

/// Residual of the two unit conditions (norm, relative orthogonality).
inline double unit_residual(const DualQuaternion& q)
{
    return std::max(std::abs(q.real.norm() - 1.0), detail::orthogonality_residual(q));
}

/// Projects a nearly-unit dual quaternion back onto DS^3: scale by 1/|Q_r|,
/// then remove the component of Q_c along Q_r.
inline UnitDualQuaternion renormalize(const DualQuaternion& q)
{
    if (!q.is_finite()) {
        throw InvariantError("renormalize: non-finite pose");
    }
    const double drift = unit_residual(q);
    if (drift > max_step_drift) {
        throw InvariantError("renormalize: unit drift " + std::to_string(drift) +
                             " exceeds integrator limit");
    }
    const double n = q.real.norm();
    const Quaternion r = q.real * (1.0 / n);
    Quaternion d = q.dual * (1.0 / n);
    d -= r.dot(d) * r;
    return UnitDualQuaternion::checked({r, d});
}

/// One classical RK4 step of the body with wrench and disturbance held
/// constant over the step. No renormalization.
inline RawBodyState integrate_body_rk4(const RigidBodyState& s, const DualInertia& m,
                                       const DualVector3& wrench, const DualVector3& disturbance,
                                       double dt)
{
    const DualQuaternion& x0 = s.pose.dq();
    const DualVector3& w0 = s.twist;
    auto dx = [](const DualQuaternion& x, const DualVector3& w) { return kinematics_rate(x, w); };
    auto dw = [&](const DualVector3& w) { return dynamics_rate(w, m, wrench, disturbance); };

    const DualQuaternion kx1 = dx(x0, w0);
    const DualVector3 kw1 = dw(w0);
    const DualQuaternion x1 = x0 + (0.5 * dt) * kx1;
    const DualVector3 w1 = w0 + (0.5 * dt) * kw1;

    const DualQuaternion kx2 = dx(x1, w1);
    const DualVector3 kw2 = dw(w1);
    const DualQuaternion x2 = x0 + (0.5 * dt) * kx2;
    const DualVector3 w2 = w0 + (0.5 * dt) * kw2;

    const DualQuaternion kx3 = dx(x2, w2);
    const DualVector3 kw3 = dw(w2);
    const DualQuaternion x3 = x0 + dt * kx3;
    const DualVector3 w3 = w0 + dt * kw3;

    const DualQuaternion kx4 = dx(x3, w3);
    const DualVector3 kw4 = dw(w3);

    return {x0 + (dt / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4),
            w0 + (dt / 6.0) * (kw1 + 2.0 * kw2 + 2.0 * kw3 + kw4)};
}

/// RK4 of the desired-frame kinematics driven by a prescribed twist profile
/// `twist_at(t) -> TwistSample`. No renormalization.
template <typename TwistFn>
DualQuaternion integrate_desired_rk4(const DesiredState& d, double t, double dt, const TwistFn& twist_at)
{
    const DualQuaternion& x0 = d.pose.dq();
    const DualVector3 w_mid = twist_at(t + 0.5 * dt).twist;
    const DualVector3 w_end = twist_at(t + dt).twist;

    const DualQuaternion k1 = kinematics_rate(x0, d.twist);
    const DualQuaternion k2 = kinematics_rate(x0 + (0.5 * dt) * k1, w_mid);
    const DualQuaternion k3 = kinematics_rate(x0 + (0.5 * dt) * k2, w_mid);
    const DualQuaternion k4 = kinematics_rate(x0 + dt * k3, w_end);
    return x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline RigidBodyState step_body(const RigidBodyState& s, const DualInertia& m, const DualVector3& wrench,
                                const DualVector3& disturbance, double dt)
{
    if (!(dt > 0.0)) {
        throw ArgumentError("step: dt must be positive");
    }
    const RawBodyState raw = integrate_body_rk4(s, m, wrench, disturbance, dt);
    if (!raw.twist.is_finite()) {
        throw InvariantError("step: non-finite twist");
    }
    return {renormalize(raw.pose), raw.twist};
}

template <typename TwistFn>
DesiredState step_desired(const DesiredState& d, double t, double dt, const TwistFn& twist_at)
{
    if (!(dt > 0.0)) {
        throw ArgumentError("step: dt must be positive");
    }
    const DualQuaternion raw = integrate_desired_rk4(d, t, dt, twist_at);
    const TwistSample next = twist_at(t + dt);
    return {renormalize(raw), next.twist, next.rate};
}

/// Advances the actual body and the desired frame from t to t + dt.
template <typename TwistFn>
std::pair<RigidBodyState, DesiredState> step(const RigidBodyState& s, const DesiredState& d, const DualInertia& m,
                                             const DualVector3& wrench, const DualVector3& disturbance,
                                             double t, double dt, const TwistFn& twist_at)
{
    return {step_body(s, m, wrench, disturbance, dt), step_desired(d, t, dt, twist_at)};
}

inline ErrorState error_state(const RigidBodyState& actual, const DesiredState& desired)
{
    ErrorState e;
    e.e_pose = error_dq(desired.pose, actual.pose);
    e.e_twist = error_twist(actual.twist, desired.twist, e.e_pose);
    const Pose p = dq_to_pose(e.e_pose, error_decode_tolerance);
    e.e_position = p.position;
    e.e_qvec = red(e.e_pose.real());
    return e;
}

} // namespace dqilc
