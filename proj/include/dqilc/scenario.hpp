#pragma once

// Reference trajectory and disturbance environment for the orbital
// proximity-operation tracking scenario.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "dqilc/dual_quaternion.hpp"
#include "dqilc/error.hpp"
#include "dqilc/rigid_body.hpp"

namespace dqilc {

/// Earth's gravitational parameter, m^3/s^2.
inline constexpr double earth_mu = 3.986004418e14;

/// Desired body twist as a function of time.
///
/// `proximity`: a frame carried around a near-circular orbit at rate
/// `orbit_rate` while rolling about its x axis through the angle
///   a(t) = roll_amplitude * (1 - cos(roll_frequency * t)),
/// with constant body-frame linear velocity `speed` along x:
///   w(t) = [a'(t), -orbit_rate cos a(t), orbit_rate sin a(t)] + eps [speed, 0, 0].
///
/// `hold`: zero twist for all t.
struct DesiredTrajectory
{
    enum class Kind { proximity, hold };

    Kind kind = Kind::proximity;
    double orbit_rate = 0.0011;               // rad/s
    double roll_amplitude = std::numbers::pi / 8.0;  // rad
    double roll_frequency = std::numbers::pi / 10.0; // rad/s
    double speed = 7668.5229;                 // m/s

    TwistSample operator()(double t) const
    {
        if (kind == Kind::hold) {
            return {};
        }
        const double a = roll_amplitude * (1.0 - std::cos(roll_frequency * t));
        const double a_dot = roll_amplitude * roll_frequency * std::sin(roll_frequency * t);
        const double a_ddot = roll_amplitude * roll_frequency * roll_frequency * std::cos(roll_frequency * t);
        const double ca = std::cos(a);
        const double sa = std::sin(a);

        TwistSample s;
        s.twist.real = {a_dot, -orbit_rate * ca, orbit_rate * sa};
        s.twist.dual = {speed, 0.0, 0.0};
        s.rate.real = {a_ddot, orbit_rate * sa * a_dot, orbit_rate * ca * a_dot};
        s.rate.dual = Vector3::Zero();
        return s;
    }
};

/// Default desired trajectory, returning (twist, twist rate) at time t.
inline TwistSample desired_twist(double t)
{
    return DesiredTrajectory{}(t);
}

struct DisturbanceConfig
{
    // Disturbance torque s_k: per-axis sinusoids with fixed phases.
    std::array<double, 3> torque_periods{400.0, 500.0, 700.0};     // s
    std::array<double, 3> torque_magnitudes{0.1, 0.05, 0.08};      // N m
    std::array<double, 3> torque_phases{0.0, 0.0, 0.0};            // rad
    // Disturbance force d'_k: per-axis sinusoids with per-iteration phases
    // drawn uniformly from [0, force_phase_max].
    std::array<double, 3> force_periods{100.0, 200.0, 300.0};      // s
    std::array<double, 3> force_magnitudes{0.5, 0.5, 0.5};         // N
    double force_phase_max = 0.1 * std::numbers::pi;               // rad
    // Point-mass gravity d''_k.
    bool gravity = true;
    double mu = earth_mu;                                          // m^3/s^2
    std::uint64_t seed = 1;

    void validate() const
    {
        for (int i = 0; i < 3; ++i) {
            if (!(torque_periods[i] > 0.0) || !(force_periods[i] > 0.0)) {
                throw ArgumentError("disturbance: periods must be positive");
            }
            if (!(torque_magnitudes[i] >= 0.0) || !(force_magnitudes[i] >= 0.0)) {
                throw ArgumentError("disturbance: magnitudes must be non-negative");
            }
            if (!std::isfinite(torque_phases[i])) {
                throw ArgumentError("disturbance: torque phases must be finite");
            }
        }
        if (!(force_phase_max >= 0.0) || !std::isfinite(force_phase_max)) {
            throw ArgumentError("disturbance: phase range must be a finite non-negative number");
        }
        if (!(mu >= 0.0) || !std::isfinite(mu)) {
            throw ArgumentError("disturbance: mu must be non-negative");
        }
    }
};

/// Force-sinusoid phases for iteration k. Each (seed, k, axis) triple seeds
/// its own generator, so phases do not depend on call order.
inline std::array<double, 3> force_phases(const DisturbanceConfig& cfg, std::uint64_t k)
{
    std::array<double, 3> phases{};
    for (std::uint32_t axis = 0; axis < 3; ++axis) {
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                          static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32), axis};
        std::mt19937_64 gen(seq);
        // 53 high bits -> [0, 1); mt19937_64 output is fully specified, unlike
        // the standard distributions.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        phases[axis] = u * cfg.force_phase_max;
    }
    return phases;
}

/// Gravitational force on the body, expressed in the body frame.
inline Vector3 gravity_force(const Vector3& body_position, double mass, double mu)
{
    const double r = body_position.norm();
    if (!(r >= 1.0)) {
        throw ArgumentError("gravity: body is within 1 m of the attracting center");
    }
    return -mu * mass / (r * r * r) * body_position;
}

/// Disturbance environment of one iteration, with its phases resolved.
class IterationDisturbance
{
public:
    IterationDisturbance(const DisturbanceConfig& cfg, std::uint64_t k)
        : cfg_(cfg), force_phases_(force_phases(cfg, k))
    {
    }

    const std::array<double, 3>& phases() const { return force_phases_; }

    /// real: d' + d'' (N), dual: s (N m), all in the body frame.
    DualVector3 operator()(double t, const RigidBodyState& state, const DualInertia& m) const
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        DualVector3 d;
        for (int i = 0; i < 3; ++i) {
            d.real[i] = cfg_.force_magnitudes[i] * std::sin(two_pi * t / cfg_.force_periods[i] + force_phases_[i]);
            d.dual[i] = cfg_.torque_magnitudes[i] * std::sin(two_pi * t / cfg_.torque_periods[i] + cfg_.torque_phases[i]);
        }
        if (cfg_.gravity) {
            const Pose p = dq_to_pose(state.pose, error_decode_tolerance);
            d.real += gravity_force(p.position, m.mass(), cfg_.mu);
        }
        return d;
    }

private:
    DisturbanceConfig cfg_;
    std::array<double, 3> force_phases_;
};

inline DualVector3 disturbance(double t, std::uint64_t k, const RigidBodyState& state, const DisturbanceConfig& cfg,
                               const DualInertia& m)
{
    return IterationDisturbance(cfg, k)(t, state, m);
}

} // namespace dqilc
