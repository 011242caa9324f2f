#pragma once

// Multi-iteration learning campaigns over a fixed horizon: per-iteration
// closed-loop runs, the error-energy monitor and summary metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "dqilc/dual_quaternion.hpp"
#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"
#include "dqilc/ilc.hpp"
#include "dqilc/quaternion.hpp"
#include "dqilc/rigid_body.hpp"
#include "dqilc/scenario.hpp"

namespace dqilc {

struct MassProperties
{
    double mass = 19.0;
    Matrix3 inertia = (Matrix3() << 12, 1, 1, 1, 10, 2, 1, 2, 10).finished();

    DualInertia dual_inertia() const { return DualInertia(mass, inertia); }
};

struct ExperimentConfig
{
    double horizon = 20.0;       // s
    double frequency = 1000.0;   // Hz, control and integration
    std::size_t iterations = 31; // k = 0..30
    std::size_t segments = 200;
    std::vector<double> segment_boundaries; // overrides `segments` when non-empty
    ControllerGains gains;
    UpdateLaw law = UpdateLaw::saturated;
    MassProperties plant;
    MassProperties nominal{20.0, (Matrix3() << 20, 2, 1, 2, 15, 3, 1, 3, 15).finished()};
    /// Adds -gravity(nominal mass) to the wrench. Off in the reference setup.
    bool nominal_gravity_feedforward = false;
    DisturbanceConfig disturbance;
    std::array<double, 4> initial_attitude{0.7055, 0.0471, -0.7055, -0.0471};
    Vector3 initial_position{0.0, 0.0, -6778200.0}; // m, desired frame
    DesiredTrajectory trajectory;
    std::string output_dir = "out";

    std::size_t ticks() const { return static_cast<std::size_t>(std::round(horizon * frequency)) + 1; }
    double dt() const { return 1.0 / frequency; }

    SegmentGrid segment_grid() const
    {
        return segment_boundaries.empty() ? SegmentGrid::uniform(horizon, segments) : SegmentGrid(segment_boundaries);
    }

    /// The listed attitude is rounded to four decimals, so it is accepted
    /// within 1e-3 of unit norm and normalized.
    UnitQuaternion desired_attitude() const
    {
        const Quaternion q{initial_attitude[0], initial_attitude[1], initial_attitude[2], initial_attitude[3]};
        if (!q.is_finite() || std::abs(q.norm() - 1.0) > 1e-3) {
            throw ArgumentError("config: initial attitude is not close to unit norm");
        }
        return normalize(q);
    }

    void validate() const
    {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) {
            throw ArgumentError("config: horizon must be positive");
        }
        if (!(frequency > 0.0) || !std::isfinite(frequency)) {
            throw ArgumentError("config: frequency must be positive");
        }
        const double n = horizon * frequency;
        if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
            throw ArgumentError("config: horizon * frequency must be an integer tick count");
        }
        if (iterations < 1) {
            throw ArgumentError("config: need at least one iteration");
        }
        const SegmentGrid grid = segment_grid();
        if (std::abs(grid.horizon() - horizon) > 1e-12 * horizon) {
            throw ArgumentError("config: segment grid must end at the horizon");
        }
        gains.validate();
        if (law == UpdateLaw::saturated && !gains.k_l) {
            throw ArgumentError("config: saturated update law requires k_l");
        }
        plant.dual_inertia();
        nominal.dual_inertia();
        disturbance.validate();
        desired_attitude();
        if (!initial_position.allFinite()) {
            throw ArgumentError("config: initial position must be finite");
        }
    }
};

struct TickRecord
{
    double t = 0.0;
    Vector3 e_position = Vector3::Zero();
    Vector3 e_qvec = Vector3::Zero();
    double e_position_norm = 0.0;
    double angle = 0.0; // principal error angle, rad
    Vector3 force = Vector3::Zero();
    Vector3 torque = Vector3::Zero();
    double theta_hat = 0.0;
    double energy = 0.0; // not part of the CSV schema
};

struct IterationSummary
{
    std::size_t k = 0;
    double max_position_error = 0.0; // m
    double final_position_error = 0.0;
    double max_qvec_error = 0.0;
    double final_qvec_error = 0.0;
    double max_angle = 0.0; // rad
    double max_theta_hat = 0.0;
    double max_energy = 0.0;
    double final_energy = 0.0;
};

struct IterationLog
{
    std::size_t k = 0;
    std::vector<TickRecord> ticks;
    IterationSummary summary;
};

/// Error energy k_p crs(dQ - 1, exch(dQ - 1)) + 1/2 crs(dw, M dw); zero only
/// at perfect tracking on the +1 cover.
inline double energy(const ErrorState& err, const DualInertia& m, double k_p)
{
    const DualQuaternion shifted = err.e_pose.dq() - DualQuaternion::identity();
    return k_p * crs(shifted, exch(shifted)) + 0.5 * crs(err.e_twist, apply_inertia(m, err.e_twist));
}

inline IterationSummary metrics(const std::vector<TickRecord>& ticks, std::size_t k = 0)
{
    IterationSummary s;
    s.k = k;
    for (const auto& r : ticks) {
        s.max_position_error = std::max(s.max_position_error, r.e_position.norm());
        s.max_qvec_error = std::max(s.max_qvec_error, r.e_qvec.norm());
        s.max_angle = std::max(s.max_angle, r.angle);
        s.max_theta_hat = std::max(s.max_theta_hat, r.theta_hat);
        s.max_energy = std::max(s.max_energy, r.energy);
    }
    if (!ticks.empty()) {
        s.final_position_error = ticks.back().e_position.norm();
        s.final_qvec_error = ticks.back().e_qvec.norm();
        s.final_energy = ticks.back().energy;
    }
    return s;
}

inline IterationSummary metrics(const IterationLog& log)
{
    return metrics(log.ticks, log.k);
}

/// Desired states at every tick, integrated from the configured initial pose.
inline std::vector<DesiredState> integrate_desired(const ExperimentConfig& cfg)
{
    const std::size_t n = cfg.ticks();
    const double dt = cfg.dt();
    std::vector<DesiredState> out;
    out.reserve(n);
    const TwistSample s0 = cfg.trajectory(0.0);
    out.push_back({pose_to_dq(Pose{cfg.desired_attitude(), cfg.initial_position}), s0.twist, s0.rate});
    for (std::size_t i = 1; i < n; ++i) {
        const double t = static_cast<double>(i - 1) * dt;
        out.push_back(step_desired(out.back(), t, dt, cfg.trajectory));
    }
    return out;
}

/// Tracking errors, energy and the applied wrench at one tick.
inline TickRecord make_record(double t, const ErrorState& err, const DualVector3& wrench, double theta,
                              const DualInertia& m, double k_p)
{
    TickRecord r;
    r.t = t;
    r.e_position = err.e_position;
    r.e_qvec = err.e_qvec;
    r.e_position_norm = err.e_position.norm();
    r.angle = to_angle(UnitQuaternion::unchecked(err.e_pose.real()));
    r.force = wrench.real;
    r.torque = wrench.dual;
    r.theta_hat = theta;
    r.energy = energy(err, m, k_p);
    return r;
}

struct IterationResult
{
    IterationLog log;
    EstimateProfile profile; // theta_k
    std::vector<double> increments; // applied theta_k - proj(theta_{k-1}) per tick
};

/// One pass over [0, T]. The body starts on the desired pose and twist; each
/// tick computes the error, the learning update and wrench, the disturbance,
/// then advances the body with both inputs held over the step.
inline IterationResult run_iteration(const ExperimentConfig& cfg, std::size_t k, const EstimateProfile& prev_projected,
                                     const std::vector<DesiredState>& desired)
{
    const std::size_t n = cfg.ticks();
    if (desired.size() != n || prev_projected.size() != n) {
        throw ArgumentError("run_iteration: profile or desired trajectory does not match the tick grid");
    }
    const double dt = cfg.dt();
    const DualInertia m = cfg.plant.dual_inertia();
    const IterationDisturbance dist(cfg.disturbance, k);

    IterationResult res;
    res.profile = EstimateProfile::zeros(cfg.horizon, cfg.frequency);
    res.profile.iteration = k;
    res.log.k = k;
    res.log.ticks.reserve(n);
    res.increments.assign(n, 0.0);

    RigidBodyState state{desired[0].pose, desired[0].twist};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        try {
            const ErrorState err = error_state(state, desired[i]);
            DualVector3 wrench =
                run_controller_tick(i, err, desired[i], prev_projected, res.profile, cfg.gains, cfg.law,
                                    &res.increments[i]);
            if (cfg.nominal_gravity_feedforward && cfg.disturbance.gravity) {
                const Pose p = dq_to_pose(state.pose, error_decode_tolerance);
                wrench.real -= gravity_force(p.position, cfg.nominal.mass, cfg.disturbance.mu);
            }
            const DualVector3 d = dist(t, state, m);
            res.log.ticks.push_back(make_record(t, err, wrench, res.profile.samples[i], m, cfg.gains.k_p));
            if (i + 1 < n) {
                state = step_body(state, m, wrench, d, dt);
            }
        } catch (const std::exception& e) {
            throw InvariantError("iteration " + std::to_string(k) + ", tick " + std::to_string(i) + ": " + e.what());
        }
    }
    res.log.summary = metrics(res.log);
    return res;
}

inline IterationResult run_iteration(const ExperimentConfig& cfg, std::size_t k, const EstimateProfile& prev_projected)
{
    return run_iteration(cfg, k, prev_projected, integrate_desired(cfg));
}

struct CampaignMonitors
{
    /// max_t V_k <= 10 max_t V_0 for every k.
    bool energy_bounded = true;
    /// Every tick satisfied 0 <= theta_k - proj(theta_{k-1}) (<= k_l when saturated).
    bool increments_valid = true;
    double max_theta_hat = 0.0;
};

struct CampaignReport
{
    std::vector<IterationSummary> iterations;
    EstimateProfile final_profile;
    CampaignMonitors monitors;
};

/// Called after each iteration with its log, the projected previous
/// estimate it learned from, and its own estimate profile.
using IterationObserver = std::function<void(const IterationResult&, const EstimateProfile& prev_projected)>;

inline CampaignReport run_campaign(const ExperimentConfig& cfg, const IterationObserver& observer = {})
{
    cfg.validate();
    const SegmentGrid grid = cfg.segment_grid();
    const std::vector<DesiredState> desired = integrate_desired(cfg);

    CampaignReport report;
    EstimateProfile prev = EstimateProfile::zeros(cfg.horizon, cfg.frequency);
    EstimateProfile projected = prev; // theta_0 = 0 needs no projection
    for (std::size_t k = 0; k < cfg.iterations; ++k) {
        if (k > 0) {
            projected = segment_project(prev, grid, cfg.gains.k_c);
        }
        IterationResult res = run_iteration(cfg, k, projected, desired);

        for (std::size_t i = 0; i < res.profile.size(); ++i) {
            const double inc = res.increments[i];
            if (inc < 0.0 || res.profile.samples[i] < projected.samples[i] ||
                (cfg.law == UpdateLaw::saturated && inc > *cfg.gains.k_l)) {
                report.monitors.increments_valid = false;
            }
        }
        if (!report.iterations.empty() &&
            res.log.summary.max_energy > 10.0 * report.iterations.front().max_energy) {
            report.monitors.energy_bounded = false;
        }
        report.monitors.max_theta_hat = std::max(report.monitors.max_theta_hat, res.log.summary.max_theta_hat);
        report.iterations.push_back(res.log.summary);
        if (observer) {
            observer(res, projected);
        }
        prev = std::move(res.profile);
    }
    report.final_profile = std::move(prev);
    return report;
}

struct ReplayResult
{
    std::size_t ticks = 0;
    double max_position_deviation = 0.0; // m
    double max_qvec_deviation = 0.0;
    bool consistent = false;
};

/// Drives the body open loop with the wrenches recorded in `log` and compares
/// the resulting errors to the recorded ones. Deviations are measured
/// relative to max(1, |recorded value|) and must stay within `tol`.
inline ReplayResult replay(const ExperimentConfig& cfg, std::size_t k, const std::vector<TickRecord>& log,
                           double tol = 1e-9)
{
    const std::size_t n = cfg.ticks();
    if (log.size() != n) {
        throw ArgumentError("replay: log has " + std::to_string(log.size()) + " ticks, config expects " +
                            std::to_string(n));
    }
    const std::vector<DesiredState> desired = integrate_desired(cfg);
    const DualInertia m = cfg.plant.dual_inertia();
    const IterationDisturbance dist(cfg.disturbance, k);
    const double dt = cfg.dt();

    ReplayResult r;
    RigidBodyState state{desired[0].pose, desired[0].twist};
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        const ErrorState err = error_state(state, desired[i]);
        const double dp = (err.e_position - log[i].e_position).norm() / std::max(1.0, log[i].e_position.norm());
        const double dq = (err.e_qvec - log[i].e_qvec).norm() / std::max(1.0, log[i].e_qvec.norm());
        r.max_position_deviation = std::max(r.max_position_deviation, dp);
        r.max_qvec_deviation = std::max(r.max_qvec_deviation, dq);
        if (i + 1 < n) {
            const DualVector3 wrench{log[i].force, log[i].torque};
            state = step_body(state, m, wrench, dist(t, state, m), dt);
        }
    }
    r.ticks = n;
    r.consistent = r.max_position_deviation <= tol && r.max_qvec_deviation <= tol;
    return r;
}

inline constexpr double rad_to_deg(double r)
{
    return r * 180.0 / std::numbers::pi;
}

} // namespace dqilc
