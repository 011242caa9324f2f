#pragma once

// Segment-based adaptive iterative learning controller: the segment index,
// the per-segment dynamic projection of the previous iteration's estimate,
// the dual-number control law and its iteration-domain update laws.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dqilc/dual_quaternion.hpp"
#include "dqilc/dual_vector.hpp"
#include "dqilc/error.hpp"
#include "dqilc/rigid_body.hpp"

namespace dqilc {

/// Boundaries 0 = h_0 < h_1 < ... < h_s = T.
class SegmentGrid
{
public:
    explicit SegmentGrid(std::vector<double> boundaries) : h_(std::move(boundaries))
    {
        if (h_.size() < 2) {
            throw ArgumentError("SegmentGrid: need at least one segment");
        }
        if (h_.front() != 0.0) {
            throw ArgumentError("SegmentGrid: first boundary must be 0");
        }
        for (std::size_t j = 1; j < h_.size(); ++j) {
            if (!std::isfinite(h_[j]) || !(h_[j] > h_[j - 1])) {
                throw ArgumentError("SegmentGrid: boundaries must be strictly increasing");
            }
        }
    }

    static SegmentGrid uniform(double horizon, std::size_t segments)
    {
        if (segments < 1 || !(horizon > 0.0)) {
            throw ArgumentError("SegmentGrid: need horizon > 0 and at least one segment");
        }
        std::vector<double> h(segments + 1);
        for (std::size_t j = 0; j <= segments; ++j) {
            h[j] = horizon * static_cast<double>(j) / static_cast<double>(segments);
        }
        h.back() = horizon;
        return SegmentGrid(std::move(h));
    }

    std::size_t count() const { return h_.size() - 1; }
    double horizon() const { return h_.back(); }
    double boundary(std::size_t j) const { return h_.at(j); }
    const std::vector<double>& boundaries() const { return h_; }

private:
    std::vector<double> h_;
};

namespace detail {

// min{ j in 1..s : h_j >= t - slack }.
inline std::size_t segment_index_with_slack(const SegmentGrid& grid, double t, double slack)
{
    const auto& h = grid.boundaries();
    const auto it = std::lower_bound(h.begin() + 1, h.end(), t - slack);
    if (it == h.end()) {
        throw ArgumentError("segment_index: t beyond horizon");
    }
    return static_cast<std::size_t>(it - h.begin());
}

} // namespace detail

/// 1-based index of the segment containing t; t = 0 belongs to segment 1.
inline std::size_t segment_index(const SegmentGrid& grid, double t)
{
    if (!(t >= 0.0) || t > grid.horizon()) {
        throw ArgumentError("segment_index: t = " + std::to_string(t) + " outside [0, T]");
    }
    return detail::segment_index_with_slack(grid, t, 0.0);
}

/// Scalar estimate sampled at every control tick t_i = i / frequency,
/// i = 0..N with N = T * frequency.
struct EstimateProfile
{
    std::vector<double> samples;
    double frequency = 1000.0;
    std::size_t iteration = 0;

    static EstimateProfile zeros(double horizon, double frequency)
    {
        if (!(horizon > 0.0) || !(frequency > 0.0)) {
            throw ArgumentError("EstimateProfile: horizon and frequency must be positive");
        }
        const double n = std::round(horizon * frequency);
        EstimateProfile p;
        p.samples.assign(static_cast<std::size_t>(n) + 1, 0.0);
        p.frequency = frequency;
        return p;
    }

    std::size_t size() const { return samples.size(); }
    double time(std::size_t i) const { return static_cast<double>(i) / frequency; }
    double horizon() const { return time(samples.empty() ? 0 : samples.size() - 1); }
    double max() const
    {
        return samples.empty() ? 0.0 : *std::max_element(samples.begin(), samples.end());
    }
};

/// Segment of every tick of a profile. Ticks that land within a rounding
/// error of a boundary are assigned to the segment that boundary closes.
inline std::vector<std::size_t> tick_segments(const SegmentGrid& grid, std::size_t ticks, double frequency)
{
    if (ticks == 0) {
        return {};
    }
    const double horizon = static_cast<double>(ticks - 1) / frequency;
    const double slack = 1e-9 / frequency;
    if (std::abs(horizon - grid.horizon()) > slack) {
        throw ArgumentError("tick_segments: profile horizon does not match the segment grid");
    }
    std::vector<std::size_t> seg(ticks);
    for (std::size_t i = 0; i < ticks; ++i) {
        seg[i] = detail::segment_index_with_slack(grid, static_cast<double>(i) / frequency, slack);
    }
    return seg;
}

/// Segment-based dynamic projection. Within each segment (h_{j-1}, h_j] the
/// profile is floored at (segment max - k_c); values above the floor pass
/// through unchanged.
inline EstimateProfile segment_project(const EstimateProfile& prev, const SegmentGrid& grid, double k_c)
{
    if (!(k_c > 0.0)) {
        throw ArgumentError("segment_project: k_c must be positive");
    }
    const auto seg = tick_segments(grid, prev.size(), prev.frequency);
    const double slack = 1e-9 / prev.frequency;

    std::vector<double> seg_max(grid.count() + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < prev.size(); ++i) {
        // Ticks sitting on the opening boundary h_{j-1} are excluded from the
        // half-open interval; only tick 0 can be in that position.
        if (prev.time(i) <= grid.boundary(seg[i] - 1) + slack) {
            continue;
        }
        seg_max[seg[i]] = std::max(seg_max[seg[i]], prev.samples[i]);
    }

    EstimateProfile out = prev;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const double m = seg_max[seg[i]];
        if (!std::isfinite(m)) {
            continue;
        }
        const double floor = m - k_c;
        const double x = prev.samples[i];
        out.samples[i] = x > floor ? x : floor;
    }
    return out;
}

struct ControllerGains
{
    double k_p = 1.0;
    double k_d = 1.0;
    double k_c = 0.01;
    double k_theta = 0.002;
    std::optional<double> k_l = 0.02;
    /// Width of the saturation replacing sgn in the robust term; 0 keeps the
    /// discontinuous sign function.
    double boundary_layer = 0.0;

    void validate() const
    {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(k_p) || !positive(k_d) || !positive(k_c) || !positive(k_theta)) {
            throw ArgumentError("gains: k_p, k_d, k_c and k_theta must be positive");
        }
        if (k_l && !positive(*k_l)) {
            throw ArgumentError("gains: k_l must be positive when given");
        }
        if (!(boundary_layer >= 0.0) || !std::isfinite(boundary_layer)) {
            throw ArgumentError("gains: boundary layer width must be non-negative");
        }
    }
};

enum class UpdateLaw
{
    unsaturated, // theta_k = proj(theta_{k-1}) + k_theta crs(...)
    saturated,   // increment clipped at k_l
};

/// Desired twist and twist rate carried into the body frame through the
/// current error pose, and the robust-term direction built from them.
struct LearningTerms
{
    DualVector3 twist_in_body;
    DualVector3 rate_in_body;
    DualVector3 direction; // func_op(e_twist, twist_in_body, rate_in_body)
};

inline LearningTerms learning_terms(const ErrorState& err, const DesiredState& desired, double boundary_layer = 0.0)
{
    LearningTerms lt;
    lt.twist_in_body = frame_transform(desired.twist, err.e_pose);
    lt.rate_in_body = frame_transform(desired.twist_rate, err.e_pose);
    lt.direction = func_op(err.e_twist, lt.twist_in_body, lt.rate_in_body, boundary_layer);
    return lt;
}

/// k_theta crs(e_twist, direction); non-negative by construction.
inline double learning_increment(const ErrorState& err, const LearningTerms& lt, double k_theta)
{
    return k_theta * crs(err.e_twist, lt.direction);
}

/// Returned wrench: real part force (N), dual part torque (N m), body frame.
inline DualVector3 control_law(const ErrorState& err, const LearningTerms& lt, double theta_hat,
                               const ControllerGains& g)
{
    const Quaternion& dq_r = err.e_pose.real();
    const Quaternion& dq_c = err.e_pose.dual();
    DualVector3 f = -theta_hat * lt.direction - g.k_d * exch(err.e_twist);
    f.dual -= g.k_p * red(dq_r);
    f.real -= g.k_p * red(quat_conj(dq_r) * dq_c);
    return f;
}

inline DualVector3 control_law(const ErrorState& err, const DesiredState& desired, double theta_hat,
                               const ControllerGains& g)
{
    if (!(theta_hat >= 0.0)) {
        throw ArgumentError("control_law: estimate must be non-negative");
    }
    return control_law(err, learning_terms(err, desired, g.boundary_layer), theta_hat, g);
}

inline double apply_update(double prev_projected, double increment, const ControllerGains& g, UpdateLaw law)
{
    if (law == UpdateLaw::saturated) {
        if (!g.k_l) {
            throw ArgumentError("update: saturated law requires k_l");
        }
        return prev_projected + std::min(*g.k_l, increment);
    }
    return prev_projected + increment;
}

inline double update_estimate(double prev_projected, const ErrorState& err, const DesiredState& desired,
                              const ControllerGains& g, UpdateLaw law)
{
    if (!std::isfinite(prev_projected)) {
        throw ArgumentError("update_estimate: previous estimate is not finite");
    }
    const LearningTerms lt = learning_terms(err, desired, g.boundary_layer);
    return apply_update(prev_projected, learning_increment(err, lt, g.k_theta), g, law);
}

/// One control tick of iteration k: reads proj(theta_{k-1})(t_i), stores
/// theta_k(t_i) into `current` and returns the wrench computed with it.
/// The increment actually added is written to `applied_increment` if given.
inline DualVector3 run_controller_tick(std::size_t tick, const ErrorState& err, const DesiredState& desired,
                                       const EstimateProfile& prev_projected, EstimateProfile& current,
                                       const ControllerGains& g, UpdateLaw law,
                                       double* applied_increment = nullptr)
{
    if (prev_projected.size() != current.size() || prev_projected.frequency != current.frequency) {
        throw ArgumentError("run_controller_tick: estimate profiles are on different grids");
    }
    if (tick >= current.size()) {
        throw ArgumentError("run_controller_tick: tick " + std::to_string(tick) + " outside the profile");
    }
    const LearningTerms lt = learning_terms(err, desired, g.boundary_layer);
    const double raw = learning_increment(err, lt, g.k_theta);
    const double theta = apply_update(prev_projected.samples[tick], raw, g, law);
    if (applied_increment) {
        *applied_increment = law == UpdateLaw::saturated ? std::min(*g.k_l, raw) : raw;
    }
    if (!(theta >= 0.0)) {
        throw InvariantError("run_controller_tick: estimate became negative or non-finite");
    }
    current.samples[tick] = theta;
    return control_law(err, lt, theta, g);
}

} // namespace dqilc
