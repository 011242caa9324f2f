// Acceptance suite: algebraic property checks on random inputs, derivative
// consistency along simulated trajectories, integrator order, and the
// reference campaign's convergence bands. Prints one line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fd_probe.hpp"
#include "support.hpp"

using namespace dqilc;
using testing_support::dq_distance;
using testing_support::Rng;

namespace {

struct Outcome
{
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o)
{
    std::printf("criterion %2d %-42s %s  %s\n", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) {
        ++failures;
    }
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

constexpr int cases = testing_support::random_cases;

Outcome error_pose_closure()
{
    Rng rng(101);
    double worst = 0.0;
    int id_fail = 0, neg_fail = 0;
    for (int i = 0; i < cases; ++i) {
        const UnitDualQuaternion a = rng.unit_dq(1e7), b = rng.unit_dq(1e7);
        const DualQuaternion e = error_dq(a, b).dq();
        const double res = std::max(std::abs(e.real.norm() - 1.0), detail::orthogonality_residual(e));
        worst = std::max(worst, res);

        const double scale = std::max(1.0, dq_to_pose(a).position.norm());
        // Equal poses give +identity, negated ones -identity.
        if (dq_distance(error_dq(a, a).dq(), DualQuaternion::identity()) > 1e-9 * scale) ++id_fail;
        if (dq_distance(error_dq(a, -a).dq(), -DualQuaternion::identity()) > 1e-9 * scale) ++neg_fail;
        // Distinct poses give neither; perturbations of a by 1 mm or 1e-6 rad
        // must be detected.
        const Pose pa = dq_to_pose(a);
        const UnitDualQuaternion shifted = pose_to_dq(Pose{pa.attitude, pa.position + 1e-3 * rng.unit_vec()});
        const UnitDualQuaternion turned =
            pose_to_dq(Pose{pa.attitude * from_axis_angle(rng.unit_vec(), 1e-6), pa.position});
        for (const auto& c : {b, shifted, turned}) {
            const DualQuaternion ec = error_dq(a, c).dq();
            if (dq_distance(ec, DualQuaternion::identity()) < 1e-7) ++id_fail;
            if (dq_distance(ec, -DualQuaternion::identity()) < 1e-7) ++neg_fail;
        }
    }
    return {worst < 1e-9 && id_fail == 0 && neg_fail == 0,
            fmt("max unit residual %.2e, identity mismatches %g, negation mismatches %g", worst, id_fail, neg_fail)};
}

Outcome pose_round_trip()
{
    Rng rng(102);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
        const Pose p = rng.pose(1e7);
        const double scale = std::max(1.0, p.position.norm());
        const UnitDualQuaternion x = pose_to_dq(p);
        const Pose back = dq_to_pose(x);
        worst = std::max(worst, (back.position - p.position).norm() / scale);
        worst = std::max(worst, (back.attitude.quat().coeffs() - p.attitude.quat().coeffs()).norm());
        // Converse direction: a unit dual quaternion survives decode/encode.
        worst = std::max(worst, dq_distance(pose_to_dq(back).dq(), x.dq()) / scale);
    }
    return {worst < 1e-9, fmt("max relative round-trip error %.2e (|P| up to 1e7 m)", worst)};
}

Outcome sandwich_properties()
{
    Rng rng(103);
    double scalar = 0.0, norm = 0.0;
    for (int i = 0; i < cases; ++i) {
        const UnitDualQuaternion e = rng.unit_dq(1e3);
        const DualVector3 x = rng.dual_vec(1.0, 10.0);
        const DualQuaternion s = dq_conj(e.dq()) * aug(x) * e.dq();
        scalar = std::max({scalar, std::abs(s.real.scalar), std::abs(s.dual.scalar)});
        norm = std::max(norm, std::abs(frame_transform(x, e).real.norm() - x.real.norm()));
    }
    return {scalar < 1e-9 && norm < 1e-10, fmt("max scalar part %.2e, max norm change %.2e", scalar, norm)};
}

Outcome inertia_cross_identity()
{
    Rng rng(104);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
        const DualInertia m(rng.uniform(0.1, 100.0), rng.spd());
        const DualVector3 x = rng.dual_vec(), y = rng.dual_vec();
        const double lhs = crs(x, -apply_inertia(m, dual_cross(y, x)));
        const double rhs = crs(x, dual_cross(y, apply_inertia(m, x)));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
    return {worst < 1e-10, fmt("max relative deviation %.2e", worst)};
}

Outcome crs_adjoint()
{
    Rng rng(105);
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
        const DualQuaternion a = rng.dual_quat(), b = rng.dual_quat(), c = rng.dual_quat();
        worst = std::max(worst, std::abs(crs(a * b, c) - crs(b, dq_conj(a) * c)));
    }
    return {worst < 1e-10, fmt("max deviation %.2e", worst)};
}

Outcome error_derivatives()
{
    using namespace testing_support;
    const ExperimentConfig cfg = probe_config();
    const DualInertia m = cfg.plant.dual_inertia();
    const double h = 1e-5;
    double worst_pose = 0.0, worst_twist = 0.0;
    std::size_t points = 0;
    for (const auto& p : sample_trajectory(cfg, 50)) {
        const ErrorState e0 = error_state(p.body, p.desired);
        const ErrorState ep = error_state(shift_body(p, m, h), shift_desired(p, cfg.trajectory, h));
        const ErrorState em = error_state(shift_body(p, m, -h), shift_desired(p, cfg.trajectory, -h));

        const DualQuaternion fd_pose = (1.0 / (2 * h)) * (ep.e_pose.dq() - em.e_pose.dq());
        const DualQuaternion an_pose = 0.5 * (e0.e_pose.dq() * aug(e0.e_twist));
        const double pose_scale = std::max(an_pose.real.norm(), an_pose.dual.norm());
        worst_pose = std::max(worst_pose, dq_distance(fd_pose, an_pose) / pose_scale);

        const DualVector3 fd_tw = (1.0 / (2 * h)) * (ep.e_twist - em.e_twist);
        const DualVector3 tr_rate = frame_transform(p.desired.twist_rate, e0.e_pose);
        const DualVector3 an_tw =
            invert_inertia(m, -apply_inertia(m, dual_cross(p.body.twist, e0.e_twist)) -
                                  dual_cross(p.body.twist, apply_inertia(m, p.body.twist)) -
                                  apply_inertia(m, tr_rate) + p.wrench + p.disturbance);
        worst_twist = std::max({worst_twist, rel_err(fd_tw.real, an_tw.real), rel_err(fd_tw.dual, an_tw.dual)});
        ++points;
    }
    return {points >= 20 && worst_pose < 1e-5 && worst_twist < 1e-5,
            fmt("%g trajectory points, max relative error: pose rate %.2e, twist rate %.2e", double(points), worst_pose,
                worst_twist)};
}

Outcome increments_hold(const CampaignReport& sat, const CampaignReport& unsat)
{
    return {sat.monitors.increments_valid && unsat.monitors.increments_valid,
            std::string("saturated campaign: ") + (sat.monitors.increments_valid ? "all ticks valid" : "violations") +
                ", unsaturated campaign: " + (unsat.monitors.increments_valid ? "all ticks valid" : "violations")};
}

double rotation_error(double dt)
{
    const Vector3 w{0.3, -0.8, 1.1};
    const double horizon = 8.0;
    RigidBodyState s{UnitDualQuaternion::identity(), DualVector3{w, Vector3::Zero()}};
    const DualInertia sphere(1.0, Matrix3::Identity());
    const auto steps = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < steps; ++i) {
        s = step_body(s, sphere, DualVector3{}, DualVector3{}, dt);
    }
    const UnitQuaternion exact = from_axis_angle(w.normalized(), w.norm() * horizon);
    return (s.pose.real().coeffs() - exact.quat().coeffs()).norm();
}

Outcome integrator_order()
{
    const double e1 = rotation_error(0.2), e2 = rotation_error(0.1), e3 = rotation_error(0.05);
    const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
    const bool ok = o1 >= 3.7 && o1 <= 4.2 && o2 >= 3.7 && o2 <= 4.2;
    return {ok, fmt("observed orders %.3f (0.2->0.1 s), %.3f (0.1->0.05 s)", o1, o2)};
}

struct Campaign
{
    CampaignReport report;
    double seconds = 0.0;
};

Campaign run(UpdateLaw law)
{
    ExperimentConfig cfg;
    cfg.law = law;
    const auto t0 = std::chrono::steady_clock::now();
    Campaign c;
    c.report = run_campaign(cfg);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

Outcome first_iteration(const CampaignReport& r)
{
    const auto& s = r.iterations.front();
    const double deg = rad_to_deg(s.max_angle);
    const bool ok = s.max_position_error >= 300.0 && s.max_position_error <= 5000.0 && deg >= 20.0 && deg <= 70.0;
    return {ok, fmt("k=0 max|dP| %.2f m (band 300..5000), max angle %.2f deg (band 20..70)", s.max_position_error,
                    deg)};
}

Outcome last_iteration(const CampaignReport& r)
{
    const auto& s = r.iterations.at(30);
    const double deg = rad_to_deg(s.max_angle);
    return {s.max_position_error <= 100.0 && deg <= 1.0,
            fmt("k=30 max|dP| %.3f m (<= 100), max angle %.3f deg (<= 1)", s.max_position_error, deg)};
}

Outcome estimate_plateau(const CampaignReport& r)
{
    const double m25 = r.iterations.at(25).max_theta_hat, m30 = r.iterations.at(30).max_theta_hat;
    const double overall = r.monitors.max_theta_hat;
    const double change = std::abs(m30 - m25) / m25;
    return {overall >= 0.1 && overall <= 2.0 && change < 0.05,
            fmt("max theta %.4f (0.1..2.0), k=25 %.4f, k=30 %.4f, change %.1f%% (< 5%%)", overall, m25, m30,
                100.0 * change)};
}

Outcome monotone_position(const CampaignReport& r)
{
    double worst = 0.0;
    for (std::size_t k = 6; k < r.iterations.size(); ++k) {
        worst = std::max(worst, r.iterations[k].max_position_error / r.iterations[k - 1].max_position_error);
    }
    return {worst <= 1.05, fmt("largest iteration-to-iteration ratio of max|dP| for k >= 5: %.4f (<= 1.05)", worst)};
}

Outcome unsaturated_converges(const CampaignReport& unsat, const CampaignReport& sat)
{
    const Outcome base = last_iteration(unsat);
    const auto& u = unsat.iterations.at(30);
    const auto& s = sat.iterations.at(30);
    // Iteration-wise speed: at no iteration may the unsaturated law trail the
    // saturated one.
    std::size_t behind = 0;
    for (std::size_t k = 0; k < unsat.iterations.size(); ++k) {
        if (unsat.iterations[k].max_position_error > sat.iterations[k].max_position_error * (1 + 1e-12) ||
            unsat.iterations[k].max_angle > sat.iterations[k].max_angle * (1 + 1e-12)) {
            ++behind;
        }
    }
    const bool ok = base.pass && behind == 0;
    return {ok, base.detail + fmt("; vs saturated k=30 %.3f m / %.3f deg; iterations trailing: %g", s.max_position_error,
                                  rad_to_deg(s.max_angle), double(behind)) +
                    fmt(" (unsaturated %.3f m)", u.max_position_error)};
}

} // namespace

int main()
{
    report(1, "error pose closure and identity cases", error_pose_closure());
    report(2, "pose encode/decode round trip", pose_round_trip());
    report(3, "sandwich product scalar part and norm", sandwich_properties());
    report(4, "inertia cross-product identity", inertia_cross_identity());
    report(5, "crs adjoint identity", crs_adjoint());
    report(6, "error pose/twist finite differences", error_derivatives());

    const Campaign sat = run(UpdateLaw::saturated);
    const Campaign unsat = run(UpdateLaw::unsaturated);
    std::printf("# reference campaigns: 31 iterations each, %.1f s (saturated), %.1f s (unsaturated)\n", sat.seconds,
                unsat.seconds);

    report(7, "learning increments at every tick", increments_hold(sat.report, unsat.report));
    report(8, "RK4 convergence order", integrator_order());
    report(9, "first iteration error bands", first_iteration(sat.report));
    report(10, "final iteration error bounds", last_iteration(sat.report));
    report(11, "estimate bounded with plateau", estimate_plateau(sat.report));
    report(12, "position error non-increasing", monotone_position(sat.report));
    report(13, "unsaturated law converges as fast", unsaturated_converges(unsat.report, sat.report));

    std::printf("# %d of 13 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
