// Command-line front end: run and validate campaigns, replay and summarize
// recorded iteration logs.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dqilc/dqilc.hpp"

namespace fs = std::filesystem;
using namespace dqilc;

namespace {

struct Overrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> segments;
    std::optional<std::string> variant;
    std::optional<std::string> out;
    std::optional<double> freq;

    void attach(CLI::App* app)
    {
        app->add_option("--seed", seed, "Disturbance phase seed");
        app->add_option("--iterations", iterations, "Number of iterations (k = 0..N-1)")->check(CLI::PositiveNumber);
        app->add_option("--segments", segments, "Uniform segment count")->check(CLI::PositiveNumber);
        app->add_option("--variant", variant, "Update law")
            ->check(CLI::IsMember({"eq35", "eq56", "unsaturated", "saturated"}));
        app->add_option("--out", out, "Output directory");
        app->add_option("--freq", freq, "Control and integration frequency, Hz")->check(CLI::PositiveNumber);
    }

    void apply(ExperimentConfig& cfg) const
    {
        if (seed) cfg.disturbance.seed = *seed;
        if (iterations) cfg.iterations = *iterations;
        if (segments) {
            cfg.segments = *segments;
            cfg.segment_boundaries.clear();
        }
        if (variant) cfg.law = parse_update_law(*variant);
        if (out) cfg.output_dir = *out;
        if (freq) cfg.frequency = *freq;
    }
};

ExperimentConfig load(const std::string& path, const Overrides& o)
{
    ExperimentConfig cfg = path.empty() ? ExperimentConfig{} : load_config(path);
    o.apply(cfg);
    return cfg;
}

int cmd_run(const std::string& config, const Overrides& o)
{
    const ExperimentConfig cfg = load(config, o);
    const fs::path dir = cfg.output_dir;
    const CampaignReport report = run_campaign_to_dir(cfg, dir, [](const IterationResult& res, const EstimateProfile&) {
        const auto& s = res.log.summary;
        std::fprintf(stderr, "k=%3zu  max|dP|=%10.4f m  max angle=%9.5f deg  max theta=%.5f\n", s.k,
                     s.max_position_error, rad_to_deg(s.max_angle), s.max_theta_hat);
    });
    std::printf("wrote %zu iteration logs to %s\n", report.iterations.size(), dir.string().c_str());
    std::printf("energy_bounded=%s increments_valid=%s max_theta_hat=%.6g\n",
                report.monitors.energy_bounded ? "true" : "false", report.monitors.increments_valid ? "true" : "false",
                report.monitors.max_theta_hat);
    return report.monitors.energy_bounded && report.monitors.increments_valid ? 0 : 3;
}

int cmd_validate(const std::string& config, const Overrides& o)
{
    const ExperimentConfig cfg = load(config, o);
    cfg.validate();
    std::printf("ok: %zu iterations x %zu ticks, %zu segments, %s update law, seed %llu\n", cfg.iterations,
                cfg.ticks(), cfg.segment_grid().count(), to_string(cfg.law).c_str(),
                static_cast<unsigned long long>(cfg.disturbance.seed));
    return 0;
}

int cmd_replay(const fs::path& log, std::optional<std::string> config, double tol)
{
    const fs::path cfg_path = config ? fs::path(*config) : log.parent_path() / "config.json";
    const ExperimentConfig cfg = load_config(cfg_path);
    const std::size_t k = iteration_from_log_name(log);
    const ReplayResult r = replay(cfg, k, read_tick_log(log), tol);
    std::printf("k=%zu ticks=%zu max_dP_deviation=%.3e max_dq_deviation=%.3e %s\n", k, r.ticks,
                r.max_position_deviation, r.max_qvec_deviation, r.consistent ? "consistent" : "INCONSISTENT");
    return r.consistent ? 0 : 3;
}

int cmd_metrics(const fs::path& path)
{
    std::vector<fs::path> logs;
    if (fs::is_directory(path)) {
        for (const auto& e : fs::directory_iterator(path)) {
            const auto name = e.path().filename().string();
            if (name.rfind("iteration_", 0) == 0 && e.path().extension() == ".csv") {
                logs.push_back(e.path());
            }
        }
        std::sort(logs.begin(), logs.end());
    } else {
        logs.push_back(path);
    }
    if (logs.empty()) {
        throw IoError("no iteration logs in " + path.string());
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& p : logs) {
        const IterationSummary s = metrics(read_tick_log(p), iteration_from_log_name(p));
        out.push_back({{"k", s.k},
                       {"max_dP_norm_m", s.max_position_error},
                       {"final_dP_norm_m", s.final_position_error},
                       {"max_angle_deg", rad_to_deg(s.max_angle)},
                       {"max_theta_hat", s.max_theta_hat}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-quaternion adaptive iterative learning control campaigns"};
    app.require_subcommand(1);

    std::string config;
    Overrides run_o, val_o;
    auto* run = app.add_subcommand("run", "Run a campaign and write logs");
    run->add_option("--config", config, "JSON config; reference setup if omitted")->check(CLI::ExistingFile);
    run_o.attach(run);

    auto* val = app.add_subcommand("validate", "Check a config without running it");
    val->add_option("--config", config, "JSON config")->check(CLI::ExistingFile);
    val_o.attach(val);

    fs::path log;
    std::optional<std::string> replay_config;
    double tol = 1e-9;
    auto* rep = app.add_subcommand("replay", "Re-simulate a log open loop and compare errors");
    rep->add_option("--log", log, "iteration_XXX.csv")->required()->check(CLI::ExistingFile);
    rep->add_option("--config", replay_config, "Config; defaults to config.json beside the log");
    rep->add_option("--tol", tol, "Relative deviation tolerance");

    fs::path metrics_path;
    auto* met = app.add_subcommand("metrics", "Recompute per-iteration summaries from logs");
    met->add_option("--log", metrics_path, "iteration_XXX.csv or a run directory")->required()->check(CLI::ExistingPath);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config, run_o);
        if (*val) return cmd_validate(config, val_o);
        if (*rep) return cmd_replay(log, replay_config, tol);
        if (*met) return cmd_metrics(metrics_path);
    } catch (const ArgumentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
