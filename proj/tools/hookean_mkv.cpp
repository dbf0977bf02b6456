#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mkv/config.hpp"
#include "mkv/io.hpp"
#include "mkv/log.hpp"
#include "mkv/scenarios.hpp"

namespace {

mkv::SimConfig load_config(const std::string& path, const std::string& scenario,
                           const std::string& out_dir, long long seed, int threads) {
    mkv::SimConfig cfg;
    if (!path.empty()) {
        cfg = mkv::SimConfig::from_file(path);
    } else {
        // desk defaults: J = 1, d = 1 on (-1, 1), unit temperature
        cfg.scenario = scenario;
        cfg.domain = mkv::ConvexDomain::box({{-1.0, 1.0}});
        cfg.chain.J = 1;
        cfg.chain.d = 1;
        cfg.chain.eps = 0.5;
        cfg.chain.beta = 1.0;
        cfg.chain.H = 1.0;
        cfg.ensemble_n = 20000;
        cfg.kinetic_dt = 1e-3;
        cfg.T_final = 1.0;
        cfg.eps_sweep = {0.5, 0.25, 0.125};
        cfg.seed = 20240817;
        cfg.seed_set = true;
    }
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) {
        cfg.seed = static_cast<std::uint64_t>(seed);
        cfg.seed_set = true;
    }
    if (threads > 0) cfg.threads = threads;
    cfg.validate();
    return cfg;
}

int run(const std::string& config_path, const std::string& scenario,
        const std::string& out_dir, long long seed, int threads) {
    const mkv::SimConfig cfg =
        load_config(config_path, scenario, out_dir, seed, threads);
    const mkv::ScenarioResult res = mkv::run_scenario(cfg);
    std::printf("%s\n", res.summary_json.c_str());
    return res.assertions_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiscale bead-spring-chain simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;
    int threads = 0;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_option("--threads", threads, "worker threads (overrides config)");

    auto* sim_kin = app.add_subcommand("simulate-kinetic",
                                       "underdamped chain ensemble run");
    auto* sim_fp = app.add_subcommand("simulate-fp",
                                      "deterministic kinetic density run");
    auto* sim_macro = app.add_subcommand("simulate-macro",
                                         "small-mass-limit density run");
    auto* sim_coupled = app.add_subcommand("simulate-coupled",
                                           "staggered flow/chain coupling run");
    auto* ver_oseen = app.add_subcommand("verify-oseen",
                                         "flow solver verification suite");
    auto* ver_ident = app.add_subcommand("verify-identities",
                                         "matrix and operator identity checks");
    auto* cmp_limit = app.add_subcommand("compare-limit",
                                         "small-mass sweep with macro comparison");
    auto* report = app.add_subcommand("report", "aggregate run directories");
    std::vector<std::string> report_dirs;
    report->add_option("dirs", report_dirs, "run directories")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_kin->parsed())
            return run(config_path, config_path.empty() ? "kinetic" : "", out_dir,
                       seed, threads);
        if (sim_fp->parsed())
            return run(config_path, config_path.empty() ? "fp" : "", out_dir, seed,
                       threads);
        if (sim_macro->parsed())
            return run(config_path, config_path.empty() ? "macro" : "", out_dir, seed,
                       threads);
        if (sim_coupled->parsed())
            return run(config_path, config_path.empty() ? "coupled" : "", out_dir,
                       seed, threads);
        if (cmp_limit->parsed())
            return run(config_path, config_path.empty() ? "compare-limit" : "",
                       out_dir, seed, threads);
        if (ver_oseen->parsed()) {
            const auto v = mkv::verify_oseen(out_dir.empty() ? "out" : out_dir);
            std::printf("rate=%.3f max_div=%.3e energy_monotone=%d pass=%d\n", v.rate,
                        v.max_divergence, v.energy_monotone ? 1 : 0, v.pass ? 1 : 0);
            return v.pass ? 0 : 1;
        }
        if (ver_ident->parsed()) {
            const auto v = mkv::verify_identities(out_dir.empty() ? "out" : out_dir);
            std::printf(
                "rouse=%.1e eig=%.3e identity=%.3e reduction=%.3e pass=%d\n",
                v.incidence_product_error, v.eigenvalue_error, v.identity_error,
                v.reduction_error, v.pass ? 1 : 0);
            return v.pass ? 0 : 1;
        }
        if (report->parsed()) {
            const std::string out =
                (out_dir.empty() ? std::string("out") : out_dir) + "/report.json";
            mkv::make_directories(out_dir.empty() ? "out" : out_dir);
            const auto rep = mkv::compare_report(report_dirs, out);
            std::printf("%s\n", rep.json.c_str());
            return rep.pass ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
