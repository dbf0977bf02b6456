#include "mkv/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include <json.hpp>

#include "mkv/fokker_planck.hpp"
#include "mkv/io.hpp"
#include "mkv/log.hpp"
#include "mkv/macro.hpp"
#include "mkv/oseen.hpp"
#include "mkv/rng.hpp"
#include "mkv/stress.hpp"

namespace mkv {

using nlohmann::json;

std::string git_describe() {
    std::FILE* p = ::popen("git describe --always --dirty 2>/dev/null", "r");
    if (!p) return "unknown";
    char buf[128] = {0};
    std::string out;
    while (std::fgets(buf, sizeof buf, p)) out += buf;
    ::pclose(p);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return out.empty() ? "unknown" : out;
}

namespace {

constexpr const char* kToolVersion = "0.1.0";

void write_manifest(const SimConfig& cfg, const std::string& dir) {
    json m;
    m["config"] = json::parse(cfg.to_json_text());
    m["git"] = git_describe();
    if (cfg.seed_set) m["seed"] = cfg.seed;
    m["tool_version"] = kToolVersion;
    write_text_file(dir + "/manifest.json", m.dump(2));
}

RGrid configuration_grid(const SimConfig& cfg, int cells_per_dim) {
    const int P = cfg.chain.n_dof();
    std::vector<int> n(P, cells_per_dim);
    std::vector<double> lo(P), hi(P);
    for (int k = 0; k < P; ++k) {
        lo[k] = cfg.domain.lo[k % cfg.chain.d];
        hi[k] = cfg.domain.hi[k % cfg.chain.d];
    }
    return RGrid(n, lo, hi);
}

void dump_density(const RGrid& grid, const std::vector<double>& density,
                  double beta, double eps, double t, const std::string& path) {
    FieldContainer c;
    for (int k = 0; k < grid.P; ++k) {
        c.dims.push_back(static_cast<std::uint64_t>(grid.n[k]));
        c.spacings.push_back(grid.h[k]);
    }
    c.beta = beta;
    c.eps = eps;
    c.time = t;
    c.payload = density;
    c.write(path);
}

void init_ensemble(Ensemble& e, const SimConfig& cfg) {
    if (cfg.r_init == "gibbs")
        e.init_positions_gibbs();
    else
        e.init_positions_uniform();
    if (cfg.v_init == "maxwellian")
        e.init_velocities_maxwellian();
    else
        e.init_velocities_zero();
}

json sweep_to_json(const std::vector<SweepEntry>& sweep) {
    json arr = json::array();
    for (const auto& s : sweep) {
        arr.push_back({{"eps", s.eps},
                       {"velocity_marginal_l1", s.velocity_marginal_l1},
                       {"second_moment_dev", s.second_moment_dev},
                       {"spatial_l1_vs_eta", s.spatial_l1_vs_eta},
                       {"spatial_l1_stderr", s.spatial_l1_stderr}});
    }
    return arr;
}

ScenarioResult finish(const SimConfig& cfg, json& summary, bool pass) {
    summary["assertions_passed"] = pass;
    ScenarioResult res;
    res.dir = cfg.out_dir;
    res.assertions_passed = pass;
    res.summary_json = summary.dump(2);
    write_text_file(cfg.out_dir + "/summary.json", res.summary_json);
    return res;
}

ScenarioResult run_particles(const SimConfig& cfg) {
    const bool kinetic = cfg.scenario == "kinetic";
    Ensemble e(cfg.ensemble_n, cfg.chain, cfg.domain, cfg.seed);
    init_ensemble(e, cfg);

    const RGrid mgrid = configuration_grid(cfg, cfg.moment_bins);
    const int dof = cfg.chain.n_dof();

    CsvWriter diag(cfg.out_dir + "/diagnostics.csv",
                   {"time", "mean_v_sq", "mean_potential", "reflections"});
    std::vector<std::string> snap_header = {"time", "chain_id", "bead_id"};
    for (int c = 0; c < cfg.chain.d; ++c) snap_header.push_back("r" + std::to_string(c));
    for (int c = 0; c < cfg.chain.d; ++c) snap_header.push_back("v" + std::to_string(c));
    std::unique_ptr<CsvWriter> snaps;
    if (cfg.snapshot_every > 0.0)
        snaps = std::make_unique<CsvWriter>(cfg.out_dir + "/snapshots.csv", snap_header);

    std::vector<std::string> mom_header = {"time", "bin", "count", "rhobar"};
    for (int k = 0; k < dof; ++k) mom_header.push_back("J" + std::to_string(k));
    for (int k = 0; k < dof; ++k)
        for (int l = 0; l < dof; ++l)
            mom_header.push_back("P" + std::to_string(k) + std::to_string(l));
    CsvWriter moments_csv(cfg.out_dir + "/moments.csv", mom_header);

    auto on_snapshot = [&](double t, const Ensemble& en, const StepStats& st) {
        double v2 = 0.0, pot = 0.0;
        std::vector<double> r(dof), v(dof);
        for (std::size_t i = 0; i < en.size(); ++i) {
            en.get_chain(i, r.data(), v.data());
            for (int k = 0; k < dof; ++k) v2 += v[k] * v[k];
            pot += chain_potential(r.data(), cfg.chain.n_beads(), cfg.chain.d);
        }
        v2 /= static_cast<double>(en.size());
        pot /= static_cast<double>(en.size());
        diag.row({t, v2, pot, static_cast<double>(st.reflections)});

        const MomentField m = empirical_moments(en, mgrid);
        for (std::size_t b = 0; b < mgrid.cells(); ++b) {
            std::vector<double> row = {t, static_cast<double>(b),
                                       static_cast<double>(m.count[b]), m.rhobar[b]};
            for (int k = 0; k < dof; ++k) row.push_back(m.current[b * dof + k]);
            for (int k = 0; k < dof * dof; ++k)
                row.push_back(m.second[b * dof * dof + k]);
            moments_csv.row(row);
        }
        if (snaps) {
            const std::size_t cap = std::min<std::size_t>(en.size(), 1000);
            for (std::size_t i = 0; i < cap; ++i) {
                en.get_chain(i, r.data(), v.data());
                for (int j = 0; j < cfg.chain.n_beads(); ++j) {
                    std::vector<double> row = {t, static_cast<double>(i),
                                               static_cast<double>(j)};
                    for (int c = 0; c < cfg.chain.d; ++c) row.push_back(r[j * cfg.chain.d + c]);
                    for (int c = 0; c < cfg.chain.d; ++c) row.push_back(v[j * cfg.chain.d + c]);
                    snaps->row(row);
                }
            }
        }
    };

    ZeroVelocity u(cfg.chain.d);
    RunCallbacks cb;
    cb.on_snapshot = on_snapshot;
    StepStats st = run_ensemble(e, cfg.T_final, cfg.kinetic_dt, u, kinetic,
                                cfg.snapshot_every, cb, cfg.threads);

    // final configuration marginal on the FP-compatible grid
    const RGrid fpgrid = configuration_grid(cfg, cfg.fp_n_r);
    dump_density(fpgrid, configuration_histogram(e, fpgrid), cfg.chain.beta,
                 cfg.chain.eps, e.time(), cfg.out_dir + "/spatial_marginal.mkvf");

    // end-of-run assertion: every bead inside the closed domain
    bool inside = true;
    {
        std::vector<double> r(dof);
        const double tol = cfg.domain.tol_boundary();
        for (std::size_t i = 0; i < e.size() && inside; ++i) {
            e.get_chain(i, r.data(), nullptr);
            for (int j = 0; j < cfg.chain.n_beads(); ++j)
                if (cfg.domain.signed_distance(&r[j * cfg.chain.d]) > tol) inside = false;
        }
    }

    json summary;
    summary["scenario"] = cfg.scenario;
    summary["reflections"] = st.reflections;
    summary["beads_inside_domain"] = inside;
    summary["T_final"] = e.time();
    return finish(cfg, summary, inside);
}

ScenarioResult run_fp(const SimConfig& cfg) {
    FpParams p;
    p.n_beads = cfg.chain.n_beads();
    p.d = cfg.chain.d;
    p.eps = cfg.chain.eps;
    p.beta = cfg.chain.beta;
    PhaseGridSpec spec;
    spec.omega = cfg.domain;
    spec.n_r = cfg.fp_n_r;
    spec.n_v = cfg.fp_n_v;
    spec.v_max = cfg.fp_v_max;
    const Splitting split =
        cfg.fp_splitting == "lie" ? Splitting::lie : Splitting::strang;
    FpSolver fp(p, spec, cfg.fp_alpha, split);
    if (cfg.fp_init == "uniform")
        fp.set_uniform();
    else
        fp.set_gibbs();

    double dt = cfg.fp_dt;
    const double bound = fp.stable_dt(nullptr);
    if (dt <= 0.0) dt = 0.9 * bound;
    const long nsteps = std::max(1l, std::lround(cfg.T_final / dt));
    dt = cfg.T_final / nsteps;

    CsvWriter diag(cfg.out_dir + "/diagnostics.csv",
                   {"time", "mass", "entropy", "dissipation", "gibbs_entropy",
                    "min_density"});
    std::vector<EnergyLogEntry> elog;
    auto record = [&]() {
        EnergyLogEntry en;
        en.t = fp.time();
        en.mass = fp.mass();
        en.entropy = fp.relative_entropy();
        en.fisher = fp.fisher_dissipation();
        en.gibbs_entropy = fp.gibbs_relative_entropy();
        en.u_sup = 0.0;
        elog.push_back(en);
        diag.row({en.t, en.mass, en.entropy, en.fisher, en.gibbs_entropy,
                  fp.min_density()});
    };
    record();
    dump_density(fp.r_grid(), fp.moments().rhobar, p.beta, p.eps, fp.time(),
                 cfg.out_dir + "/initial_marginal.mkvf");

    const long diag_stride = std::max(1l, nsteps / 64);
    double clipped = 0.0;
    for (long s = 1; s <= nsteps; ++s) {
        FpStepLog lg = fp.step(dt, nullptr);
        clipped += lg.clipped_mass;
        if (s % diag_stride == 0 || s == nsteps) record();
    }

    const ConfigurationDomain conf(cfg.domain);
    EnergyInequalityReport rep = check_energy_inequality(elog, p, conf.half_width);

    const auto mom = fp.moments();
    dump_density(mom.grid, mom.rhobar, p.beta, p.eps, fp.time(),
                 cfg.out_dir + "/spatial_marginal.mkvf");

    const double mass_drift = std::fabs(fp.mass() - 1.0);
    const double min_rho = fp.min_density();
    const bool pass = mass_drift <= 1e-10 && min_rho >= -1e-12 && rep.bound_holds &&
                      rep.gibbs_entropy_monotone;

    json summary;
    summary["scenario"] = "fp";
    summary["steps"] = nsteps;
    summary["dt"] = dt;
    summary["mass_drift"] = mass_drift;
    summary["min_density"] = min_rho;
    summary["clipped_mass"] = clipped;
    summary["energy_bound_holds"] = rep.bound_holds;
    summary["gibbs_entropy_monotone"] = rep.gibbs_entropy_monotone;
    summary["max_gibbs_entropy_increase"] = rep.max_gibbs_entropy_increase;
    summary["final_entropy"] = elog.back().entropy;
    summary["splitting"] = cfg.fp_splitting;
    if (split == Splitting::lie)
        summary["splitting_note"] = "first-order Lie splitting in use";
    return finish(cfg, summary, pass);
}

ScenarioResult run_macro(const SimConfig& cfg) {
    EtaSolver eta(cfg.chain.n_beads(), cfg.chain.d, cfg.domain, cfg.macro_n_r,
                  cfg.chain.beta);
    eta.set_uniform();
    double dt = cfg.macro_dt;
    if (dt <= 0.0) dt = 0.9 * eta.stable_dt(nullptr);
    const long nsteps = std::max(1l, std::lround(cfg.T_final / dt));
    dt = cfg.T_final / nsteps;

    CsvWriter diag(cfg.out_dir + "/diagnostics.csv",
                   {"time", "mass", "min", "max", "l1_to_gibbs"});
    const std::vector<double> gibbs = eta.gibbs_reference();
    auto l1_gibbs = [&]() {
        double acc = 0.0;
        for (std::size_t c = 0; c < eta.eta().size(); ++c)
            acc += std::fabs(eta.eta()[c] - gibbs[c]);
        return acc * eta.grid().cell_volume();
    };
    diag.row({eta.time(), eta.mass(), eta.min_value(), eta.max_value(), l1_gibbs()});
    const long diag_stride = std::max(1l, nsteps / 64);
    for (long s = 1; s <= nsteps; ++s) {
        eta.step(dt, nullptr);
        if (s % diag_stride == 0 || s == nsteps)
            diag.row(
                {eta.time(), eta.mass(), eta.min_value(), eta.max_value(), l1_gibbs()});
    }
    dump_density(eta.grid(), eta.eta(), cfg.chain.beta, cfg.chain.eps, eta.time(),
                 cfg.out_dir + "/spatial_marginal.mkvf");

    const double mass_drift = std::fabs(eta.mass() - 1.0);
    const bool pass = mass_drift <= 1e-10 && eta.min_value() >= 0.0;
    json summary;
    summary["scenario"] = "macro";
    summary["steps"] = nsteps;
    summary["dt"] = dt;
    summary["mass_drift"] = mass_drift;
    summary["min_value"] = eta.min_value();
    summary["l1_to_gibbs"] = l1_gibbs();
    return finish(cfg, summary, pass);
}

ScenarioResult run_coupled(const SimConfig& cfg) {
    if (cfg.chain.d != 2)
        throw ConfigError("coupled scenario requires d = 2 (flow solver is 2-D)");
    FlowParams fp = cfg.flow;
    fp.omega = cfg.domain;
    OseenSolver flow(fp);

    Ensemble e(cfg.ensemble_n, cfg.chain, cfg.domain, cfg.seed);
    init_ensemble(e, cfg);

    const ConfigurationDomain conf(cfg.domain);
    const double bound = kramers_bound(cfg.chain.J, cfg.chain.H, conf);

    std::vector<int> fg_n = {fp.n, fp.n};
    std::vector<double> fg_lo = {cfg.domain.lo[0], cfg.domain.lo[1]};
    std::vector<double> fg_hi = {cfg.domain.hi[0], cfg.domain.hi[1]};
    const RGrid fluid_grid(fg_n, fg_lo, fg_hi);

    const bool two_way = cfg.coupling_mode == "two-way";
    const double dt_flow = cfg.exchange_interval * cfg.kinetic_dt;
    const long n_exchanges =
        std::max(1l, std::lround(cfg.T_final / dt_flow));

    CsvWriter diag(cfg.out_dir + "/diagnostics.csv",
                   {"time", "flow_energy", "flow_max_div", "stress_sup",
                    "stress_min_eig", "reflections"});
    std::vector<std::string> sh = {"time", "cell"};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            sh.push_back("K" + std::to_string(a) + std::to_string(b));
    CsvWriter stress_csv(cfg.out_dir + "/stress.csv", sh);
    CsvWriter vel_csv(cfg.out_dir + "/velocity.csv",
                      {"time", "i", "j", "u", "v", "p"});

    MacVelocity usampler(flow.field());
    long total_refl = 0;
    bool stress_ok = true;
    for (long ex = 0; ex < n_exchanges; ++ex) {
        for (int s = 0; s < cfg.exchange_interval; ++s) {
            StepStats st = step_kinetic(e, cfg.kinetic_dt, usampler, cfg.threads);
            total_refl += st.reflections;
        }
        StressField K = kramers_from_ensemble(e, fluid_grid);
        const double sup = K.sup_frobenius();
        const double mineig = K.min_eigenvalue();
        if (sup > bound * (1.0 + 1e-12) || mineig < -1e-12 * std::max(1.0, sup) ||
            K.max_asymmetry() > 1e-12 * std::max(1.0, sup))
            stress_ok = false;
        for (std::size_t c = 0; c < fluid_grid.cells(); ++c) {
            const double* t = K.tensor(c);
            stress_csv.row({e.time(), static_cast<double>(c), t[0], t[1], t[2], t[3]});
        }
        if (two_way) {
            const auto divK = stress_divergence(K);
            const FaceSource src = face_source_from_cells(fluid_grid, divK);
            flow.step(dt_flow, &src);
        }
        diag.row({e.time(), flow.field().energy(), flow.field().max_divergence(), sup,
                  mineig, static_cast<double>(total_refl)});
    }

    const MacField& f = flow.field();
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            const double uc = 0.5 * (f.u_at(i, j) + f.u_at(i + 1, j));
            const double vc = 0.5 * (f.v_at(i, j) + f.v_at(i, j + 1));
            vel_csv.row({f.time, static_cast<double>(i), static_cast<double>(j), uc,
                         vc, f.p_at(i, j)});
        }

    const bool div_ok = !two_way || f.max_divergence() <= fp.tol_div;
    json summary;
    summary["scenario"] = "coupled";
    summary["mode"] = cfg.coupling_mode;
    summary["exchanges"] = n_exchanges;
    summary["stress_bound"] = bound;
    summary["stress_ok"] = stress_ok;
    summary["flow_div_ok"] = div_ok;
    summary["reflections"] = total_refl;
    return finish(cfg, summary, stress_ok && div_ok);
}

}  // namespace

std::vector<SweepEntry> run_equilibration_sweep(const SimConfig& cfg) {
    if (cfg.eps_sweep.empty())
        throw ConfigError("equilibration sweep requires eps_sweep");

    // Macro reference: eta from the same (uniform) initial datum, u == 0.
    EtaSolver eta(cfg.chain.n_beads(), cfg.chain.d, cfg.domain, cfg.macro_n_r,
                  cfg.chain.beta);
    eta.set_uniform();
    {
        double dt = 0.9 * eta.stable_dt(nullptr);
        const long n = std::max(1l, std::lround(cfg.T_final / dt));
        dt = cfg.T_final / n;
        for (long s = 0; s < n; ++s) eta.step(dt, nullptr);
    }

    const double vmax_hist = 6.0 * std::sqrt(cfg.chain.beta);
    const int vbins = 40;
    const double snap_every = cfg.snapshot_every > 0.0 ? cfg.snapshot_every : 0.05;
    const RGrid mgrid = configuration_grid(cfg, cfg.moment_bins);

    std::vector<SweepEntry> out;
    for (double eps : cfg.eps_sweep) {
        SweepEntry entry;
        entry.eps = eps;
        double vel_acc = 0.0, dev_acc = 0.0;
        long metr_count = 0;
        std::vector<double> spatial(cfg.replicates, 0.0);

        for (int rep = 0; rep < cfg.replicates; ++rep) {
            ChainParams p = cfg.chain;
            p.eps = eps;
            Ensemble e(cfg.ensemble_n, p, cfg.domain, cfg.seed + 7919ull * rep);
            if (cfg.r_init == "gibbs")
                e.init_positions_gibbs();
            else
                e.init_positions_uniform();
            if (cfg.v_init == "zero")
                e.init_velocities_zero();
            else
                e.init_velocities_maxwellian();

            ZeroVelocity u(p.d);
            RunCallbacks cb;
            cb.on_snapshot = [&](double t, const Ensemble& en, const StepStats&) {
                if (t <= 0.0) return;
                const auto hist = velocity_component_histogram(en, vmax_hist, vbins);
                vel_acc += velocity_marginal_l1(hist, vmax_hist, p.beta);
                const MomentField a = empirical_moments(en, mgrid, 0, 2);
                const MomentField b = empirical_moments(en, mgrid, 1, 2);
                dev_acc += second_moment_deviation_debiased(a, b, p.beta);
                ++metr_count;
            };
            run_ensemble(e, cfg.T_final, cfg.kinetic_dt, u, true, snap_every, cb,
                         cfg.threads);
            const auto hist = configuration_histogram(e, eta.grid());
            std::vector<double> mass(hist.size());
            for (std::size_t c = 0; c < hist.size(); ++c)
                mass[c] = hist[c] * eta.grid().cell_volume();
            spatial[rep] = spatial_l1_distance(eta.grid(), mass, eta.eta());
        }
        entry.velocity_marginal_l1 = vel_acc / std::max(1l, metr_count);
        entry.second_moment_dev = dev_acc / std::max(1l, metr_count);
        double mean = 0.0;
        for (double s : spatial) mean += s;
        mean /= cfg.replicates;
        entry.spatial_l1_vs_eta = mean;
        if (cfg.replicates > 1) {
            double var = 0.0;
            for (double s : spatial) var += (s - mean) * (s - mean);
            var /= (cfg.replicates - 1);
            entry.spatial_l1_stderr = std::sqrt(var / cfg.replicates);
        }
        out.push_back(entry);
    }
    return out;
}

ScenarioResult run_scenario(const SimConfig& cfg) {
    cfg.validate();
    make_directories(cfg.out_dir);
    write_manifest(cfg, cfg.out_dir);

    if (cfg.scenario == "kinetic" || cfg.scenario == "overdamped")
        return run_particles(cfg);
    if (cfg.scenario == "fp") return run_fp(cfg);
    if (cfg.scenario == "macro") return run_macro(cfg);
    if (cfg.scenario == "coupled") return run_coupled(cfg);

    // sweep scenarios
    const std::vector<SweepEntry> sweep = run_equilibration_sweep(cfg);
    json summary;
    summary["scenario"] = cfg.scenario;
    summary["sweep"] = sweep_to_json(sweep);

    bool vel_decreasing = true, ratios_ok = true, spatial_ok = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (sweep[i].velocity_marginal_l1 >= sweep[i - 1].velocity_marginal_l1)
            vel_decreasing = false;
        const double ratio = sweep[i].second_moment_dev /
                             std::max(sweep[i - 1].second_moment_dev, 1e-300);
        if (ratio < 0.35 || ratio > 1.0) ratios_ok = false;
        const double band = 2.0 * std::sqrt(sweep[i].spatial_l1_stderr *
                                                sweep[i].spatial_l1_stderr +
                                            sweep[i - 1].spatial_l1_stderr *
                                                sweep[i - 1].spatial_l1_stderr);
        if (sweep[i].spatial_l1_vs_eta > sweep[i - 1].spatial_l1_vs_eta + band)
            spatial_ok = false;
    }
    summary["velocity_marginal_decreasing"] = vel_decreasing;
    summary["second_moment_ratios_in_band"] = ratios_ok;
    summary["spatial_l1_decreasing"] = spatial_ok;
    const bool pass = cfg.scenario == "compare-limit"
                          ? (vel_decreasing && ratios_ok && spatial_ok)
                          : (vel_decreasing && ratios_ok);
    return finish(cfg, summary, pass);
}

OseenVerification verify_oseen(const std::string& out_dir) {
    OseenVerification v;

    auto mms_error = [&](int n, long steps, double T, double& maxdiv) {
        FlowParams p;
        p.n = n;
        p.mu = 0.1;
        p.omega = ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}});
        OseenSolver solver(p);
        mms::init_field(solver.field());
        const double dt = T / steps;
        maxdiv = 0.0;
        for (long s = 0; s < steps; ++s) {
            const double t = solver.field().time;
            const FaceSource f = face_source_from_function(
                solver.field(),
                [&](double x, double y, double* out) {
                    mms::forcing(x, y, t, p.mu, out);
                },
                t);
            solver.step(dt, &f);
            maxdiv = std::max(maxdiv, solver.field().max_divergence());
        }
        return mms::velocity_error(solver.field(), solver.field().time);
    };

    double div32 = 0.0, div64 = 0.0;
    const double T = 0.25;
    v.err_coarse = mms_error(32, 400, T, div32);
    v.err_fine = mms_error(64, 1600, T, div64);
    v.rate = std::log2(v.err_coarse / v.err_fine);
    v.max_divergence = std::max(div32, div64);

    // zero-source energy decay with the vortex advecting field
    {
        FlowParams p;
        p.n = 32;
        p.mu = 0.05;
        p.omega = ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}});
        p.b_kind = FlowParams::FieldKind::vortex;
        p.u0_kind = FlowParams::FieldKind::vortex;
        OseenSolver solver(p);
        double prev = solver.field().energy();
        v.energy_monotone = true;
        for (int s = 0; s < 200; ++s) {
            solver.step(1e-3, nullptr);
            const double en = solver.field().energy();
            if (en > prev * (1.0 + 1e-14)) v.energy_monotone = false;
            prev = en;
        }
        v.max_divergence = std::max(v.max_divergence, solver.field().max_divergence());
    }

    // multilinear sampling reproduces a linear field exactly
    {
        MacField f;
        f.init(ConvexDomain::box({{-1.0, 1.0}, {-1.0, 1.0}}), 16);
        for (int i = 0; i <= f.n; ++i)
            for (int j = 0; j < f.n; ++j) f.u_at(i, j) = f.lo[1] + (j + 0.5) * f.h;
        for (int i = 0; i <= f.n; ++i) {
            f.u_wall_bot[i] = f.lo[1];
            f.u_wall_top[i] = f.hi[1];
        }
        CounterRng rng(1234, 0);
        double err = 0.0;
        for (int s = 0; s < 1000; ++s) {
            double x[2] = {2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0};
            double out[2];
            f.sample(x, out);
            err = std::max(err, std::fabs(out[0] - x[1]));
        }
        v.linear_reproduction_error = err;
    }

    v.pass = v.rate >= 1.8 && v.max_divergence <= 1e-10 && v.energy_monotone &&
             v.linear_reproduction_error <= 1e-12;

    json rep;
    rep["err_n32"] = v.err_coarse;
    rep["err_n64"] = v.err_fine;
    rep["rate"] = v.rate;
    rep["max_divergence"] = v.max_divergence;
    rep["energy_monotone"] = v.energy_monotone;
    rep["linear_reproduction_error"] = v.linear_reproduction_error;
    rep["pass"] = v.pass;
    make_directories(out_dir);
    write_text_file(out_dir + "/oseen_verification.json", rep.dump(2));
    return v;
}

IdentityVerification verify_identities(const std::string& out_dir) {
    IdentityVerification v;

    // Rouse structure: exact product and tridiagonal closed form, J <= 8.
    for (int J = 1; J <= 8; ++J) {
        const RouseStructure s = build_rouse(J);
        for (int i = 0; i < J; ++i)
            for (int j = 0; j < J; ++j) {
                const int expect = (i == j) ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
                v.incidence_product_error = std::max(
                    v.incidence_product_error,
                    static_cast<double>(std::abs(s.r_at(i, j) - expect)));
            }
        const auto closed = s.eigenvalues_closed_form();
        auto numeric = s.eigenvalues_numeric();
        std::vector<double> sorted_closed(closed);
        std::sort(sorted_closed.begin(), sorted_closed.end());
        for (int k = 0; k < J; ++k)
            v.eigenvalue_error = std::max(v.eigenvalue_error,
                                          std::fabs(numeric[k] - sorted_closed[k]));
    }

    // change-of-variables round trip
    {
        CounterRng rng(77, 0);
        const int J = 3, d = 2;
        std::vector<double> r((J + 1) * d), q(J * d), x(d), rr((J + 1) * d);
        for (int s = 0; s < 100000; ++s) {
            for (auto& c : r) c = 2.0 * rng.uniform() - 1.0;
            change_of_variables(r.data(), J, d, q.data(), x.data());
            assemble_positions(q.data(), x.data(), J, d, rr.data());
            for (int k = 0; k < (J + 1) * d; ++k)
                v.roundtrip_error =
                    std::max(v.roundtrip_error, std::fabs(rr[k] - r[k]));
        }
    }

    // Laplacian identity on random quadratics, J in {1,2,3}, d in {1,2}
    {
        CounterRng rng(99, 1);
        for (int J : {1, 2, 3}) {
            for (int d : {1, 2}) {
                const int dof = (J + 1) * d;
                std::vector<double> A(static_cast<std::size_t>(dof) * dof), b(dof);
                for (auto& a : A) a = 2.0 * rng.uniform() - 1.0;
                for (auto& c : b) c = 2.0 * rng.uniform() - 1.0;
                auto f = [&, dof](const double* r) {
                    double acc = 0.0;
                    for (int i = 0; i < dof; ++i) {
                        acc += b[i] * r[i];
                        for (int j = 0; j < dof; ++j)
                            acc += A[static_cast<std::size_t>(i) * dof + j] * r[i] * r[j];
                    }
                    return acc;
                };
                const double err = operator_identity_check(J, d, f, 20, 1e-4, 2024);
                v.identity_error = std::max(v.identity_error, err);
            }
        }
    }

    // q-integrated classical operator reduces to the centre-of-mass equation
    {
        const auto omega = ConvexDomain::box({{-1.0, 1.0}});
        const ClassicalGrid g = make_classical_grid(1, 1, omega, 16, 16, 1.0);
        std::vector<double> psi(g.cells());
        for (std::size_t cx = 0; cx < g.x.cells(); ++cx) {
            const double x = g.x.center(0, static_cast<int>(cx));
            for (std::size_t cq = 0; cq < g.q.cells(); ++cq) {
                const double q = g.q.center(0, static_cast<int>(cq));
                psi[g.flat(cx, cq)] =
                    (1.0 + 0.3 * std::sin(1.5 * x)) * std::exp(-0.4 * q * q) *
                    (1.0 + 0.1 * std::cos(0.7 * q));
            }
        }
        const double uconst = 0.35;
        auto ufn = [&](const double*, double* u) { u[0] = uconst; };
        auto gfn = [&](const double*, double* gr) { gr[0] = 0.0; };
        const auto rhs = classical_fp_rhs(g, psi, ufn, gfn);
        const auto rhs_bar = integrate_q(g, rhs);
        const auto psi_bar = integrate_q(g, psi);
        const int m = g.x.n[0];
        const double h = g.x.h[0];
        for (int i = 0; i < m; ++i) {
            const double pc = psi_bar[i];
            const double pp = (i + 1 < m) ? psi_bar[i + 1] : pc;
            const double pm = (i > 0) ? psi_bar[i - 1] : pc;
            const double expect = -uconst * (pp - pm) / (2.0 * h) +
                                  (g.beta / (g.J + 1)) * (pp - 2.0 * pc + pm) / (h * h);
            v.reduction_error =
                std::max(v.reduction_error, std::fabs(rhs_bar[i] - expect));
        }
    }

    v.pass = v.incidence_product_error == 0.0 && v.eigenvalue_error <= 1e-12 &&
             v.identity_error <= 1e-6 && v.reduction_error <= 1e-6 &&
             v.roundtrip_error <= 1e-14;

    json rep;
    rep["incidence_product_error"] = v.incidence_product_error;
    rep["eigenvalue_error"] = v.eigenvalue_error;
    rep["identity_error"] = v.identity_error;
    rep["reduction_error"] = v.reduction_error;
    rep["roundtrip_error"] = v.roundtrip_error;
    rep["pass"] = v.pass;
    make_directories(out_dir);
    write_text_file(out_dir + "/identities_verification.json", rep.dump(2));
    return v;
}

CompareReport compare_report(const std::vector<std::string>& dirs,
                             const std::string& out_path) {
    json rep;
    rep["runs"] = json::array();
    bool all_ok = true;

    struct Marginal {
        std::string dir;
        FieldContainer field;
    };
    std::vector<Marginal> marginals;

    for (const auto& dir : dirs) {
        for (const char* req : {"/manifest.json", "/summary.json"}) {
            if (!file_exists(dir + req))
                throw IoError("compare_report: missing file " + dir + req);
        }
        json summary = json::parse(read_text_file(dir + "/summary.json"));
        const bool ok = summary.value("assertions_passed", false);
        all_ok = all_ok && ok;
        json entry;
        entry["dir"] = dir;
        entry["assertions_passed"] = ok;
        rep["runs"].push_back(entry);
        const std::string marg = dir + "/spatial_marginal.mkvf";
        if (file_exists(marg)) marginals.push_back({dir, FieldContainer::read(marg)});
    }

    rep["marginal_distances"] = json::array();
    for (std::size_t a = 0; a < marginals.size(); ++a) {
        for (std::size_t b = a + 1; b < marginals.size(); ++b) {
            const auto& fa = marginals[a].field;
            const auto& fb = marginals[b].field;
            if (fa.dims != fb.dims) continue;
            double vol = 1.0;
            for (double s : fa.spacings) vol *= s;
            double dist = 0.0;
            for (std::size_t c = 0; c < fa.payload.size(); ++c)
                dist += std::fabs(fa.payload[c] - fb.payload[c]) * vol;
            json e;
            e["a"] = marginals[a].dir;
            e["b"] = marginals[b].dir;
            e["l1_distance"] = dist;
            rep["marginal_distances"].push_back(e);
        }
    }

    rep["pass"] = all_ok;
    CompareReport out;
    out.pass = all_ok;
    out.json = rep.dump(2);
    if (!out_path.empty()) write_text_file(out_path, out.json);
    return out;
}

}  // namespace mkv
