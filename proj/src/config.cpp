#include "mkv/config.hpp"

#include <set>

#include <json.hpp>

#include "mkv/io.hpp"

namespace mkv {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key: " + path + it.key());
    }
}

template <typename T>
void load(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

ConvexDomain parse_domain(const json& j) {
    check_keys(j, {"kind", "extents", "radius", "dim"}, "domain.");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "box") {
        if (!j.contains("extents"))
            throw ConfigError("domain: box requires extents");
        std::vector<std::array<double, 2>> ext;
        for (const auto& e : j.at("extents")) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("domain.extents entries must be [lo, hi]");
            ext.push_back({e[0].get<double>(), e[1].get<double>()});
        }
        return ConvexDomain::box(ext);
    }
    if (kind == "disk") {
        if (!j.contains("radius")) throw ConfigError("domain: disk requires radius");
        int dim = 2;
        load(j, "dim", dim);
        return ConvexDomain::disk(j.at("radius").get<double>(), dim);
    }
    throw ConfigError("domain.kind must be box or disk");
}

}  // namespace

SimConfig SimConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    SimConfig c;
    check_keys(j,
               {"scenario", "domain", "chain", "kinetic", "fp", "macro", "flow",
                "coupling", "eps_sweep", "replicates", "stress", "seed", "threads",
                "out_dir"},
               "");
    c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("domain")) c.domain = parse_domain(j.at("domain"));

    if (j.contains("chain")) {
        const json& ch = j.at("chain");
        check_keys(ch, {"J", "d", "eps", "beta", "H"}, "chain.");
        load(ch, "J", c.chain.J);
        load(ch, "d", c.chain.d);
        load(ch, "eps", c.chain.eps);
        load(ch, "beta", c.chain.beta);
        load(ch, "H", c.chain.H);
    }

    if (j.contains("kinetic")) {
        const json& k = j.at("kinetic");
        check_keys(k,
                   {"N", "dt", "T_final", "v_init", "r_init", "snapshot_every",
                    "moment_bins"},
                   "kinetic.");
        load(k, "N", c.ensemble_n);
        load(k, "dt", c.kinetic_dt);
        load(k, "T_final", c.T_final);
        load(k, "v_init", c.v_init);
        load(k, "r_init", c.r_init);
        load(k, "snapshot_every", c.snapshot_every);
        load(k, "moment_bins", c.moment_bins);
    }

    if (j.contains("fp")) {
        const json& f = j.at("fp");
        check_keys(f, {"n_r", "n_v", "v_max", "dt", "T_final", "alpha", "splitting",
                       "init"},
                   "fp.");
        load(f, "n_r", c.fp_n_r);
        load(f, "n_v", c.fp_n_v);
        load(f, "v_max", c.fp_v_max);
        load(f, "dt", c.fp_dt);
        load(f, "T_final", c.T_final);
        load(f, "alpha", c.fp_alpha);
        load(f, "splitting", c.fp_splitting);
        load(f, "init", c.fp_init);
    }

    if (j.contains("macro")) {
        const json& m = j.at("macro");
        check_keys(m, {"n_r", "dt", "T_final"}, "macro.");
        load(m, "n_r", c.macro_n_r);
        load(m, "dt", c.macro_dt);
        load(m, "T_final", c.T_final);
    }

    if (j.contains("flow")) {
        const json& f = j.at("flow");
        check_keys(f, {"mu", "grid_n", "dt", "b_kind", "b_amplitude", "u0_kind",
                       "u0_amplitude"},
                   "flow.");
        load(f, "mu", c.flow.mu);
        load(f, "grid_n", c.flow.n);
        load(f, "dt", c.flow_dt);
        if (f.contains("b_kind")) {
            const std::string b = f.at("b_kind").get<std::string>();
            if (b == "zero")
                c.flow.b_kind = FlowParams::FieldKind::zero;
            else if (b == "vortex")
                c.flow.b_kind = FlowParams::FieldKind::vortex;
            else
                throw ConfigError("flow.b_kind must be zero or vortex");
        }
        load(f, "b_amplitude", c.flow.b_amplitude);
        if (f.contains("u0_kind")) {
            const std::string u = f.at("u0_kind").get<std::string>();
            if (u == "zero")
                c.flow.u0_kind = FlowParams::FieldKind::zero;
            else if (u == "vortex")
                c.flow.u0_kind = FlowParams::FieldKind::vortex;
            else
                throw ConfigError("flow.u0_kind must be zero or vortex");
        }
        load(f, "u0_amplitude", c.flow.u0_amplitude);
    }

    if (j.contains("coupling")) {
        const json& cp = j.at("coupling");
        check_keys(cp, {"mode", "exchange_interval"}, "coupling.");
        load(cp, "mode", c.coupling_mode);
        load(cp, "exchange_interval", c.exchange_interval);
    }

    if (j.contains("eps_sweep"))
        c.eps_sweep = j.at("eps_sweep").get<std::vector<double>>();
    load(j, "replicates", c.replicates);
    if (j.contains("stress")) {
        const json& s = j.at("stress");
        check_keys(s, {"n_density"}, "stress.");
        load(s, "n_density", c.stress_density);
    }
    if (j.contains("seed")) {
        c.seed = j.at("seed").get<std::uint64_t>();
        c.seed_set = true;
    }
    load(j, "threads", c.threads);
    load(j, "out_dir", c.out_dir);

    c.validate();
    return c;
}

SimConfig SimConfig::from_file(const std::string& path) {
    return from_json_text(read_text_file(path));
}

std::string SimConfig::to_json_text() const {
    json j;
    j["scenario"] = scenario;
    if (domain.kind == ConvexDomain::Kind::box) {
        json ext = json::array();
        for (int k = 0; k < domain.dim; ++k)
            ext.push_back({domain.lo[k], domain.hi[k]});
        j["domain"] = {{"kind", "box"}, {"extents", ext}};
    } else {
        j["domain"] = {{"kind", "disk"}, {"radius", domain.radius},
                       {"dim", domain.dim}};
    }
    j["chain"] = {{"J", chain.J}, {"d", chain.d}, {"eps", chain.eps},
                  {"beta", chain.beta}, {"H", chain.H}};
    j["kinetic"] = {{"N", ensemble_n},
                    {"dt", kinetic_dt},
                    {"T_final", T_final},
                    {"v_init", v_init},
                    {"r_init", r_init},
                    {"snapshot_every", snapshot_every},
                    {"moment_bins", moment_bins}};
    j["fp"] = {{"n_r", fp_n_r},     {"n_v", fp_n_v},
               {"v_max", fp_v_max}, {"dt", fp_dt},
               {"alpha", fp_alpha}, {"splitting", fp_splitting},
               {"init", fp_init}};
    j["macro"] = {{"n_r", macro_n_r}, {"dt", macro_dt}};
    j["flow"] = {
        {"mu", flow.mu},
        {"grid_n", flow.n},
        {"dt", flow_dt},
        {"b_kind", flow.b_kind == FlowParams::FieldKind::zero ? "zero" : "vortex"},
        {"b_amplitude", flow.b_amplitude},
        {"u0_kind", flow.u0_kind == FlowParams::FieldKind::zero ? "zero" : "vortex"},
        {"u0_amplitude", flow.u0_amplitude}};
    j["coupling"] = {{"mode", coupling_mode}, {"exchange_interval", exchange_interval}};
    if (!eps_sweep.empty()) j["eps_sweep"] = eps_sweep;
    j["replicates"] = replicates;
    j["stress"] = {{"n_density", stress_density}};
    if (seed_set) j["seed"] = seed;
    j["threads"] = threads;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

bool SimConfig::is_stochastic() const {
    return scenario == "kinetic" || scenario == "overdamped" ||
           scenario == "coupled" || scenario == "kinetic-equilibration" ||
           scenario == "compare-limit";
}

void SimConfig::validate() const {
    static const std::set<std::string> scenarios = {
        "kinetic",  "overdamped", "fp", "macro", "coupled", "kinetic-equilibration",
        "compare-limit"};
    if (!scenarios.count(scenario))
        throw ConfigError("unknown scenario: " + scenario);
    chain.validate();
    if (domain.dim != chain.d) throw ConfigError("domain.dim must equal chain.d");
    if (is_stochastic() && !seed_set)
        throw ConfigError("stochastic scenarios require an explicit seed");
    if (ensemble_n < 1) throw ConfigError("kinetic.N must be positive");
    if (!(kinetic_dt > 0.0)) throw ConfigError("kinetic.dt must be positive");
    if (!(T_final > 0.0)) throw ConfigError("T_final must be positive");
    if (v_init != "maxwellian" && v_init != "zero")
        throw ConfigError("kinetic.v_init must be maxwellian or zero");
    if (r_init != "uniform" && r_init != "gibbs")
        throw ConfigError("kinetic.r_init must be uniform or gibbs");
    if (fp_splitting != "strang" && fp_splitting != "lie")
        throw ConfigError("fp.splitting must be strang or lie");
    if (fp_init != "gibbs" && fp_init != "uniform")
        throw ConfigError("fp.init must be gibbs or uniform");
    if (coupling_mode != "one-way" && coupling_mode != "two-way")
        throw ConfigError("coupling.mode must be one-way or two-way");
    if (exchange_interval < 1) throw ConfigError("coupling.exchange_interval >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (replicates < 1) throw ConfigError("replicates must be >= 1");
    for (double e : eps_sweep)
        if (!(e > 0.0)) throw ConfigError("eps_sweep entries must be positive");
    if (!(stress_density > 0.0)) throw ConfigError("stress.n_density must be positive");
}

}  // namespace mkv
