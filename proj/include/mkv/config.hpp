#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mkv/chain.hpp"
#include "mkv/geometry.hpp"
#include "mkv/oseen.hpp"

namespace mkv {

// Parsed run configuration. The on-disk format is a JSON tree; unknown keys
// anywhere are errors, and stochastic scenarios require an explicit seed.
struct SimConfig {
    std::string scenario;  // kinetic | overdamped | fp | macro | coupled |
                           // kinetic-equilibration | compare-limit
    ConvexDomain domain = ConvexDomain::box({{-1.0, 1.0}});
    ChainParams chain;

    // particle runs
    std::size_t ensemble_n = 10000;
    double kinetic_dt = 1e-3;
    double T_final = 1.0;
    std::string v_init = "maxwellian";  // maxwellian | zero
    std::string r_init = "uniform";     // uniform | gibbs
    double snapshot_every = 0.0;
    int moment_bins = 12;

    // deterministic kinetic solver
    int fp_n_r = 24;
    int fp_n_v = 32;
    double fp_v_max = 6.0;
    double fp_dt = 0.0;  // 0: use the solver's stable bound
    double fp_alpha = 0.0;
    std::string fp_splitting = "strang";
    std::string fp_init = "gibbs";  // gibbs | uniform

    // macro solver
    int macro_n_r = 32;
    double macro_dt = 0.0;

    // flow solver
    FlowParams flow;
    double flow_dt = 1e-3;

    // coupling
    std::string coupling_mode = "one-way";  // one-way | two-way
    int exchange_interval = 10;

    // sweep scenarios
    std::vector<double> eps_sweep;
    int replicates = 1;

    double stress_density = 1.0;  // number density scale for the closure

    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 1;
    std::string out_dir = "out";

    static SimConfig from_json_text(const std::string& text);
    static SimConfig from_file(const std::string& path);
    std::string to_json_text() const;  // canonical echo for the manifest

    void validate() const;
    bool is_stochastic() const;
};

}  // namespace mkv
