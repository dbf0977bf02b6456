#pragma once

#include <string>
#include <vector>

#include "mkv/config.hpp"

namespace mkv {

struct ScenarioResult {
    std::string dir;
    bool assertions_passed = true;
    std::string summary_json;
};

// Runs the configured scenario, writing the manifest, diagnostics, field
// dumps and summary into cfg.out_dir. Throws on configuration errors;
// records in-run assertion failures in the summary and the return value.
ScenarioResult run_scenario(const SimConfig& cfg);

// Direct verification drivers (shared by the CLI and the acceptance suite).
struct OseenVerification {
    double err_coarse = 0.0;   // manufactured-solution L2 error at n = 32
    double err_fine = 0.0;     // at n = 64
    double rate = 0.0;         // observed spatial order
    double max_divergence = 0.0;
    bool energy_monotone = true;
    double linear_reproduction_error = 0.0;
    bool pass = false;
};
OseenVerification verify_oseen(const std::string& out_dir);

struct IdentityVerification {
    double incidence_product_error = 0.0;  // |B^T B - R| over J <= 8
    double eigenvalue_error = 0.0;         // vs the closed form
    double identity_error = 0.0;           // Laplacian change-of-variables
    double reduction_error = 0.0;          // q-integrated classical operator
    double roundtrip_error = 0.0;          // change_of_variables inverse
    bool pass = false;
};
IdentityVerification verify_identities(const std::string& out_dir);

// Aggregates run directories: checks manifests, compares spatial marginals
// pairwise where grids match, and collects the per-run assertion flags.
struct CompareReport {
    bool pass = false;
    std::string json;
};
CompareReport compare_report(const std::vector<std::string>& dirs,
                             const std::string& out_path);

// Kinetic -> macro sweep metrics, one entry per eps (used by the
// kinetic-equilibration and compare-limit scenarios).
struct SweepEntry {
    double eps = 0.0;
    double velocity_marginal_l1 = 0.0;
    double second_moment_dev = 0.0;
    double spatial_l1_vs_eta = 0.0;
    double spatial_l1_stderr = 0.0;  // across replicates
};

std::vector<SweepEntry> run_equilibration_sweep(const SimConfig& cfg);

std::string git_describe();

}  // namespace mkv
