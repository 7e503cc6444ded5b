// runner.hpp — run orchestration: scenario runs, convergence studies, the
// wall-time scaling benchmark, CSV/manifest output and the self-test table
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sbd/config.hpp"
#include "sbd/model.hpp"
#include "sbd/propagator.hpp"
#include "sbd/spectral.hpp"
#include "sbd/stats.hpp"

namespace sbd::cli {

// Everything derived from a config up to (but not including) propagation:
// model, eigensystem, Davies decomposition, and eigenbasis representations
// of the coupling operator and initial state.
struct BuiltSystem {
    model::SpinOscillatorModel model;
    spectral::EigenSystem eig;
    spectral::BohrDecomposition decomp;
    Eigen::MatrixXcd x_eig;     // coupling operator in the eigenbasis
    Eigen::MatrixXcd rho0_eig;  // initial pure state in the eigenbasis
    std::size_t n_coupled = 0;  // reported operator count
};

BuiltSystem build_system(const ScenarioConfig& cfg);

// Seed of realization r's stream under the config's master seed.
std::uint64_t realization_seed(const ScenarioConfig& cfg, int realization);

// One stochastic realization under the configured mode (bundled/jk1/jk2).
// Jackknife modes evolve the half-sets of the same bundle draw and combine
// at the density-matrix level, so purities are exact.
propagator::Trajectory run_realization(const BuiltSystem& sys, const ScenarioConfig& cfg,
                                       int realization);

// Deterministic full-dissipator trajectory for the config.
propagator::Trajectory run_reference(const BuiltSystem& sys, const ScenarioConfig& cfg,
                                     bool record_rho = false);

struct RunSummary {
    std::string manifest_path;
    std::vector<std::string> outputs;
    double seconds = 0.0;
};

// Writes per-realization trajectory CSVs, the deterministic reference when
// requested, per-observable stats CSVs and a manifest JSON into
// cfg.output_dir.
RunSummary run_scenario(const ScenarioConfig& cfg);

// Max-RMSE table over (mode, M) pairs plus fitted M-scaling exponents.
struct ConvergenceRow {
    double spin;
    int bundles;
    Mode mode;
    std::string observable;
    double max_rmse;
    double t_at_max;
    double bias_at_max;
    double std_at_max;
};
struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<stats::ScalingFit> fits;  // keyed by fit_labels
    std::vector<std::string> fit_labels;  // "mode/observable"
    RunSummary summary;
};
ConvergenceResult run_convergence_study(const ScenarioConfig& cfg, const std::vector<int>& m_values,
                                        const std::vector<Mode>& modes);

// Wall-time-per-step scaling over spin sizes, full vs bundled(M).
struct ScalingRow {
    double spin;
    int dim;
    std::size_t n_coupled;
    Mode mode;
    double seconds_per_step;
};
struct ScalingResult {
    std::vector<ScalingRow> rows;
    stats::ScalingFit full_fit;
    stats::ScalingFit bundled_fit;
    std::vector<std::string> warnings;
    RunSummary summary;
};
ScalingResult run_scaling_benchmark(const ScenarioConfig& cfg, const std::vector<double>& spins,
                                    int bundles, int repeats = 3, int steps_per_repeat = 1);

// Analytic-identity self-tests; prints one pass/fail line each and returns
// the number of failures.
int run_validate(std::ostream& out);

// CSV writers (17 significant digits, fixed column order).
void write_trajectory_csv(const std::string& path, const propagator::Trajectory& traj);
void write_stats_csv(const std::string& path, const stats::EnsembleStats& stats);

}  // namespace sbd::cli
