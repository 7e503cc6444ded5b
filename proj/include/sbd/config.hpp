// config.hpp — scenario configuration, presets, JSON (de)serialization
// and validation
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbd/dissipator.hpp"

namespace sbd::cli {

enum class Scenario { cooling, heating, custom };
enum class Mode { full, bundled, jk1, jk2 };

const char* to_string(Scenario s);
const char* to_string(Mode m);
Scenario scenario_from_string(const std::string& name);
Mode mode_from_string(const std::string& name);

// Full description of one run. Field names mirror the benchmark parameter
// table (atomic units throughout). Presets fill the scenario-specific
// fields; any field can be overridden afterwards.
struct ScenarioConfig {
    Scenario scenario = Scenario::custom;

    // grid
    double x0 = -10.0;
    double dx = 1.0;
    int nx = 30;
    // Morse potential / mass
    double mass = 1.0;
    double v_inf = 4.0;
    double u_max = 6.0;
    double a = 0.2;
    // spin sector
    double spin = 0.0;
    double gap = 0.1;
    double alpha = 0.1225;
    // coupling function
    double gamma_star = 0.02;
    double omega_c = 1.4142135623730951;
    double kbt = 0.25;
    // initial state
    double xi = 3.4;
    // propagation
    double dt = 0.25;
    double record_every = 1.0;
    double t_final = 1000.0;
    // dissipator mode
    Mode mode = Mode::full;
    int bundles = 8;
    // ensemble
    int realizations = 1;
    dissipator::RandomVectorKind rng_kind = dissipator::RandomVectorKind::unit_circle;
    std::uint64_t master_seed = 1;
    // outputs
    bool with_reference = false;  // also run the deterministic reference (stochastic modes)
    bool store_rho = false;       // keep rho snapshots in memory during runs
    std::string output_dir = "out";
    // spectral knobs
    double bin_tol_rel = 1e-9;
    double element_drop_tol_rel = 1e-14;
    // realization-level parallelism (0 = hardware concurrency)
    int threads = 0;
};

// Scenario presets: cooling = hot spinless oscillator in a cold bath,
// heating = cold spin-1/2 oscillator in a hot bath.
void apply_preset(ScenarioConfig& cfg, Scenario scenario);

// All validation problems, as "field: message" strings; empty when valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

// Throws std::invalid_argument listing every offending field.
void validate_or_throw(const ScenarioConfig& cfg);

std::string to_json_string(const ScenarioConfig& cfg);
ScenarioConfig config_from_json_string(const std::string& text);

// Load from a config document, or from a run manifest (the manifest embeds
// the config under "config"), so any run can be rerun from its manifest.
ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace sbd::cli
