// sbd — Lindblad dynamics with stochastically bundled dissipators.
// Subcommands: run, converge, scale, validate.
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbd/runner.hpp"

namespace {

using sbd::cli::Mode;
using sbd::cli::ScenarioConfig;

// Flags shared by the run-like subcommands. Values are applied on top of
// the config file (and its preset), so the precedence is
// defaults < preset < config file < command line.
struct CommonFlags {
    std::string config_path;
    std::string scenario;
    std::string mode;
    std::string rng_kind;
    std::string out_dir;
    std::uint64_t seed = 0;
    int realizations = -1;
    int bundles = -1;
    int threads = -1;
    double t_final = -1.0;
    bool with_reference = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "JSON config (or manifest) to start from");
        app->add_option("--scenario", scenario, "preset: cooling|heating|custom")
            ->check(CLI::IsMember({"cooling", "heating", "custom"}));
        app->add_option("--mode", mode, "dissipator mode: full|bundled|jk1|jk2")
            ->check(CLI::IsMember({"full", "bundled", "jk1", "jk2"}));
        app->add_option("--bundles", bundles, "bundled operator count M");
        app->add_option("--seed", seed, "master RNG seed");
        app->add_option("--realizations", realizations, "number of stochastic realizations");
        app->add_option("--rng", rng_kind, "random vector kind: unit_circle|rademacher")
            ->check(CLI::IsMember({"unit_circle", "rademacher"}));
        app->add_option("--t-final", t_final, "propagation length (a.u.)");
        app->add_option("--out", out_dir, "output directory");
        app->add_option("--threads", threads,
                        "worker threads across realizations (0 = hardware)");
        app->add_flag("--reference", with_reference,
                      "also compute the deterministic reference (stochastic modes)");
    }

    ScenarioConfig build() const {
        ScenarioConfig cfg;
        if (!config_path.empty()) cfg = sbd::cli::load_config(config_path);
        if (!scenario.empty()) sbd::cli::apply_preset(cfg, sbd::cli::scenario_from_string(scenario));
        if (!mode.empty()) cfg.mode = sbd::cli::mode_from_string(mode);
        if (bundles >= 0) cfg.bundles = bundles;
        if (seed != 0) cfg.master_seed = seed;
        if (realizations >= 0) cfg.realizations = realizations;
        if (!rng_kind.empty())
            cfg.rng_kind = sbd::dissipator::random_vector_kind_from_string(rng_kind);
        if (t_final >= 0.0) cfg.t_final = t_final;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (threads >= 0) cfg.threads = threads;
        if (with_reference) cfg.with_reference = true;
        return cfg;
    }
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stoi(item));
    return values;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(std::stod(item));
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lindblad master-equation dynamics with stochastically bundled dissipators"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand(
        "run", "propagate one scenario (deterministic or stochastic) and write CSVs");
    run_flags.attach(run_cmd);

    CommonFlags conv_flags;
    std::string conv_m = "4,8,16,32";
    std::string conv_modes = "bundled";
    auto* conv_cmd =
        app.add_subcommand("converge", "max-RMSE vs bundle count M over an ensemble");
    conv_flags.attach(conv_cmd);
    conv_cmd->add_option("--m-values", conv_m, "comma-separated bundle counts (default 4,8,16,32)");
    conv_cmd->add_option("--modes", conv_modes,
                         "comma-separated stochastic modes (default bundled)");

    CommonFlags scale_flags;
    std::string scale_spins = "0,0.5,1,1.5";
    int scale_repeats = 3;
    int scale_steps = 1;
    auto* scale_cmd = app.add_subcommand(
        "scale", "wall-time-per-step scaling of full vs bundled dissipators");
    scale_flags.attach(scale_cmd);
    scale_cmd->add_option("--spins", scale_spins, "comma-separated spins (default 0,0.5,1,1.5)");
    scale_cmd->add_option("--repeats", scale_repeats, "timing repeats per size (median taken)");
    scale_cmd->add_option("--steps", scale_steps, "RK4 steps per timing repeat");

    auto* validate_cmd =
        app.add_subcommand("validate", "run the analytic-identity self-test table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            const auto cfg = run_flags.build();
            const auto errors = sbd::cli::validate(cfg);
            if (!errors.empty()) {
                std::cerr << "configuration invalid:\n";
                for (const auto& e : errors) std::cerr << "  - " << e << "\n";
                return 2;
            }
            const auto summary = sbd::cli::run_scenario(cfg);
            std::cout << "wrote " << summary.outputs.size() << " file(s) to " << cfg.output_dir
                      << " (" << summary.seconds << " s); manifest: " << summary.manifest_path
                      << "\n";
        } else if (conv_cmd->parsed()) {
            auto cfg = conv_flags.build();
            if (cfg.mode == Mode::full) cfg.mode = Mode::bundled;
            std::vector<Mode> modes;
            {
                std::stringstream ss(conv_modes);
                std::string item;
                while (std::getline(ss, item, ','))
                    modes.push_back(sbd::cli::mode_from_string(item));
            }
            const auto errors = sbd::cli::validate(cfg);
            if (!errors.empty()) {
                std::cerr << "configuration invalid:\n";
                for (const auto& e : errors) std::cerr << "  - " << e << "\n";
                return 2;
            }
            const auto result =
                sbd::cli::run_convergence_study(cfg, parse_int_list(conv_m), modes);
            for (std::size_t i = 0; i < result.fits.size(); ++i)
                std::cout << result.fit_labels[i]
                          << ": max-RMSE ~ M^" << result.fits[i].exponent
                          << " (r^2 = " << result.fits[i].r_squared << ")\n";
            std::cout << "manifest: " << result.summary.manifest_path << "\n";
        } else if (scale_cmd->parsed()) {
            const auto cfg = scale_flags.build();
            const auto result = sbd::cli::run_scaling_benchmark(
                cfg, parse_double_list(scale_spins), cfg.bundles, scale_repeats, scale_steps);
            std::cout << "full:    t ~ N^" << result.full_fit.exponent
                      << " (r^2 = " << result.full_fit.r_squared << ")\n";
            std::cout << "bundled: t ~ N^" << result.bundled_fit.exponent
                      << " (r^2 = " << result.bundled_fit.r_squared << ")\n";
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "manifest: " << result.summary.manifest_path << "\n";
        } else if (validate_cmd->parsed()) {
            return sbd::cli::run_validate(std::cout) == 0 ? 0 : 1;
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
