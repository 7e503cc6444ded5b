// Run orchestration: builds systems, drives realizations (optionally in
// parallel), writes CSVs and manifests, and hosts the self-test table.
#include "sbd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "sbd/rng.hpp"

namespace sbd::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr const char* kSoftwareName = "sbd";
constexpr const char* kSoftwareVersion = "1.0.0";

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Run fn(0..n-1) on up to `threads` workers. Realizations own independent
// RNG streams, so scheduling order cannot affect results.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, std::max(1, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

std::string realization_filename(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "realization_%03d.csv", index);
    return buf;
}

json manifest_header(const ScenarioConfig& cfg, const BuiltSystem& sys) {
    return json{{"manifest_version", 1},
                {"software", json{{"name", kSoftwareName}, {"version", kSoftwareVersion}}},
                {"config", json::parse(to_json_string(cfg))},
                {"derived",
                 json{{"dim", sys.model.dim},
                      {"n_bins", sys.decomp.n_bohr()},
                      {"n_coupled", sys.n_coupled},
                      {"source_hash", sys.decomp.source_hash()}}}};
}

void write_manifest(const json& manifest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << manifest.dump(2) << "\n";
}

}  // namespace

void write_trajectory_csv(const std::string& path, const propagator::Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory CSV: " + path);
    out << "t,energy,position,purity\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        out << format17(traj.times[i]) << ',' << format17(traj.energy[i]) << ','
            << format17(traj.position[i]) << ',' << format17(traj.purity[i]) << '\n';
}

void write_stats_csv(const std::string& path, const stats::EnsembleStats& st) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write stats CSV: " + path);
    out << "t,rmse,bias,std\n";
    for (std::size_t i = 0; i < st.times.size(); ++i)
        out << format17(st.times[i]) << ',' << format17(st.rmse[i]) << ','
            << format17(st.bias[i]) << ',' << format17(st.std_dev[i]) << '\n';
}

BuiltSystem build_system(const ScenarioConfig& cfg) {
    validate_or_throw(cfg);
    BuiltSystem sys;
    const auto grid = model::build_grid(cfg.x0, cfg.dx, cfg.nx);
    const model::MorseParams morse{cfg.v_inf, cfg.a, cfg.u_max, cfg.mass};
    sys.model = model::build_model(grid, morse, cfg.spin, cfg.gap, cfg.alpha);
    sys.eig = spectral::eigendecompose(sys.model.hamiltonian);
    const spectral::CouplingParams coupling{cfg.gamma_star, cfg.omega_c, cfg.kbt};
    const spectral::BohrOptions opts{cfg.bin_tol_rel, cfg.element_drop_tol_rel};
    sys.decomp = spectral::davies_decomposition(sys.eig, sys.model.x_operator.cast<cplx>(),
                                                coupling, opts);
    sys.n_coupled = spectral::coupled_count(sys.decomp);
    sys.x_eig = sys.eig.kets.adjoint() * sys.model.x_operator.cast<cplx>() * sys.eig.kets;
    if (sys.decomp.values_real) sys.x_eig.imag().setZero();
    const Eigen::VectorXd w = model::initial_state_weights(sys.eig.energies, cfg.xi);
    sys.rho0_eig = (w * w.transpose()).cast<cplx>();
    return sys;
}

std::uint64_t realization_seed(const ScenarioConfig& cfg, int realization) {
    return rng::sub_seed(cfg.master_seed, static_cast<std::uint64_t>(realization));
}

propagator::Trajectory run_reference(const BuiltSystem& sys, const ScenarioConfig& cfg,
                                     bool record_rho) {
    dissipator::FullDissipator full(sys.decomp);
    propagator::PropagationConfig pcfg{cfg.dt, cfg.record_every, cfg.t_final, record_rho};
    return propagator::evolve(sys.rho0_eig, sys.eig.energies, &full, pcfg, sys.x_eig);
}

propagator::Trajectory run_realization(const BuiltSystem& sys, const ScenarioConfig& cfg,
                                       int realization) {
    const std::uint64_t seed = realization_seed(cfg, realization);
    const int m = cfg.bundles;
    const auto bundled =
        dissipator::BundledDissipator::build(sys.decomp, m, cfg.rng_kind, seed);
    const bool jackknife = cfg.mode == Mode::jk1 || cfg.mode == Mode::jk2;
    propagator::PropagationConfig pcfg{cfg.dt, cfg.record_every, cfg.t_final,
                                       cfg.store_rho || jackknife};
    auto full = propagator::evolve(sys.rho0_eig, sys.eig.energies, &bundled, pcfg, sys.x_eig);
    if (!jackknife) return full;

    const auto half_a = bundled.subrange(0, m / 2);
    auto traj_a = propagator::evolve(sys.rho0_eig, sys.eig.energies, &half_a, pcfg, sys.x_eig);
    propagator::Trajectory combined;
    if (cfg.mode == Mode::jk1) {
        combined = stats::jackknife1(full, traj_a, sys.eig.energies, sys.x_eig);
    } else {
        const auto half_b = bundled.subrange(m / 2, m);
        auto traj_b =
            propagator::evolve(sys.rho0_eig, sys.eig.energies, &half_b, pcfg, sys.x_eig);
        combined = stats::jackknife2(full, traj_a, traj_b, sys.eig.energies, sys.x_eig);
    }
    if (!cfg.store_rho) {
        combined.rho_series.clear();
        combined.rho_series.shrink_to_fit();
    }
    return combined;
}

RunSummary run_scenario(const ScenarioConfig& cfg) {
    const auto t0 = Clock::now();
    validate_or_throw(cfg);
    fs::create_directories(cfg.output_dir);
    const auto out_path = [&cfg](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    BuiltSystem sys = build_system(cfg);
    const double build_seconds = elapsed(t0);

    json manifest = manifest_header(cfg, sys);
    RunSummary summary;
    json timings{{"build_s", build_seconds}};

    if (cfg.mode == Mode::full) {
        const auto tref = Clock::now();
        const auto traj = run_reference(sys, cfg);
        timings["reference_s"] = elapsed(tref);
        write_trajectory_csv(out_path("reference.csv"), traj);
        summary.outputs.push_back("reference.csv");
        manifest["diagnostics"] = json{{"max_trace_dev", traj.max_trace_dev},
                                       {"max_herm_residual", traj.max_herm_residual}};
    } else {
        propagator::Trajectory reference;
        if (cfg.with_reference) {
            const auto tref = Clock::now();
            reference = run_reference(sys, cfg);
            timings["reference_s"] = elapsed(tref);
            write_trajectory_csv(out_path("reference.csv"), reference);
            summary.outputs.push_back("reference.csv");
        }

        const auto treal = Clock::now();
        std::vector<propagator::Trajectory> trajectories(cfg.realizations);
        parallel_for(cfg.realizations, cfg.threads,
                     [&](int r) { trajectories[r] = run_realization(sys, cfg, r); });
        timings["realizations_s"] = elapsed(treal);

        json seeds = json::array();
        for (int r = 0; r < cfg.realizations; ++r) {
            seeds.push_back(json{{"index", r},
                                 {"stream_seed", realization_seed(cfg, r)},
                                 {"kind", dissipator::to_string(cfg.rng_kind)}});
            const std::string name = realization_filename(r);
            write_trajectory_csv(out_path(name), trajectories[r]);
            summary.outputs.push_back(name);
        }
        manifest["realizations"] = std::move(seeds);

        if (cfg.with_reference && cfg.realizations >= 2) {
            auto collect = [&](auto member) {
                std::vector<std::vector<double>> seqs;
                seqs.reserve(trajectories.size());
                for (const auto& t : trajectories) seqs.push_back(t.*member);
                return seqs;
            };
            const struct {
                const char* name;
                std::vector<double> propagator::Trajectory::* member;
            } observables[] = {{"energy", &propagator::Trajectory::energy},
                               {"position", &propagator::Trajectory::position},
                               {"purity", &propagator::Trajectory::purity}};
            for (const auto& obs : observables) {
                const auto st = stats::ensemble_stats(collect(obs.member),
                                                      reference.*(obs.member), reference.times,
                                                      obs.name);
                const std::string name = std::string("stats_") + obs.name + ".csv";
                write_stats_csv(out_path(name), st);
                summary.outputs.push_back(name);
            }
        }
    }

    timings["total_s"] = elapsed(t0);
    manifest["timings"] = std::move(timings);
    manifest["outputs"] = summary.outputs;
    summary.manifest_path = out_path("manifest.json");
    write_manifest(manifest, summary.manifest_path);
    summary.seconds = elapsed(t0);
    return summary;
}

ConvergenceResult run_convergence_study(const ScenarioConfig& cfg,
                                        const std::vector<int>& m_values,
                                        const std::vector<Mode>& modes) {
    const auto t0 = Clock::now();
    if (m_values.empty()) throw std::invalid_argument("convergence study: no bundle counts given");
    if (modes.empty()) throw std::invalid_argument("convergence study: no modes given");
    for (Mode mode : modes) {
        if (mode == Mode::full)
            throw std::invalid_argument("convergence study: modes must be stochastic");
        ScenarioConfig probe = cfg;
        probe.mode = mode;
        for (int m : m_values) {
            probe.bundles = m;
            validate_or_throw(probe);
        }
    }
    if (cfg.realizations < 2)
        throw std::invalid_argument("convergence study: need at least 2 realizations");

    fs::create_directories(cfg.output_dir);
    const auto out_path = [&cfg](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    BuiltSystem sys = build_system(cfg);
    const auto reference = run_reference(sys, cfg);

    ConvergenceResult result;
    for (Mode mode : modes) {
        for (int m : m_values) {
            ScenarioConfig run_cfg = cfg;
            run_cfg.mode = mode;
            run_cfg.bundles = m;
            std::vector<propagator::Trajectory> trajectories(cfg.realizations);
            parallel_for(cfg.realizations, cfg.threads,
                         [&](int r) { trajectories[r] = run_realization(sys, run_cfg, r); });
            const struct {
                const char* name;
                std::vector<double> propagator::Trajectory::* member;
            } observables[] = {{"energy", &propagator::Trajectory::energy},
                               {"position", &propagator::Trajectory::position}};
            for (const auto& obs : observables) {
                std::vector<std::vector<double>> seqs;
                seqs.reserve(trajectories.size());
                for (const auto& t : trajectories) seqs.push_back(t.*(obs.member));
                const auto st =
                    stats::ensemble_stats(seqs, reference.*(obs.member), reference.times,
                                          obs.name);
                const auto [value, at] = stats::max_rmse(st);
                const auto it = std::find(st.times.begin(), st.times.end(), at);
                const std::size_t idx = it - st.times.begin();
                result.rows.push_back({cfg.spin, m, mode, obs.name, value, at, st.bias[idx],
                                       st.std_dev[idx]});
            }
        }
    }

    // M-scaling exponents per (mode, observable), when enough sizes exist.
    if (m_values.size() >= 3) {
        for (Mode mode : modes) {
            for (const char* obs : {"energy", "position"}) {
                std::vector<double> sizes, values;
                for (const auto& row : result.rows)
                    if (row.mode == mode && row.observable == obs) {
                        sizes.push_back(row.bundles);
                        values.push_back(row.max_rmse);
                    }
                result.fits.push_back(stats::fit_power_law(sizes, values));
                result.fit_labels.push_back(std::string(to_string(mode)) + "/" + obs);
            }
        }
    }

    {
        std::ofstream out(out_path("convergence.csv"));
        out << "s,M,mode,observable,max_rmse,t_at_max,bias_at_max,std_at_max\n";
        for (const auto& row : result.rows)
            out << format17(row.spin) << ',' << row.bundles << ',' << to_string(row.mode) << ','
                << row.observable << ',' << format17(row.max_rmse) << ','
                << format17(row.t_at_max) << ',' << format17(row.bias_at_max) << ','
                << format17(row.std_at_max) << '\n';
        result.summary.outputs.push_back("convergence.csv");
    }
    if (!result.fits.empty()) {
        std::ofstream out(out_path("convergence_fits.csv"));
        out << "mode,observable,exponent,prefactor,r_squared\n";
        for (std::size_t i = 0; i < result.fits.size(); ++i) {
            const auto slash = result.fit_labels[i].find('/');
            out << result.fit_labels[i].substr(0, slash) << ','
                << result.fit_labels[i].substr(slash + 1) << ','
                << format17(result.fits[i].exponent) << ',' << format17(result.fits[i].prefactor)
                << ',' << format17(result.fits[i].r_squared) << '\n';
        }
        result.summary.outputs.push_back("convergence_fits.csv");
    }

    json manifest = manifest_header(cfg, sys);
    manifest["study"] = json{{"kind", "convergence"},
                             {"m_values", m_values},
                             {"modes", [&modes] {
                                  json arr = json::array();
                                  for (Mode m : modes) arr.push_back(to_string(m));
                                  return arr;
                              }()}};
    manifest["timings"] = json{{"total_s", elapsed(t0)}};
    manifest["outputs"] = result.summary.outputs;
    result.summary.manifest_path = out_path("manifest.json");
    write_manifest(manifest, result.summary.manifest_path);
    result.summary.seconds = elapsed(t0);
    return result;
}

ScalingResult run_scaling_benchmark(const ScenarioConfig& cfg, const std::vector<double>& spins,
                                    int bundles, int repeats, int steps_per_repeat) {
    const auto t0 = Clock::now();
    if (spins.size() < 3)
        throw std::invalid_argument("scaling benchmark: need at least 3 spin values");
    for (std::size_t i = 1; i < spins.size(); ++i)
        if (!(spins[i] > spins[i - 1]))
            throw std::invalid_argument("scaling benchmark: spins must be strictly increasing");
    if (repeats < 3) throw std::invalid_argument("scaling benchmark: need at least 3 repeats");
    if (steps_per_repeat < 1)
        throw std::invalid_argument("scaling benchmark: steps_per_repeat must be >= 1");

    fs::create_directories(cfg.output_dir);
    const auto out_path = [&cfg](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    ScalingResult result;
    std::vector<double> dims, full_times, bundled_times;

    for (double s : spins) {
        ScenarioConfig size_cfg = cfg;
        size_cfg.spin = s;
        BuiltSystem sys = build_system(size_cfg);

        auto time_mode = [&](const dissipator::Dissipator& diss) {
            // Times the production stepping path (interaction picture).
            const propagator::RotatingFrameRhs rhs(sys.eig.energies, &diss);
            Eigen::MatrixXcd rho = sys.rho0_eig;
            long step = 0;
            // Warm-up repeat, discarded.
            for (int k = 0; k < steps_per_repeat; ++k, ++step)
                rho = propagator::rk4_step(rho, rhs, cfg.dt, step + 1, nullptr, step * cfg.dt);
            std::vector<double> samples(repeats);
            for (int rep = 0; rep < repeats; ++rep) {
                const auto tr = Clock::now();
                for (int k = 0; k < steps_per_repeat; ++k, ++step)
                    rho = propagator::rk4_step(rho, rhs, cfg.dt, step + 1, nullptr,
                                               step * cfg.dt);
                samples[rep] = elapsed(tr) / steps_per_repeat;
            }
            std::sort(samples.begin(), samples.end());
            const double median = samples[samples.size() / 2];
            if ((samples.back() - samples.front()) > 0.5 * median)
                result.warnings.push_back("timing spread above 50% of median at N = " +
                                          std::to_string(sys.model.dim) + " (" +
                                          std::to_string(samples.front()) + " .. " +
                                          std::to_string(samples.back()) + " s/step)");
            return median;
        };

        double full_time, bundled_time;
        {
            dissipator::FullDissipator full(sys.decomp);
            full_time = time_mode(full);
        }
        {
            const auto bundled = dissipator::BundledDissipator::build(
                sys.decomp, bundles, cfg.rng_kind, realization_seed(size_cfg, 0));
            bundled_time = time_mode(bundled);
        }

        dims.push_back(sys.model.dim);
        full_times.push_back(full_time);
        bundled_times.push_back(bundled_time);
        result.rows.push_back({s, sys.model.dim, sys.n_coupled, Mode::full, full_time});
        result.rows.push_back({s, sys.model.dim, sys.n_coupled, Mode::bundled, bundled_time});
    }

    result.full_fit = stats::fit_power_law(dims, full_times);
    result.bundled_fit = stats::fit_power_law(dims, bundled_times);

    {
        std::ofstream out(out_path("scaling.csv"));
        out << "N,N_B,mode,seconds_per_step\n";
        for (const auto& row : result.rows)
            out << row.dim << ',' << row.n_coupled << ',' << to_string(row.mode) << ','
                << format17(row.seconds_per_step) << '\n';
        result.summary.outputs.push_back("scaling.csv");
    }

    json manifest{{"manifest_version", 1},
                  {"software", json{{"name", kSoftwareName}, {"version", kSoftwareVersion}}},
                  {"config", json::parse(to_json_string(cfg))},
                  {"study", json{{"kind", "scaling"},
                                 {"spins", spins},
                                 {"bundles", bundles},
                                 {"repeats", repeats},
                                 {"steps_per_repeat", steps_per_repeat}}},
                  {"fits", json{{"full", json{{"exponent", result.full_fit.exponent},
                                              {"prefactor", result.full_fit.prefactor},
                                              {"r_squared", result.full_fit.r_squared}}},
                                {"bundled", json{{"exponent", result.bundled_fit.exponent},
                                                 {"prefactor", result.bundled_fit.prefactor},
                                                 {"r_squared", result.bundled_fit.r_squared}}}}},
                  {"warnings", result.warnings},
                  {"timings", json{{"total_s", elapsed(t0)}}},
                  {"outputs", result.summary.outputs}};
    result.summary.manifest_path = out_path("manifest.json");
    write_manifest(manifest, result.summary.manifest_path);
    result.summary.seconds = elapsed(t0);
    return result;
}

}  // namespace sbd::cli
