#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sbd/runner.hpp"

using namespace sbd;
using namespace sbd::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sbd_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Small, fast custom system: 11 grid points, short propagation.
ScenarioConfig tiny_config(const fs::path& out) {
    ScenarioConfig cfg;
    cfg.scenario = Scenario::custom;
    cfg.nx = 10;
    cfg.x0 = -4.0;
    cfg.t_final = 4.0;
    cfg.dt = 0.25;
    cfg.record_every = 1.0;
    cfg.xi = 1.5;
    cfg.output_dir = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("presets pin the scenario parameters") {
    ScenarioConfig cfg;
    apply_preset(cfg, Scenario::cooling);
    CHECK(cfg.spin == 0.0);
    CHECK(cfg.xi == 3.4);
    CHECK(cfg.kbt == 0.25);
    CHECK(cfg.gamma_star == 0.02);
    CHECK(cfg.dt == 0.25);

    apply_preset(cfg, Scenario::heating);
    CHECK(cfg.spin == 0.5);
    CHECK(cfg.xi == 0.7);
    CHECK(cfg.kbt == 1.0);
}

TEST_CASE("config JSON round trip and preset override order") {
    ScenarioConfig cfg;
    apply_preset(cfg, Scenario::heating);
    cfg.bundles = 12;
    cfg.master_seed = 987;
    cfg.rng_kind = dissipator::RandomVectorKind::rademacher;
    const auto text = to_json_string(cfg);
    const auto back = config_from_json_string(text);
    CHECK(back.scenario == Scenario::heating);
    CHECK(back.spin == 0.5);
    CHECK(back.bundles == 12);
    CHECK(back.master_seed == 987);
    CHECK(back.rng_kind == dissipator::RandomVectorKind::rademacher);

    // explicit keys override the named preset
    const auto overridden = config_from_json_string(R"({"scenario":"cooling","xi":2.0})");
    CHECK(overridden.kbt == 0.25);
    CHECK(overridden.xi == 2.0);
}

TEST_CASE("validation lists offending fields") {
    ScenarioConfig cfg;
    cfg.mode = Mode::jk1;
    cfg.bundles = 7;  // jackknife needs even M
    cfg.dx = -1.0;
    const auto errors = validate(cfg);
    REQUIRE(!errors.empty());
    auto mentions = [&errors](const std::string& field) {
        return std::any_of(errors.begin(), errors.end(), [&field](const std::string& e) {
            return e.find(field) == 0;
        });
    };
    CHECK(mentions("bundles"));
    CHECK(mentions("dx"));

    cfg.bundles = 8;
    cfg.dx = 1.0;
    CHECK(validate(cfg).empty());

    cfg.mode = Mode::bundled;
    cfg.with_reference = true;
    cfg.realizations = 1;  // stats need at least 2
    CHECK(!validate(cfg).empty());
}

TEST_CASE("trajectory CSV golden format") {
    propagator::Trajectory traj;
    traj.times = {0.0, 1.0};
    traj.energy = {1.5, 0.125};
    traj.position = {4.0, 1.0 / 3.0};
    traj.purity = {1.0, 0.25};
    const auto dir = fresh_dir("golden");
    const auto path = dir / "traj.csv";
    write_trajectory_csv(path.string(), traj);
    CHECK(slurp(path) ==
          "t,energy,position,purity\n"
          "0,1.5,4,1\n"
          "1,0.125,0.33333333333333331,0.25\n");
}

TEST_CASE("stats CSV golden format") {
    stats::EnsembleStats st;
    st.times = {0.0};
    st.rmse = {0.5};
    st.bias = {-0.25};
    st.std_dev = {0.125};
    const auto dir = fresh_dir("golden_stats");
    const auto path = dir / "stats.csv";
    write_stats_csv(path.string(), st);
    CHECK(slurp(path) == "t,rmse,bias,std\n0,0.5,-0.25,0.125\n");
}

TEST_CASE("full-mode run writes the reference and manifest") {
    const auto dir = fresh_dir("run_full");
    auto cfg = tiny_config(dir);
    cfg.mode = Mode::full;
    const auto summary = run_scenario(cfg);
    CHECK(fs::exists(dir / "reference.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    const auto ref = slurp(dir / "reference.csv");
    CHECK(ref.rfind("t,energy,position,purity\n", 0) == 0);
    // header + 5 records (t = 0..4)
    CHECK(std::count(ref.begin(), ref.end(), '\n') == 6);
    const auto manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"dim\": 11") != std::string::npos);
    CHECK(manifest.find("\"n_coupled\"") != std::string::npos);
}

TEST_CASE("stochastic runs are reproducible byte for byte") {
    const auto dir_a = fresh_dir("run_a");
    const auto dir_b = fresh_dir("run_b");
    auto cfg = tiny_config(dir_a);
    cfg.mode = Mode::bundled;
    cfg.bundles = 4;
    cfg.realizations = 2;
    cfg.with_reference = true;
    cfg.master_seed = 4242;
    run_scenario(cfg);
    cfg.output_dir = dir_b.string();
    run_scenario(cfg);
    for (const char* name :
         {"reference.csv", "realization_000.csv", "realization_001.csv", "stats_energy.csv",
          "stats_position.csv", "stats_purity.csv"}) {
        CAPTURE(name);
        CHECK(slurp(dir_a / name) == slurp(dir_b / name));
    }

    SUBCASE("rerunning from the manifest reproduces the same bytes") {
        const auto dir_c = fresh_dir("run_c");
        auto from_manifest = load_config((dir_a / "manifest.json").string());
        from_manifest.output_dir = dir_c.string();
        run_scenario(from_manifest);
        CHECK(slurp(dir_a / "realization_001.csv") == slurp(dir_c / "realization_001.csv"));
    }
    SUBCASE("different seed changes the realizations") {
        const auto dir_d = fresh_dir("run_d");
        cfg.output_dir = dir_d.string();
        cfg.master_seed = 77;
        run_scenario(cfg);
        CHECK(slurp(dir_a / "realization_000.csv") != slurp(dir_d / "realization_000.csv"));
        CHECK(slurp(dir_a / "reference.csv") == slurp(dir_d / "reference.csv"));
    }
}

TEST_CASE("jackknife modes run end to end") {
    const auto dir = fresh_dir("run_jk");
    auto cfg = tiny_config(dir);
    cfg.mode = Mode::jk2;
    cfg.bundles = 4;
    cfg.realizations = 2;
    cfg.with_reference = true;
    const auto summary = run_scenario(cfg);
    CHECK(fs::exists(dir / "stats_purity.csv"));
    // jackknifed trajectories exist and parse as numbers
    const auto body = slurp(dir / "realization_000.csv");
    CHECK(body.find("nan") == std::string::npos);
    CHECK(body.find("inf") == std::string::npos);
}

TEST_CASE("convergence study emits the keyed table and fits") {
    const auto dir = fresh_dir("converge");
    auto cfg = tiny_config(dir);
    cfg.mode = Mode::bundled;
    cfg.realizations = 4;
    const auto result = run_convergence_study(cfg, {2, 4, 8}, {Mode::bundled});
    CHECK(result.rows.size() == 6);  // 3 M values x 2 observables
    CHECK(fs::exists(dir / "convergence.csv"));
    CHECK(fs::exists(dir / "convergence_fits.csv"));
    REQUIRE(result.fits.size() == 2);
    for (const auto& fit : result.fits) CHECK(std::isfinite(fit.exponent));
    const auto table = slurp(dir / "convergence.csv");
    CHECK(table.rfind("s,M,mode,observable,max_rmse,t_at_max,bias_at_max,std_at_max\n", 0) == 0);

    SUBCASE("full mode and odd jackknife sizes are rejected") {
        CHECK_THROWS_AS(run_convergence_study(cfg, {2, 4}, {Mode::full}), std::invalid_argument);
        CHECK_THROWS_AS(run_convergence_study(cfg, {3}, {Mode::jk1}), std::invalid_argument);
    }
}

TEST_CASE("scaling benchmark fits both modes") {
    const auto dir = fresh_dir("scale");
    auto cfg = tiny_config(dir);
    const auto result = run_scaling_benchmark(cfg, {0.0, 0.5, 1.0}, 4, 3, 1);
    CHECK(result.rows.size() == 6);
    CHECK(std::isfinite(result.full_fit.exponent));
    CHECK(std::isfinite(result.bundled_fit.exponent));
    CHECK(fs::exists(dir / "scaling.csv"));
    const auto table = slurp(dir / "scaling.csv");
    CHECK(table.rfind("N,N_B,mode,seconds_per_step\n", 0) == 0);
    CHECK_THROWS_AS(run_scaling_benchmark(cfg, {0.0, 0.5}, 4, 3, 1), std::invalid_argument);
}

TEST_CASE("validate self-test table passes") {
    std::ostringstream out;
    CHECK(run_validate(out) == 0);
    CHECK(out.str().find("FAIL") == std::string::npos);
}
