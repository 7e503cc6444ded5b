// Config JSON handling, presets and validation.
#include "sbd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace sbd::cli {

using nlohmann::json;

const char* to_string(Scenario s) {
    switch (s) {
        case Scenario::cooling: return "cooling";
        case Scenario::heating: return "heating";
        case Scenario::custom: return "custom";
    }
    return "unknown";
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::full: return "full";
        case Mode::bundled: return "bundled";
        case Mode::jk1: return "jk1";
        case Mode::jk2: return "jk2";
    }
    return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
    if (name == "cooling") return Scenario::cooling;
    if (name == "heating") return Scenario::heating;
    if (name == "custom") return Scenario::custom;
    throw std::invalid_argument("unknown scenario: " + name);
}

Mode mode_from_string(const std::string& name) {
    if (name == "full") return Mode::full;
    if (name == "bundled") return Mode::bundled;
    if (name == "jk1") return Mode::jk1;
    if (name == "jk2") return Mode::jk2;
    throw std::invalid_argument("unknown mode: " + name);
}

void apply_preset(ScenarioConfig& cfg, Scenario scenario) {
    cfg.scenario = scenario;
    switch (scenario) {
        case Scenario::cooling:
            cfg.spin = 0.0;
            cfg.xi = 3.4;
            cfg.kbt = 0.25;
            cfg.gamma_star = 0.02;
            cfg.dt = 0.25;
            cfg.t_final = 1000.0;
            break;
        case Scenario::heating:
            cfg.spin = 0.5;
            cfg.xi = 0.7;
            cfg.kbt = 1.0;
            cfg.gamma_star = 0.02;
            cfg.dt = 0.25;
            cfg.t_final = 2000.0;
            break;
        case Scenario::custom:
            break;
    }
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
    std::vector<std::string> errors;
    auto require = [&errors](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    require(cfg.dx > 0.0, "dx: must be positive");
    require(cfg.nx >= 0, "nx: must be non-negative");
    require(cfg.mass > 0.0, "mass: must be positive");
    require(cfg.v_inf > 0.0, "v_inf: must be positive");
    require(cfg.u_max > 0.0, "u_max: must be positive");
    require(cfg.a > 0.0, "a: must be positive");
    const double two_s = 2.0 * cfg.spin;
    require(cfg.spin >= 0.0 && std::abs(two_s - std::round(two_s)) <= 1e-12,
            "spin: must be a non-negative half-integer");
    require(cfg.gamma_star > 0.0, "gamma_star: must be positive");
    require(cfg.omega_c > 0.0, "omega_c: must be positive");
    require(cfg.kbt > 0.0, "kbt: must be positive");
    require(cfg.xi > 0.0, "xi: must be positive");
    require(cfg.dt > 0.0, "dt: must be positive");
    require(cfg.record_every > 0.0, "record_every: must be positive");
    require(cfg.t_final >= 0.0, "t_final: must be non-negative");
    if (cfg.dt > 0.0 && cfg.record_every > 0.0) {
        const double ratio = cfg.record_every / cfg.dt;
        require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio),
                "record_every: must be an integer multiple of dt");
    }
    if (cfg.mode != Mode::full) {
        require(cfg.bundles >= 1, "bundles: must be >= 1");
        if (cfg.mode == Mode::jk1 || cfg.mode == Mode::jk2)
            require(cfg.bundles >= 2 && cfg.bundles % 2 == 0,
                    "bundles: jackknife modes require an even bundle count");
    }
    require(cfg.realizations >= 1, "realizations: must be >= 1");
    if (cfg.mode != Mode::full && cfg.with_reference)
        require(cfg.realizations >= 2,
                "realizations: ensemble statistics need at least 2 realizations");
    require(cfg.bin_tol_rel > 0.0, "bin_tol_rel: must be positive");
    require(cfg.element_drop_tol_rel >= 0.0, "element_drop_tol_rel: must be non-negative");
    require(cfg.threads >= 0, "threads: must be non-negative");
    require(!cfg.output_dir.empty(), "output_dir: must not be empty");
    return errors;
}

void validate_or_throw(const ScenarioConfig& cfg) {
    const auto errors = validate(cfg);
    if (errors.empty()) return;
    std::ostringstream msg;
    msg << "invalid configuration (" << errors.size() << " problem(s)):";
    for (const auto& e : errors) msg << "\n  - " << e;
    throw std::invalid_argument(msg.str());
}

namespace {

json to_json(const ScenarioConfig& c) {
    return json{{"scenario", to_string(c.scenario)},
                {"x0", c.x0},
                {"dx", c.dx},
                {"nx", c.nx},
                {"mass", c.mass},
                {"v_inf", c.v_inf},
                {"u_max", c.u_max},
                {"a", c.a},
                {"spin", c.spin},
                {"gap", c.gap},
                {"alpha", c.alpha},
                {"gamma_star", c.gamma_star},
                {"omega_c", c.omega_c},
                {"kbt", c.kbt},
                {"xi", c.xi},
                {"dt", c.dt},
                {"record_every", c.record_every},
                {"t_final", c.t_final},
                {"mode", to_string(c.mode)},
                {"bundles", c.bundles},
                {"realizations", c.realizations},
                {"rng", json{{"kind", dissipator::to_string(c.rng_kind)},
                             {"master_seed", c.master_seed}}},
                {"with_reference", c.with_reference},
                {"store_rho", c.store_rho},
                {"output_dir", c.output_dir},
                {"bin_tol_rel", c.bin_tol_rel},
                {"element_drop_tol_rel", c.element_drop_tol_rel},
                {"threads", c.threads}};
}

ScenarioConfig from_json(const json& j) {
    ScenarioConfig c;
    // The preset, when named, is applied first; explicit keys then override.
    if (j.contains("scenario"))
        apply_preset(c, scenario_from_string(j.at("scenario").get<std::string>()));
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("x0", c.x0);
    get("dx", c.dx);
    get("nx", c.nx);
    get("mass", c.mass);
    get("v_inf", c.v_inf);
    get("u_max", c.u_max);
    get("a", c.a);
    get("spin", c.spin);
    get("gap", c.gap);
    get("alpha", c.alpha);
    get("gamma_star", c.gamma_star);
    get("omega_c", c.omega_c);
    get("kbt", c.kbt);
    get("xi", c.xi);
    get("dt", c.dt);
    get("record_every", c.record_every);
    get("t_final", c.t_final);
    if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
    get("bundles", c.bundles);
    get("realizations", c.realizations);
    if (j.contains("rng")) {
        const auto& r = j.at("rng");
        if (r.contains("kind"))
            c.rng_kind = dissipator::random_vector_kind_from_string(r.at("kind").get<std::string>());
        if (r.contains("master_seed")) c.master_seed = r.at("master_seed").get<std::uint64_t>();
    }
    get("with_reference", c.with_reference);
    get("store_rho", c.store_rho);
    get("output_dir", c.output_dir);
    get("bin_tol_rel", c.bin_tol_rel);
    get("element_drop_tol_rel", c.element_drop_tol_rel);
    get("threads", c.threads);
    return c;
}

}  // namespace

std::string to_json_string(const ScenarioConfig& cfg) { return to_json(cfg).dump(2); }

ScenarioConfig config_from_json_string(const std::string& text) {
    const json j = json::parse(text);
    // A manifest embeds its config under "config"; accept both documents.
    if (j.contains("config") && j.at("config").is_object()) return from_json(j.at("config"));
    return from_json(j);
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_string(buf.str());
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << to_json_string(cfg) << "\n";
}

}  // namespace sbd::cli
