#include "bvcsim/config.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace bvcsim {

using nlohmann::json;

double RunConfig::env_tilt_deg(int env) {
    switch (env) {
        case 1: return 0.0;
        case 2: return 30.0;
        case 3: return 45.0;
        case 4: return 60.0;
    }
    throw ConfigError("env must be 1..4, got " + std::to_string(env));
}

RunConfig RunConfig::make(ModelName model, int env) {
    RunConfig c;
    c.model = model;
    c.env = env;
    c.model_config = ModelConfig::preset(model);
    c.environment.tilt_deg = env_tilt_deg(env);
    return c;
}

void RunConfig::validate() const {
    try {
        env_tilt_deg(env);
        environment.validate();
        model_config.validate();
        pcn.validate();
        walk.validate();
        if (n_p <= 0) throw std::invalid_argument("n_p must be positive");
        if (hex.nx <= 0 || hex.ny <= 0) throw std::invalid_argument("hex nx/ny must be positive");
        if (!(aliasing.d_th > 0.0)) throw std::invalid_argument("aliasing d_th must be positive");
        if (threads < 0) throw std::invalid_argument("threads must be >= 0");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

namespace {

json to_json(const RunConfig& c) {
    return json{
        {"model", model_name_str(c.model)},
        {"env", c.env},
        {"environment",
         {{"arena_side", c.environment.arena_side},
          {"wall_height", c.environment.wall_height},
          {"central_wall_length", c.environment.central_wall_length},
          {"tilt_deg", c.environment.tilt_deg},
          {"include_floor_in_scans", c.environment.include_floor_in_scans}}},
        {"model_config",
         {{"horizontal_directions", c.model_config.horizontal_directions},
          {"vertical_angles", c.model_config.vertical_angles},
          {"bvcs_per_axis", c.model_config.bvcs_per_axis},
          {"d_max", c.model_config.d_max},
          {"sigma_r", c.model_config.sigma_r},
          {"sigma_theta", c.model_config.sigma_theta},
          {"sigma_phi", c.model_config.sigma_phi}}},
        {"pcn",
         {{"tau_p", c.pcn.tau_p},
          {"gamma_pb", c.pcn.gamma_pb},
          {"gamma_pp", c.pcn.gamma_pp},
          {"psi_gain", c.pcn.psi_gain},
          {"tau_wpb", c.pcn.tau_wpb},
          {"alpha_pb", c.pcn.alpha_pb},
          {"dt", c.pcn.dt},
          {"substeps_per_update", c.pcn.substeps_per_update},
          {"w0", c.pcn.w0},
          {"c0", c.pcn.c0}}},
        {"walk",
         {{"tau_w", c.walk.tau_w},
          {"speed", c.walk.speed},
          {"turn_sigma", c.walk.turn_sigma},
          {"body_radius", c.walk.body_radius},
          {"exploration_steps", c.walk.exploration_steps},
          {"sampling_steps", c.walk.sampling_steps}}},
        {"n_p", c.n_p},
        {"hex", {{"nx", c.hex.nx}, {"ny", c.hex.ny}}},
        {"aliasing", {{"d_th", c.aliasing.d_th}}},
        {"seed", c.seed},
    };
}

// Applies present keys only; rejects unknown keys so typos do not pass silently.
template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ConfigError("unknown config key '" + key + "' in " + where);
    }
}

void apply_json(RunConfig& c, const json& j) {
    check_keys(j,
               {"model", "env", "environment", "model_config", "pcn", "walk", "n_p",
                "hex", "aliasing", "seed", "out_dir", "threads"},
               "config root");
    if (j.contains("model")) {
        c.model = model_name_from_str(j.at("model").get<std::string>());
        c.model_config = ModelConfig::preset(c.model);
    }
    if (j.contains("env")) {
        c.env = j.at("env").get<int>();
        c.environment.tilt_deg = RunConfig::env_tilt_deg(c.env);
    }
    if (j.contains("environment")) {
        const json& e = j.at("environment");
        check_keys(e,
                   {"arena_side", "wall_height", "central_wall_length", "tilt_deg",
                    "include_floor_in_scans"},
                   "environment");
        get_if_present(e, "arena_side", c.environment.arena_side);
        get_if_present(e, "wall_height", c.environment.wall_height);
        get_if_present(e, "central_wall_length", c.environment.central_wall_length);
        get_if_present(e, "tilt_deg", c.environment.tilt_deg);
        get_if_present(e, "include_floor_in_scans", c.environment.include_floor_in_scans);
    }
    if (j.contains("model_config")) {
        const json& m = j.at("model_config");
        check_keys(m,
                   {"horizontal_directions", "vertical_angles", "bvcs_per_axis", "d_max",
                    "sigma_r", "sigma_theta", "sigma_phi"},
                   "model_config");
        get_if_present(m, "horizontal_directions", c.model_config.horizontal_directions);
        get_if_present(m, "vertical_angles", c.model_config.vertical_angles);
        get_if_present(m, "bvcs_per_axis", c.model_config.bvcs_per_axis);
        get_if_present(m, "d_max", c.model_config.d_max);
        get_if_present(m, "sigma_r", c.model_config.sigma_r);
        get_if_present(m, "sigma_theta", c.model_config.sigma_theta);
        get_if_present(m, "sigma_phi", c.model_config.sigma_phi);
    }
    if (j.contains("pcn")) {
        const json& p = j.at("pcn");
        check_keys(p,
                   {"tau_p", "gamma_pb", "gamma_pp", "psi_gain", "tau_wpb", "alpha_pb",
                    "dt", "substeps_per_update", "w0", "c0"},
                   "pcn");
        get_if_present(p, "tau_p", c.pcn.tau_p);
        get_if_present(p, "gamma_pb", c.pcn.gamma_pb);
        get_if_present(p, "gamma_pp", c.pcn.gamma_pp);
        get_if_present(p, "psi_gain", c.pcn.psi_gain);
        get_if_present(p, "tau_wpb", c.pcn.tau_wpb);
        get_if_present(p, "alpha_pb", c.pcn.alpha_pb);
        get_if_present(p, "dt", c.pcn.dt);
        get_if_present(p, "substeps_per_update", c.pcn.substeps_per_update);
        get_if_present(p, "w0", c.pcn.w0);
        get_if_present(p, "c0", c.pcn.c0);
    }
    if (j.contains("walk")) {
        const json& w = j.at("walk");
        check_keys(w,
                   {"tau_w", "speed", "turn_sigma", "body_radius", "exploration_steps",
                    "sampling_steps"},
                   "walk");
        get_if_present(w, "tau_w", c.walk.tau_w);
        get_if_present(w, "speed", c.walk.speed);
        get_if_present(w, "turn_sigma", c.walk.turn_sigma);
        get_if_present(w, "body_radius", c.walk.body_radius);
        get_if_present(w, "exploration_steps", c.walk.exploration_steps);
        get_if_present(w, "sampling_steps", c.walk.sampling_steps);
    }
    get_if_present(j, "n_p", c.n_p);
    if (j.contains("hex")) {
        const json& h = j.at("hex");
        check_keys(h, {"nx", "ny"}, "hex");
        get_if_present(h, "nx", c.hex.nx);
        get_if_present(h, "ny", c.hex.ny);
    }
    if (j.contains("aliasing")) {
        const json& a = j.at("aliasing");
        check_keys(a, {"d_th"}, "aliasing");
        get_if_present(a, "d_th", c.aliasing.d_th);
    }
    get_if_present(j, "seed", c.seed);
    get_if_present(j, "out_dir", c.out_dir);
    get_if_present(j, "threads", c.threads);
}

}  // namespace

std::string RunConfig::canonical_json() const {
    // nlohmann::json orders keys lexicographically, so dump() is canonical.
    return to_json(*this).dump();
}

std::string RunConfig::digest() const {
    const std::string s = canonical_json();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void RunConfig::apply_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    try {
        apply_json(*this, j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

void RunConfig::apply_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    apply_json_text(text);
}

void RunConfig::write_file(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path.string());
    json j = to_json(*this);
    j["out_dir"] = out_dir;
    j["threads"] = threads;
    out << j.dump(2) << '\n';
}

}  // namespace bvcsim
