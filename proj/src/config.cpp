#include "metamob/config.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "metamob/io.hpp"

namespace metamob {

using nlohmann::json;

namespace {

json parse_object(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ConfigError(std::string(what) + ": not a JSON object");
    return j;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key))
            throw ConfigError(std::string(what) + ": unknown key \"" + key + "\"");
    }
}

std::int64_t get_int(const json& j, const char* key, std::int64_t fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (it->is_number_integer()) return it->get<std::int64_t>();
    if (it->is_number_unsigned()) return std::int64_t(it->get<std::uint64_t>());
    throw ConfigError(std::string(key) + ": must be an integer");
}

double get_real(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (it->is_number()) return it->get<double>();
    throw ConfigError(std::string(key) + ": must be a number");
}

std::string get_string(const json& j, const char* key, const std::string& fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (it->is_string()) return it->get<std::string>();
    throw ConfigError(std::string(key) + ": must be a string");
}

GridSpec grid_from_json(const json& g) {
    if (!g.is_object()) throw ConfigError("grid: must be an object");
    reject_unknown(g, {"x_min", "x_max", "y_min", "y_max"}, "grid");
    GridSpec spec;
    spec.x_min = int(get_int(g, "x_min", spec.x_min));
    spec.x_max = int(get_int(g, "x_max", spec.x_max));
    spec.y_min = int(get_int(g, "y_min", spec.y_min));
    spec.y_max = int(get_int(g, "y_max", spec.y_max));
    return spec;
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
    const json j = parse_object(text, "config");
    reject_unknown(j,
                   {"model", "agents", "locations", "steps", "moves_per_activation", "rho",
                    "gamma", "epsilon", "activation", "grid", "jump_exponent", "seed",
                    "rejection_cap", "out"},
                   "config");
    RunConfig rc;
    SimConfig& cfg = rc.sim;
    cfg.model = model_from_name(get_string(j, "model", model_name(cfg.model)));
    cfg.agents = get_int(j, "agents", cfg.agents);
    cfg.steps = get_int(j, "steps", cfg.steps);
    cfg.moves_per_activation = get_int(j, "moves_per_activation", cfg.moves_per_activation);
    cfg.rho = get_real(j, "rho", cfg.rho);
    cfg.gamma = get_real(j, "gamma", cfg.gamma);
    cfg.epsilon = get_real(j, "epsilon", cfg.epsilon);
    cfg.jump_exponent = get_real(j, "jump_exponent", cfg.jump_exponent);
    const std::int64_t seed = get_int(j, "seed", 0);
    cfg.seed = std::uint64_t(seed);
    cfg.rejection_cap = get_int(j, "rejection_cap", cfg.rejection_cap);
    if (j.contains("grid") && !j.at("grid").is_null()) cfg.grid = grid_from_json(j.at("grid"));
    if (j.contains("locations"))
        cfg.locations = get_int(j, "locations", cfg.locations);
    else if (cfg.grid)
        cfg.locations = cfg.grid->cell_count();
    if (j.contains("activation")) {
        const json& a = j.at("activation");
        if (!a.is_object()) throw ConfigError("activation: must be an object");
        reject_unknown(a, {"kind", "lo", "hi", "path"}, "activation");
        const std::string kind = get_string(a, "kind", "per_agent_uniform");
        if (kind == "always") {
            cfg.activation.kind = ActivationSpec::Kind::always;
        } else if (kind == "per_agent_uniform") {
            cfg.activation.kind = ActivationSpec::Kind::per_agent_uniform;
            cfg.activation.lo = get_real(a, "lo", cfg.activation.lo);
            cfg.activation.hi = get_real(a, "hi", cfg.activation.hi);
        } else if (kind == "file") {
            cfg.activation.kind = ActivationSpec::Kind::file;
            cfg.activation.path = get_string(a, "path", "");
        } else {
            throw ConfigError("activation.kind: expected always|per_agent_uniform|file");
        }
    }
    rc.out = get_string(j, "out", "");
    cfg.validate();
    return rc;
}

std::string run_config_to_json(const RunConfig& rc) {
    const SimConfig& cfg = rc.sim;
    std::string s = "{";
    s += "\"model\":\"" + std::string(model_name(cfg.model)) + "\"";
    s += ",\"agents\":" + std::to_string(cfg.agents);
    s += ",\"locations\":" + std::to_string(cfg.locations);
    s += ",\"steps\":" + std::to_string(cfg.steps);
    s += ",\"moves_per_activation\":" + std::to_string(cfg.moves_per_activation);
    s += ",\"rho\":" + format_real(cfg.rho);
    s += ",\"gamma\":" + format_real(cfg.gamma);
    s += ",\"epsilon\":" + format_real(cfg.epsilon);
    switch (cfg.activation.kind) {
        case ActivationSpec::Kind::always:
            s += ",\"activation\":{\"kind\":\"always\"}";
            break;
        case ActivationSpec::Kind::per_agent_uniform:
            s += ",\"activation\":{\"kind\":\"per_agent_uniform\",\"lo\":" +
                 format_real(cfg.activation.lo) + ",\"hi\":" + format_real(cfg.activation.hi) +
                 "}";
            break;
        case ActivationSpec::Kind::file:
            s += ",\"activation\":{\"kind\":\"file\",\"path\":\"" +
                 json_escape(cfg.activation.path) + "\"}";
            break;
    }
    if (cfg.grid) {
        s += ",\"grid\":{\"x_min\":" + std::to_string(cfg.grid->x_min) +
             ",\"x_max\":" + std::to_string(cfg.grid->x_max) +
             ",\"y_min\":" + std::to_string(cfg.grid->y_min) +
             ",\"y_max\":" + std::to_string(cfg.grid->y_max) + "}";
        s += ",\"jump_exponent\":" + format_real(cfg.jump_exponent);
    }
    s += ",\"seed\":" + std::to_string(cfg.seed);
    s += ",\"rejection_cap\":" + std::to_string(cfg.rejection_cap);
    if (!rc.out.empty()) s += ",\"out\":\"" + json_escape(rc.out) + "\"";
    s += "}";
    return s;
}

AnalyzeOptions analyze_options_from_json(const std::string& text) {
    AnalyzeOptions opts;
    if (text.empty()) return opts;
    const json j = parse_object(text, "options");
    reject_unknown(j, {"grid", "window", "top_fraction", "teleport_threshold", "curves_dir"},
                   "options");
    if (j.contains("grid") && !j.at("grid").is_null()) {
        opts.grid = grid_from_json(j.at("grid"));
        opts.grid->validate();
    }
    if (j.contains("window")) opts.window = get_int(j, "window", 1);
    opts.top_fraction = get_real(j, "top_fraction", opts.top_fraction);
    if (!(opts.top_fraction > 0.0) || opts.top_fraction > 1.0)
        throw ConfigError("top_fraction: must be in (0, 1]");
    opts.teleport_threshold = get_int(j, "teleport_threshold", opts.teleport_threshold);
    opts.curves_dir = get_string(j, "curves_dir", "");
    return opts;
}

}  // namespace metamob
