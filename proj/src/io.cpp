#include "metamob/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace metamob {

using nlohmann::json;

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

ColumnMap parse_column_map(const std::string& spec) {
    ColumnMap map;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        std::size_t end = spec.find(',', pos);
        if (end == std::string::npos) end = spec.size();
        const std::string item = spec.substr(pos, end - pos);
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("map: expected key=column, got \"" + item + "\"");
        const std::string key = item.substr(0, eq);
        const std::string col = item.substr(eq + 1);
        if (col.empty()) throw ConfigError("map: empty column for key \"" + key + "\"");
        if (key == "agent")
            map.agent = col;
        else if (key == "t")
            map.t = col;
        else if (key == "loc")
            map.loc = col;
        else
            throw ConfigError("map: unknown key \"" + key + "\" (expected agent|t|loc)");
        pos = end + 1;
    }
    return map;
}

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::string field_to_string(const json& v, std::size_t line_no, const std::string& name) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    line_error(line_no, "field \"" + name + "\" must be a string or integer");
}

std::int64_t field_to_time(const json& v, std::size_t line_no, const std::string& name) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_unsigned()) return std::int64_t(v.get<std::uint64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d)) return std::int64_t(d);
    }
    line_error(line_no, "field \"" + name + "\" must be an integer timestamp");
}

std::vector<std::string> csv_split(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) line_error(line_no, "unterminated quoted field");
    fields.push_back(cur);
    return fields;
}

std::int64_t parse_time_field(const std::string& s, std::size_t line_no) {
    if (s.empty()) line_error(line_no, "empty timestamp field");
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno != 0 || d != std::floor(d))
        line_error(line_no, "timestamp \"" + s + "\" is not an integer");
    return std::int64_t(d);
}

void read_ndjson(std::istream& in, const ColumnMap& map, EventFile& out) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) line_error(line_no, "invalid JSON");
        if (!j.is_object()) line_error(line_no, "expected a JSON object");
        if (line_no == 1 && j.contains("meta")) {
            out.has_meta = true;
            out.meta_json = line;
            continue;
        }
        MovementEvent ev;
        auto require = [&](const std::string& key) -> const json& {
            auto it = j.find(key);
            if (it == j.end()) line_error(line_no, "missing field \"" + key + "\"");
            return *it;
        };
        ev.agent = field_to_string(require(map.agent), line_no, map.agent);
        ev.t = field_to_time(require(map.t), line_no, map.t);
        if (ev.t < 0) line_error(line_no, "negative timestamp");
        ev.loc = field_to_string(require(map.loc), line_no, map.loc);
        out.events.push_back(std::move(ev));
    }
}

void read_csv(std::istream& in, const ColumnMap& map, EventFile& out) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) return;  // empty file: no events
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = csv_split(line, line_no);
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw DataError("header: missing column \"" + name + "\"");
    };
    const std::size_t c_agent = column(map.agent);
    const std::size_t c_t = column(map.t);
    const std::size_t c_loc = column(map.loc);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = csv_split(line, line_no);
        const std::size_t need = std::max({c_agent, c_t, c_loc});
        if (fields.size() <= need) line_error(line_no, "too few columns");
        MovementEvent ev;
        ev.agent = fields[c_agent];
        ev.t = parse_time_field(fields[c_t], line_no);
        if (ev.t < 0) line_error(line_no, "negative timestamp");
        ev.loc = fields[c_loc];
        if (ev.agent.empty()) line_error(line_no, "empty agent field");
        if (ev.loc.empty()) line_error(line_no, "empty loc field");
        out.events.push_back(std::move(ev));
    }
}

}  // namespace

EventFile read_events(std::istream& in, const ColumnMap& map) {
    EventFile out;
    const int first = in.peek();
    if (first == std::char_traits<char>::eof()) return out;
    if (first == '{')
        read_ndjson(in, map, out);
    else
        read_csv(in, map, out);
    return out;
}

EventFile read_events_file(const std::string& path, const ColumnMap& map) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    return read_events(in, map);
}

std::string event_line(const MovementEvent& ev) {
    std::string out = "{\"agent\":\"";
    out += json_escape(ev.agent);
    out += "\",\"t\":";
    out += std::to_string(ev.t);
    out += ",\"loc\":\"";
    out += json_escape(ev.loc);
    out += "\"}";
    return out;
}

std::string sim_meta_line(const SimConfig& cfg, const SimStats& stats) {
    std::string s = "{\"meta\":{\"format\":\"metamob-trajectories\",\"version\":\"0.1.0\"";
    s += ",\"timebase\":\"ticks\"";
    s += ",\"model\":\"" + std::string(model_name(cfg.model)) + "\"";
    s += ",\"agents\":" + std::to_string(cfg.agents);
    s += ",\"locations\":" + std::to_string(cfg.locations);
    s += ",\"steps\":" + std::to_string(cfg.steps);
    s += ",\"moves_per_activation\":" + std::to_string(cfg.moves_per_activation);
    s += ",\"rho\":" + format_real(cfg.rho);
    s += ",\"gamma\":" + format_real(cfg.gamma);
    s += ",\"epsilon\":" + format_real(cfg.epsilon);
    s += ",\"activation\":";
    switch (cfg.activation.kind) {
        case ActivationSpec::Kind::always:
            s += "{\"kind\":\"always\"}";
            break;
        case ActivationSpec::Kind::per_agent_uniform:
            s += "{\"kind\":\"per_agent_uniform\",\"lo\":" + format_real(cfg.activation.lo) +
                 ",\"hi\":" + format_real(cfg.activation.hi) + "}";
            break;
        case ActivationSpec::Kind::file:
            s += "{\"kind\":\"file\",\"path\":\"" + json_escape(cfg.activation.path) + "\"}";
            break;
    }
    if (cfg.grid) {
        s += ",\"grid\":{\"x_min\":" + std::to_string(cfg.grid->x_min) +
             ",\"x_max\":" + std::to_string(cfg.grid->x_max) +
             ",\"y_min\":" + std::to_string(cfg.grid->y_min) +
             ",\"y_max\":" + std::to_string(cfg.grid->y_max) + "}";
        s += ",\"jump_exponent\":" + format_real(cfg.jump_exponent);
    } else {
        s += ",\"grid\":null";
    }
    s += ",\"seed\":" + std::to_string(cfg.seed);
    s += ",\"rejection_cap\":" + std::to_string(cfg.rejection_cap);
    s += ",\"events\":" + std::to_string(stats.events);
    s += ",\"explore_fallthrough\":" + std::to_string(stats.counters.explore_fallthrough);
    s += ",\"rejection_fallback\":" + std::to_string(stats.counters.rejection_fallback);
    s += "}}";
    return s;
}

void write_events_ndjson(std::ostream& out, const std::string& meta_line,
                         const std::vector<MovementEvent>& events) {
    if (!meta_line.empty()) out << meta_line << '\n';
    for (const auto& ev : events) out << event_line(ev) << '\n';
}

SimStats simulate_to_file(const SimConfig& cfg, const std::string& path, unsigned workers) {
    // the meta header carries end-of-run counters, so events spill to a
    // temp file first
    const std::string tmp = path + ".tmp";
    SimStats stats;
    {
        std::ofstream body(tmp, std::ios::binary);
        if (!body) throw DataError("cannot write output file: " + tmp);
        std::string buffer;
        buffer.reserve(1 << 20);
        stats = run_simulation_to_sink(
            cfg,
            [&](const MovementEvent& ev) {
                buffer += event_line(ev);
                buffer += '\n';
                if (buffer.size() > (1 << 20) - 256) {
                    body.write(buffer.data(), std::streamsize(buffer.size()));
                    buffer.clear();
                }
            },
            workers);
        body.write(buffer.data(), std::streamsize(buffer.size()));
        if (!body) throw DataError("write failed: " + tmp);
    }
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write output file: " + path);
        out << sim_meta_line(cfg, stats) << '\n';
        std::ifstream body(tmp, std::ios::binary);
        out << body.rdbuf();
        if (!out) throw DataError("write failed: " + path);
    }
    std::filesystem::remove(tmp);
    return stats;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

void write_network_csv(const MobilityNetwork& net, const std::string& edge_path,
                       const std::string& node_path) {
    {
        std::ofstream out(edge_path, std::ios::binary);
        if (!out) throw DataError("cannot write output file: " + edge_path);
        out << "src,dst,weight_events,weight_agents\n";
        for (const auto key : net.edges_by_label()) {
            const auto src = std::uint32_t(key >> 32);
            const auto dst = std::uint32_t(key & 0xffffffffu);
            const auto& e = net.edges().at(key);
            out << csv_escape(net.label(src)) << ',' << csv_escape(net.label(dst)) << ','
                << e.weight_events << ',' << e.weight_agents << '\n';
        }
        if (!out) throw DataError("write failed: " + edge_path);
    }
    {
        std::ofstream out(node_path, std::ios::binary);
        if (!out) throw DataError("cannot write output file: " + node_path);
        out << "loc,visitors,events,self_transitions,degree\n";
        const auto degrees = net.undirected_degrees();
        for (const auto idx : net.nodes_by_label()) {
            const auto& n = net.node(idx);
            out << csv_escape(net.label(idx)) << ',' << n.visitors << ',' << n.events << ','
                << n.self_transitions << ',' << degrees[idx] << '\n';
        }
        if (!out) throw DataError("write failed: " + node_path);
    }
}

MobilityNetwork read_network_csv(const std::string& edge_path, const std::string& node_path,
                                 bool directed) {
    MobilityNetwork net(directed);
    auto parse_u64 = [](const std::string& s, std::size_t line_no) {
        if (s.empty()) line_error(line_no, "empty count field");
        errno = 0;
        char* end = nullptr;
        const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0' || errno != 0)
            line_error(line_no, "invalid count \"" + s + "\"");
        return std::uint64_t(v);
    };
    {
        std::ifstream in(node_path, std::ios::binary);
        if (!in) throw DataError("cannot open input file: " + node_path);
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line)) throw DataError(node_path + ": empty node table");
        ++line_no;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto f = csv_split(line, line_no);
            if (f.size() < 5) line_error(line_no, "node row needs 5 columns");
            NodeInfo& n = net.node(net.intern(f[0]));
            n.visitors = parse_u64(f[1], line_no);
            n.events = parse_u64(f[2], line_no);
            n.self_transitions = parse_u64(f[3], line_no);
        }
    }
    {
        std::ifstream in(edge_path, std::ios::binary);
        if (!in) throw DataError("cannot open input file: " + edge_path);
        std::string line;
        std::size_t line_no = 0;
        if (!std::getline(in, line)) throw DataError(edge_path + ": empty edge table");
        ++line_no;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto f = csv_split(line, line_no);
            if (f.size() < 4) line_error(line_no, "edge row needs 4 columns");
            EdgeInfo& e = net.edge(net.intern(f[0]), net.intern(f[1]));
            e.weight_events += parse_u64(f[2], line_no);
            e.weight_agents += parse_u64(f[3], line_no);
        }
    }
    return net;
}

void write_curve_csv(const std::string& path, const std::vector<double>& centers,
                     const std::vector<double>& values,
                     const std::vector<std::uint64_t>& counts) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write output file: " + path);
    out << "bin_center,value,count\n";
    for (std::size_t i = 0; i < centers.size(); ++i)
        out << format_real(centers[i]) << ',' << format_real(values[i]) << ',' << counts[i]
            << '\n';
    if (!out) throw DataError("write failed: " + path);
}

}  // namespace metamob
