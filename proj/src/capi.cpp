#include "metamob.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>

#include <json.hpp>

#include "metamob/config.hpp"
#include "metamob/core.hpp"
#include "metamob/io.hpp"
#include "metamob/report.hpp"

using namespace metamob;

struct mm_trajset {
    TrajectoryMap trajs;
    bool generated = false;     // carried a generator meta header
    bool tick_time = false;     // timestamps are simulation ticks
    std::string meta_json;      // original header line, when present
};

struct mm_network {
    MobilityNetwork net{true};
};

namespace {

void set_error(char* err, size_t cap, const char* msg) {
    if (!err || cap == 0) return;
    std::strncpy(err, msg, cap - 1);
    err[cap - 1] = '\0';
}

template <typename Fn>
mm_status guarded(char* err, size_t cap, Fn&& fn) {
    try {
        fn();
        return MM_OK;
    } catch (const ConfigError& e) {
        set_error(err, cap, e.what());
        return MM_ERR_CONFIG;
    } catch (const DataError& e) {
        set_error(err, cap, e.what());
        return MM_ERR_DATA;
    } catch (const std::exception& e) {
        set_error(err, cap, e.what());
        return MM_ERR_INTERNAL;
    }
}

/// Location universe for randomization: the full simulated world when the
/// meta header describes one, otherwise the observed distinct locations.
std::vector<LocationId> location_universe(const mm_trajset& ts) {
    if (ts.generated && !ts.meta_json.empty()) {
        const auto j = nlohmann::json::parse(ts.meta_json, nullptr, false);
        if (!j.is_discarded() && j.contains("meta")) {
            const auto& m = j.at("meta");
            if (m.contains("locations") && m.at("locations").is_number_integer()) {
                const auto n = m.at("locations").get<std::int64_t>();
                std::vector<LocationId> world;
                world.reserve(std::size_t(n));
                if (m.contains("grid") && m.at("grid").is_object()) {
                    GridSpec g;
                    g.x_min = m.at("grid").value("x_min", g.x_min);
                    g.x_max = m.at("grid").value("x_max", g.x_max);
                    g.y_min = m.at("grid").value("y_min", g.y_min);
                    g.y_max = m.at("grid").value("y_max", g.y_max);
                    for (std::int64_t i = 0; i < n; ++i)
                        world.push_back(make_grid_id(g.coord_of(i)));
                } else {
                    for (std::int64_t i = 0; i < n; ++i)
                        world.push_back("L" + std::to_string(i));
                }
                return world;
            }
        }
    }
    std::vector<LocationId> world;
    for (const auto& [agent, traj] : ts.trajs)
        for (const auto& ev : traj.events) world.push_back(ev.loc);
    std::sort(world.begin(), world.end());
    world.erase(std::unique(world.begin(), world.end()), world.end());
    return world;
}

}  // namespace

extern "C" {

const char* mm_version(void) { return "0.1.0"; }

mm_status mm_simulate(const char* config_json, const char* out_path, char* err, size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!config_json) throw ConfigError("config: null");
        const RunConfig rc = run_config_from_json(config_json);
        std::string path = out_path ? out_path : "";
        if (path.empty()) path = rc.out;
        if (path.empty()) throw ConfigError("out: no output path given");
        simulate_to_file(rc.sim, path);
    });
}

mm_status mm_trajset_read(const char* path, const char* column_map, mm_trajset** out, char* err,
                          size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!path || !out) throw ConfigError("trajset_read: null argument");
        ColumnMap map;
        if (column_map && *column_map) map = parse_column_map(column_map);
        EventFile file = read_events_file(path, map);
        auto ts = std::make_unique<mm_trajset>();
        ts->trajs = canonicalize_trajectories(file.events);
        ts->generated = file.has_meta;
        ts->meta_json = file.meta_json;
        if (file.has_meta) {
            const auto j = nlohmann::json::parse(file.meta_json, nullptr, false);
            ts->tick_time = true;
            if (!j.is_discarded() && j.contains("meta") && j.at("meta").contains("timebase"))
                ts->tick_time = j.at("meta").at("timebase") == "ticks";
        }
        *out = ts.release();
    });
}

mm_status mm_trajset_write(const mm_trajset* ts, const char* path, char* err, size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!ts || !path) throw ConfigError("trajset_write: null argument");
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError(std::string("cannot write output file: ") + path);
        if (!ts->meta_json.empty()) out << ts->meta_json << '\n';
        for (const auto& [agent, traj] : ts->trajs)
            for (const auto& ev : traj.events) out << event_line(ev) << '\n';
        if (!out) throw DataError(std::string("write failed: ") + path);
    });
}

mm_status mm_trajset_randomize(const mm_trajset* ts, uint64_t seed, mm_trajset** out, char* err,
                               size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!ts || !out) throw ConfigError("trajset_randomize: null argument");
        const auto world = location_universe(*ts);
        auto rs = std::make_unique<mm_trajset>();
        rs->trajs = randomize_trajectories(ts->trajs, world, seed);
        rs->generated = true;  // randomized output is generated data
        rs->tick_time = ts->tick_time;
        rs->meta_json = "{\"meta\":{\"format\":\"metamob-trajectories\",\"version\":\"0.1.0\""
                        ",\"randomized\":true,\"seed\":" +
                        std::to_string(seed) + ",\"timebase\":\"" +
                        (ts->tick_time ? "ticks" : "epoch") + "\"}}";
        *out = rs.release();
    });
}

size_t mm_trajset_agents(const mm_trajset* ts) { return ts ? ts->trajs.size() : 0; }

size_t mm_trajset_events(const mm_trajset* ts) {
    if (!ts) return 0;
    size_t n = 0;
    for (const auto& [agent, traj] : ts->trajs) n += traj.events.size();
    return n;
}

int mm_trajset_generated(const mm_trajset* ts) { return ts && ts->generated ? 1 : 0; }

void mm_trajset_free(mm_trajset* ts) { delete ts; }

mm_status mm_network_build(const mm_trajset* ts, int directed, mm_network** out, char* err,
                           size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!ts || !out) throw ConfigError("network_build: null argument");
        auto net = std::make_unique<mm_network>();
        net->net = build_network(ts->trajs, directed != 0);
        *out = net.release();
    });
}

mm_status mm_network_write_csv(const mm_network* net, const char* edge_path,
                               const char* node_path, char* err, size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!net || !edge_path || !node_path)
            throw ConfigError("network_write_csv: null argument");
        write_network_csv(net->net, edge_path, node_path);
    });
}

mm_status mm_network_read_csv(const char* edge_path, const char* node_path, int directed,
                              mm_network** out, char* err, size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!edge_path || !node_path || !out)
            throw ConfigError("network_read_csv: null argument");
        auto net = std::make_unique<mm_network>();
        net->net = read_network_csv(edge_path, node_path, directed != 0);
        *out = net.release();
    });
}

size_t mm_network_nodes(const mm_network* net) { return net ? net->net.node_count() : 0; }
size_t mm_network_edges(const mm_network* net) { return net ? net->net.edge_count() : 0; }

uint64_t mm_network_transitions(const mm_network* net) {
    return net ? net->net.total_transitions() : 0;
}

void mm_network_free(mm_network* net) { delete net; }

mm_status mm_analyze(const mm_trajset* ts, const mm_network* net, const char* options_json,
                     char** report_json, char* err, size_t err_cap) {
    return guarded(err, err_cap, [&] {
        if (!ts || !report_json) throw ConfigError("analyze: null argument");
        AnalyzeOptions opts =
            analyze_options_from_json(options_json ? std::string(options_json) : "");
        opts.assume_generated = ts->tick_time;
        const Report rep = analyze_all(ts->trajs, net ? &net->net : nullptr, opts);
        const std::string text = rep.to_json();
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (!buf) throw InternalError("analyze: out of memory");
        std::memcpy(buf, text.data(), text.size() + 1);
        *report_json = buf;
    });
}

void mm_free(char* buf) { std::free(buf); }

}  // extern "C"
