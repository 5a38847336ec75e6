#include "metamob/network.hpp"

#include <algorithm>
#include <deque>

#include "metamob/rng.hpp"

namespace metamob {

std::uint32_t MobilityNetwork::intern(const LocationId& loc) {
    auto it = index_.find(loc);
    if (it != index_.end()) return it->second;
    const auto idx = std::uint32_t(labels_.size());
    index_.emplace(loc, idx);
    labels_.push_back(loc);
    nodes_.emplace_back();
    adj_built_ = false;
    return idx;
}

std::optional<std::uint32_t> MobilityNetwork::find(const LocationId& loc) const {
    auto it = index_.find(loc);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t MobilityNetwork::total_transitions() const {
    std::uint64_t total = total_self_transitions();
    for (const auto& [key, info] : edges_) total += info.weight_events;
    return total;
}

std::uint64_t MobilityNetwork::total_self_transitions() const {
    std::uint64_t total = 0;
    for (const auto& n : nodes_) total += n.self_transitions;
    return total;
}

const std::vector<std::vector<std::uint32_t>>& MobilityNetwork::undirected_adjacency() const {
    if (!adj_built_) {
        adj_.assign(labels_.size(), {});
        for (const auto& [key, info] : edges_) {
            const auto src = std::uint32_t(key >> 32);
            const auto dst = std::uint32_t(key & 0xffffffffu);
            adj_[src].push_back(dst);
            adj_[dst].push_back(src);
        }
        for (auto& nbrs : adj_) {
            std::sort(nbrs.begin(), nbrs.end());
            nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        }
        adj_built_ = true;
    }
    return adj_;
}

std::vector<std::uint64_t> MobilityNetwork::undirected_degrees() const {
    const auto& adj = undirected_adjacency();
    std::vector<std::uint64_t> deg(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) deg[i] = adj[i].size();
    return deg;
}

std::vector<std::uint32_t> MobilityNetwork::nodes_by_label() const {
    std::vector<std::uint32_t> idx(labels_.size());
    for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [this](std::uint32_t a, std::uint32_t b) { return labels_[a] < labels_[b]; });
    return idx;
}

std::vector<std::uint64_t> MobilityNetwork::edges_by_label() const {
    std::vector<std::uint64_t> keys;
    keys.reserve(edges_.size());
    for (const auto& [key, info] : edges_) keys.push_back(key);
    std::sort(keys.begin(), keys.end(), [this](std::uint64_t a, std::uint64_t b) {
        const auto& sa = labels_[std::uint32_t(a >> 32)];
        const auto& sb = labels_[std::uint32_t(b >> 32)];
        if (sa != sb) return sa < sb;
        return labels_[std::uint32_t(a & 0xffffffffu)] < labels_[std::uint32_t(b & 0xffffffffu)];
    });
    return keys;
}

MobilityNetwork build_network(const TrajectoryMap& trajs, bool directed) {
    MobilityNetwork net(directed);
    std::unordered_set<std::uint64_t> agent_edges;
    std::unordered_set<std::uint32_t> agent_nodes;
    for (const auto& [agent, traj] : trajs) {
        agent_edges.clear();
        agent_nodes.clear();
        std::uint32_t prev = 0;
        bool have_prev = false;
        for (const auto& ev : traj.events) {
            const std::uint32_t cur = net.intern(ev.loc);
            ++net.node(cur).events;
            agent_nodes.insert(cur);
            if (have_prev) {
                if (cur == prev) {
                    ++net.node(cur).self_transitions;
                } else {
                    EdgeInfo& e = net.edge(prev, cur);
                    ++e.weight_events;
                    const std::uint64_t key = net.canonical_key(prev, cur);
                    if (agent_edges.insert(key).second) ++e.weight_agents;
                }
            }
            prev = cur;
            have_prev = true;
        }
        for (const auto idx : agent_nodes) ++net.node(idx).visitors;
    }
    return net;
}

namespace {

std::vector<std::uint64_t> bfs_distances(const MobilityNetwork& net, std::uint32_t src) {
    constexpr std::uint64_t kUnreached = std::uint64_t(-1);
    const auto& adj = net.undirected_adjacency();
    std::vector<std::uint64_t> dist(adj.size(), kUnreached);
    std::deque<std::uint32_t> queue;
    dist[src] = 0;
    queue.push_back(src);
    while (!queue.empty()) {
        const std::uint32_t u = queue.front();
        queue.pop_front();
        for (const auto v : adj[u]) {
            if (dist[v] == kUnreached) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return dist;
}

}  // namespace

std::optional<std::uint64_t> shortest_path_distance(const MobilityNetwork& net,
                                                    const LocationId& a, const LocationId& b) {
    const auto ia = net.find(a);
    if (!ia) throw DataError("unknown node: \"" + a + "\"");
    const auto ib = net.find(b);
    if (!ib) throw DataError("unknown node: \"" + b + "\"");
    if (*ia == *ib) return 0;
    const auto dist = bfs_distances(net, *ia);
    if (dist[*ib] == std::uint64_t(-1)) return std::nullopt;
    return dist[*ib];
}

JumpDistanceHistogram contract_jump_distances(const TrajectoryMap& trajs,
                                              const MobilityNetwork& net) {
    JumpDistanceHistogram hist;
    const auto& adj = net.undirected_adjacency();
    for (const auto& [agent, traj] : trajs) {
        for (std::size_t i = 1; i < traj.events.size(); ++i) {
            const auto& prev = traj.events[i - 1].loc;
            const auto& next = traj.events[i].loc;
            ++hist.total;
            if (prev == next) {
                ++hist.counts[0];
                continue;
            }
            const auto ip = net.find(prev);
            const auto in = net.find(next);
            if (ip && in &&
                std::binary_search(adj[*ip].begin(), adj[*ip].end(), *in)) {
                ++hist.counts[1];  // induced edge; BFS would return 1
                continue;
            }
            const auto d = shortest_path_distance(net, prev, next);
            if (d)
                ++hist.counts[*d];
            else
                ++hist.unreachable;
        }
    }
    return hist;
}

TrajectoryMap randomize_trajectories(const TrajectoryMap& trajs,
                                     const std::vector<LocationId>& world, std::uint64_t seed) {
    if (world.empty()) throw DataError("randomize: empty location universe");
    TrajectoryMap out;
    std::uint64_t agent_index = 0;
    for (const auto& [agent, traj] : trajs) {
        Rng rng(substream_seed(seed, agent_index++));
        Trajectory rt;
        rt.agent = agent;
        rt.events.reserve(traj.events.size());
        for (const auto& ev : traj.events) {
            const auto& loc = world[rng.uniform_index(world.size())];
            rt.events.push_back(MovementEvent{agent, ev.t, loc});
        }
        out.emplace(agent, std::move(rt));
    }
    return out;
}

NeighborhoodResult neighborhood_visitor_average(const TrajectoryMap& trajs,
                                                const GridSpec& grid) {
    grid.validate();
    // distinct visitors per land
    std::unordered_map<std::int64_t, std::unordered_set<std::uint32_t>> seen;
    std::uint32_t agent_idx = 0;
    for (const auto& [agent, traj] : trajs) {
        for (const auto& ev : traj.events) {
            const GridCoord c = parse_grid_id(ev.loc);
            if (!grid.contains(c)) throw DataError("location outside grid: \"" + ev.loc + "\"");
            seen[grid.index_of(c)].insert(agent_idx);
        }
        ++agent_idx;
    }
    std::unordered_map<std::int64_t, std::uint64_t> visitors;
    visitors.reserve(seen.size());
    for (const auto& [idx, agents] : seen) visitors.emplace(idx, agents.size());

    NeighborhoodResult res;
    std::vector<std::int64_t> lands;
    lands.reserve(visitors.size());
    for (const auto& [idx, v] : visitors) lands.push_back(idx);
    std::sort(lands.begin(), lands.end());

    for (const auto idx : lands) {
        const GridCoord c = grid.coord_of(idx);
        double sum = 0.0;
        std::uint64_t occupied = 0;
        for (int dx = -1; dx <= 1; ++dx) {
            for (int dy = -1; dy <= 1; ++dy) {
                if (dx == 0 && dy == 0) continue;
                const GridCoord nb{c.x + dx, c.y + dy};
                if (!grid.contains(nb)) continue;
                auto it = visitors.find(grid.index_of(nb));
                if (it != visitors.end()) {
                    sum += double(it->second);
                    ++occupied;
                }
            }
        }
        if (occupied == 0) {
            ++res.omitted;
            continue;
        }
        res.pairs.emplace_back(double(visitors.at(idx)), sum / double(occupied));
    }
    return res;
}

}  // namespace metamob
