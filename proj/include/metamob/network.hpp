#pragma once

#include <unordered_map>
#include <unordered_set>

#include "metamob/types.hpp"

namespace metamob {

struct NodeInfo {
    std::uint64_t visitors = 0;          // distinct agents ever seen at the node
    std::uint64_t events = 0;            // total visit events
    std::uint64_t self_transitions = 0;  // consecutive equal-location pairs
};

struct EdgeInfo {
    std::uint64_t weight_events = 0;  // movement events along the edge
    std::uint64_t weight_agents = 0;  // distinct agents that used the edge
};

/// Directed or undirected weighted mobility network. Locations are interned
/// to dense indices; self-transitions live on nodes, never as edges.
class MobilityNetwork {
public:
    explicit MobilityNetwork(bool directed = true) : directed_(directed) {}

    bool directed() const { return directed_; }
    std::size_t node_count() const { return labels_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    std::uint32_t intern(const LocationId& loc);
    std::optional<std::uint32_t> find(const LocationId& loc) const;

    const LocationId& label(std::uint32_t idx) const { return labels_[idx]; }
    const NodeInfo& node(std::uint32_t idx) const { return nodes_[idx]; }
    NodeInfo& node(std::uint32_t idx) { return nodes_[idx]; }

    /// Undirected edges use the canonical (min, max) key.
    static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
        return (std::uint64_t(a) << 32) | b;
    }
    std::uint64_t canonical_key(std::uint32_t src, std::uint32_t dst) const {
        if (!directed_ && dst < src) std::swap(src, dst);
        return edge_key(src, dst);
    }

    EdgeInfo& edge(std::uint32_t src, std::uint32_t dst) { return edges_[canonical_key(src, dst)]; }
    const std::unordered_map<std::uint64_t, EdgeInfo>& edges() const { return edges_; }

    bool has_edge(std::uint32_t src, std::uint32_t dst) const {
        return edges_.count(canonical_key(src, dst)) != 0;
    }

    std::uint64_t total_transitions() const;  // edge events + self transitions
    std::uint64_t total_self_transitions() const;

    /// Neighbor lists of the undirected projection; built once, then cached.
    const std::vector<std::vector<std::uint32_t>>& undirected_adjacency() const;

    /// Degree in the undirected projection (distinct neighbors).
    std::vector<std::uint64_t> undirected_degrees() const;

    /// Node indices sorted by label — the deterministic iteration order.
    std::vector<std::uint32_t> nodes_by_label() const;

    /// Edge keys sorted by (src label, dst label).
    std::vector<std::uint64_t> edges_by_label() const;

private:
    bool directed_;
    std::vector<LocationId> labels_;
    std::unordered_map<LocationId, std::uint32_t> index_;
    std::vector<NodeInfo> nodes_;
    std::unordered_map<std::uint64_t, EdgeInfo> edges_;
    mutable std::vector<std::vector<std::uint32_t>> adj_;
    mutable bool adj_built_ = false;
};

/// Build the mobility network from canonicalized trajectories: one edge per
/// consecutive pair of distinct locations, agent-deduplicated weights, and
/// per-node visitor/event/self-transition tallies.
MobilityNetwork build_network(const TrajectoryMap& trajs, bool directed);

/// BFS hop count on the undirected projection; nullopt when unreachable.
/// Unknown node ids throw DataError.
std::optional<std::uint64_t> shortest_path_distance(const MobilityNetwork& net,
                                                    const LocationId& a, const LocationId& b);

struct JumpDistanceHistogram {
    std::map<std::uint64_t, std::uint64_t> counts;  // hop distance -> samples
    std::uint64_t unreachable = 0;
    std::uint64_t total = 0;
};

/// Network jump distance per consecutive pair; the network must be built
/// from the same trajectories (equal pair -> 0, induced edge -> 1).
JumpDistanceHistogram contract_jump_distances(const TrajectoryMap& trajs,
                                              const MobilityNetwork& net);

/// Location-randomized null trajectories: per agent, identical event count
/// and timestamps, locations i.i.d. uniform over the world.
TrajectoryMap randomize_trajectories(const TrajectoryMap& trajs,
                                     const std::vector<LocationId>& world, std::uint64_t seed);

struct NeighborhoodResult {
    std::vector<std::pair<double, double>> pairs;  // (N_S, mean visitors of visited neighbors)
    std::uint64_t omitted = 0;                     // visited lands with no visited neighbor
};

/// Moore-neighborhood visitor averages for grid-form trajectories.
NeighborhoodResult neighborhood_visitor_average(const TrajectoryMap& trajs, const GridSpec& grid);

}  // namespace metamob
