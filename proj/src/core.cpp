#include "metamob/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace metamob {

namespace {

std::string_view trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string_view(s).substr(b, e - b);
}

bool parse_int(std::string_view sv, int& out) {
    if (sv.empty()) return false;
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::optional<GridCoord> try_parse_grid_id(const LocationId& id) {
    const std::string_view sv = trimmed(id);
    const std::size_t comma = sv.find(',');
    if (comma == std::string_view::npos) return std::nullopt;
    GridCoord c;
    if (!parse_int(sv.substr(0, comma), c.x)) return std::nullopt;
    if (!parse_int(sv.substr(comma + 1), c.y)) return std::nullopt;
    return c;
}

GridCoord parse_grid_id(const LocationId& id) {
    auto c = try_parse_grid_id(id);
    if (!c) throw DataError("not a grid-form location id: \"" + id + "\"");
    return *c;
}

LocationId make_grid_id(GridCoord c) {
    return std::to_string(c.x) + "," + std::to_string(c.y);
}

std::int64_t manhattan_distance(const LocationId& a, const LocationId& b) {
    const GridCoord ca = parse_grid_id(a);
    const GridCoord cb = parse_grid_id(b);
    return std::llabs(std::int64_t(ca.x) - cb.x) + std::llabs(std::int64_t(ca.y) - cb.y);
}

TrajectoryMap canonicalize_trajectories(const std::vector<MovementEvent>& events) {
    for (const auto& ev : events) {
        if (ev.t < 0) throw DataError("negative timestamp for agent \"" + ev.agent + "\"");
    }
    TrajectoryMap out;
    for (const auto& ev : events) {
        auto& traj = out[ev.agent];
        traj.agent = ev.agent;
        traj.events.push_back(ev);
    }
    // stable sort keeps input order for equal timestamps
    for (auto& [agent, traj] : out) {
        std::stable_sort(traj.events.begin(), traj.events.end(),
                         [](const MovementEvent& a, const MovementEvent& b) { return a.t < b.t; });
    }
    return out;
}

AgentStats agent_stats(const Trajectory& traj) {
    if (traj.events.empty()) throw DataError("agent_stats: empty trajectory");
    AgentStats st;
    st.agent = traj.agent;
    st.n = traj.events.size();
    for (const auto& ev : traj.events) ++st.visit_counts[ev.loc];
    st.s = st.visit_counts.size();
    st.f_mean = double(st.n) / double(st.s);
    double ss = 0.0;
    for (const auto& [loc, c] : st.visit_counts) {
        const double d = double(c) - st.f_mean;
        ss += d * d;
    }
    st.sigma_f = std::sqrt(ss / double(st.s));  // population form, defined for s == 1
    return st;
}

const char* quantity_name(Quantity q) {
    switch (q) {
        case Quantity::generic: return "generic";
        case Quantity::visitor_alpha: return "visitor_alpha";
        case Quantity::rank_frequency_alpha: return "rank_frequency_alpha";
        case Quantity::exploration_mu: return "exploration_mu";
        case Quantity::fluctuation_beta: return "fluctuation_beta";
        case Quantity::gamma: return "gamma";
        case Quantity::preferential_beta: return "preferential_beta";
        case Quantity::degree_alpha: return "degree_alpha";
        case Quantity::weight_alpha: return "weight_alpha";
        case Quantity::degree_visitor_beta: return "degree_visitor_beta";
        case Quantity::neighborhood_beta: return "neighborhood_beta";
        case Quantity::ranked_distance_slope: return "ranked_distance_slope";
    }
    return "generic";
}

}  // namespace metamob
