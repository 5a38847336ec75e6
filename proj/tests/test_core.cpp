#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unordered_set>

#include "metamob/core.hpp"
#include "metamob/rng.hpp"

using namespace metamob;

TEST_CASE("manhattan distance examples") {
    CHECK(manhattan_distance("118,-10", "120,-12") == 4);
    CHECK(manhattan_distance("0,0", "0,0") == 0);
    CHECK(manhattan_distance("-150,-150", "150,150") == 600);
    CHECK(manhattan_distance(" 3,4 ", "3,4") == 0);  // whitespace trimmed
}

TEST_CASE("manhattan distance rejects non-grid ids") {
    CHECK_THROWS_WITH_AS(manhattan_distance("L42", "0,0"),
                         doctest::Contains("L42"), DataError);
    CHECK_THROWS_AS(manhattan_distance("0,0", "1,2,3"), DataError);
    CHECK_THROWS_AS(manhattan_distance("a,b", "0,0"), DataError);
    CHECK_THROWS_AS(manhattan_distance("1.5,2", "0,0"), DataError);
}

TEST_CASE("manhattan distance metric properties") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const auto coord = [&rng] {
            return GridCoord{int(rng.uniform_index(301)) - 150,
                             int(rng.uniform_index(301)) - 150};
        };
        const GridCoord a = coord(), b = coord(), c = coord();
        const auto ida = make_grid_id(a), idb = make_grid_id(b), idc = make_grid_id(c);
        CHECK(manhattan_distance(ida, idb) == manhattan_distance(idb, ida));
        CHECK(manhattan_distance(ida, idc) <=
              manhattan_distance(ida, idb) + manhattan_distance(idb, idc));
        CHECK((manhattan_distance(ida, idb) == 0) == (a == b));
    }
}

TEST_CASE("grid spec") {
    GridSpec g;
    CHECK(g.cell_count() == 301 * 301);
    CHECK(g.contains(GridCoord{150, -150}));
    CHECK_FALSE(g.contains(GridCoord{151, 0}));
    for (std::int64_t i : {std::int64_t(0), std::int64_t(300), std::int64_t(90600)})
        CHECK(g.index_of(g.coord_of(i)) == i);
    GridSpec bad{10, 5, 0, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("canonicalize sorts per agent by (t, input order)") {
    std::vector<MovementEvent> events = {
        {"a", 5, "X"}, {"a", 1, "Y"}, {"a", 3, "Z"},
    };
    const auto trajs = canonicalize_trajectories(events);
    REQUIRE(trajs.size() == 1);
    const auto& tr = trajs.at("a");
    REQUIRE(tr.events.size() == 3);
    CHECK(tr.events[0].t == 1);
    CHECK(tr.events[1].t == 3);
    CHECK(tr.events[2].t == 5);
}

TEST_CASE("canonicalize separates interleaved agents, lexicographic order") {
    std::vector<MovementEvent> events = {
        {"b", 2, "X"}, {"a", 9, "Y"}, {"b", 1, "Z"}, {"a", 0, "W"},
    };
    const auto trajs = canonicalize_trajectories(events);
    REQUIRE(trajs.size() == 2);
    auto it = trajs.begin();
    CHECK(it->first == "a");
    CHECK(it->second.events[0].loc == "W");
    ++it;
    CHECK(it->first == "b");
    CHECK(it->second.events[0].loc == "Z");
}

TEST_CASE("canonicalize keeps ties in input order and duplicates") {
    std::vector<MovementEvent> events = {
        {"a", 7, "first"}, {"a", 7, "second"}, {"a", 7, "second"},
    };
    const auto trajs = canonicalize_trajectories(events);
    const auto& evs = trajs.at("a").events;
    REQUIRE(evs.size() == 3);
    CHECK(evs[0].loc == "first");
    CHECK(evs[1].loc == "second");
    CHECK(evs[2].loc == "second");
}

TEST_CASE("canonicalize boundary and error cases") {
    CHECK(canonicalize_trajectories({}).empty());
    CHECK_THROWS_AS(canonicalize_trajectories({{"a", -1, "X"}}), DataError);
}

TEST_CASE("canonicalize is idempotent") {
    Rng rng(77);
    std::vector<MovementEvent> events;
    for (int i = 0; i < 500; ++i)
        events.push_back({"a" + std::to_string(rng.uniform_index(7)),
                          std::int64_t(rng.uniform_index(40)),
                          "L" + std::to_string(rng.uniform_index(20))});
    const auto once = canonicalize_trajectories(events);
    std::vector<MovementEvent> flat;
    for (const auto& [agent, traj] : once)
        flat.insert(flat.end(), traj.events.begin(), traj.events.end());
    const auto twice = canonicalize_trajectories(flat);
    REQUIRE(once.size() == twice.size());
    for (const auto& [agent, traj] : once) {
        const auto& other = twice.at(agent).events;
        REQUIRE(other.size() == traj.events.size());
        for (std::size_t i = 0; i < other.size(); ++i) CHECK(other[i] == traj.events[i]);
    }
}

namespace {

Trajectory make_traj(const std::vector<std::string>& locs) {
    Trajectory tr;
    tr.agent = "a";
    for (std::size_t i = 0; i < locs.size(); ++i)
        tr.events.push_back({"a", std::int64_t(i), locs[i]});
    return tr;
}

}  // namespace

TEST_CASE("agent stats hand-computed example") {
    const auto st = agent_stats(make_traj({"A", "A", "A", "B"}));
    CHECK(st.n == 4);
    CHECK(st.s == 2);
    CHECK(st.f_mean == doctest::Approx(2.0));
    // population std of {3, 1}: mean 2, variance ((1)^2 + (-1)^2)/2 = 1
    CHECK(st.sigma_f == doctest::Approx(1.0));
}

TEST_CASE("agent stats uniform and singleton cases") {
    const auto uniform = agent_stats(make_traj({"A", "B", "C", "D"}));
    CHECK(uniform.f_mean == doctest::Approx(1.0));
    CHECK(uniform.sigma_f == doctest::Approx(0.0));
    const auto single = agent_stats(make_traj({"A"}));
    CHECK(single.n == 1);
    CHECK(single.s == 1);
    CHECK(single.f_mean == doctest::Approx(1.0));
    CHECK(single.sigma_f == doctest::Approx(0.0));
    CHECK_THROWS_AS(agent_stats(Trajectory{}), DataError);
}

TEST_CASE("agent stats invariants on random trajectories") {
    Rng rng(31337);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> locs;
        const auto len = 1 + rng.uniform_index(60);
        for (std::uint64_t i = 0; i < len; ++i)
            locs.push_back("L" + std::to_string(rng.uniform_index(12)));
        const auto st = agent_stats(make_traj(locs));
        std::uint64_t total = 0;
        for (const auto& [loc, c] : st.visit_counts) total += c;
        CHECK(total == st.n);
        CHECK(st.visit_counts.size() == st.s);
        CHECK(st.f_mean == double(st.n) / double(st.s));
        bool all_equal = true;
        for (const auto& [loc, c] : st.visit_counts)
            if (c != st.visit_counts.begin()->second) all_equal = false;
        CHECK((st.sigma_f == 0.0) == all_equal);
    }
}

TEST_CASE("distinct-location count is non-decreasing and bounded by n") {
    Rng rng(99);
    std::vector<std::string> locs;
    for (int i = 0; i < 300; ++i) locs.push_back("L" + std::to_string(rng.uniform_index(30)));
    const auto tr = make_traj(locs);
    std::uint64_t prev_s = 0;
    std::unordered_set<std::string> seen;
    for (std::size_t n = 1; n <= tr.events.size(); ++n) {
        seen.insert(tr.events[n - 1].loc);
        CHECK(seen.size() >= prev_s);
        CHECK(seen.size() <= n);
        prev_s = seen.size();
    }
}
