#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "metamob/config.hpp"
#include "metamob/core.hpp"
#include "metamob/io.hpp"

using namespace metamob;

TEST_CASE("real formatting is fixed 17-significant-digit decimal") {
    CHECK(format_real(0.6) == "0.59999999999999998");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1e300) == "1.0000000000000001e+300");
    // round-trips exactly
    for (const double v : {0.1, 3.14159, 1.0 / 3.0, 2e-7}) {
        CHECK(std::stod(format_real(v)) == v);
    }
}

TEST_CASE("event line format is canonical") {
    CHECK(event_line({"a17", 42, "L993"}) == R"({"agent":"a17","t":42,"loc":"L993"})");
    CHECK(event_line({"u", 0, "118,-10"}) == R"({"agent":"u","t":0,"loc":"118,-10"})");
    CHECK(event_line({"q\"uote", 1, "x"}) == R"({"agent":"q\"uote","t":1,"loc":"x"})");
}

TEST_CASE("ndjson round trip") {
    std::vector<MovementEvent> events = {
        {"b", 3, "L1"}, {"a", 1, "7,-2"}, {"a", 2, "L9"},
    };
    std::ostringstream out;
    write_events_ndjson(out, "", events);
    std::istringstream in(out.str());
    const auto file = read_events(in);
    CHECK_FALSE(file.has_meta);
    REQUIRE(file.events.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(file.events[i] == events[i]);
}

TEST_CASE("meta header line is detected and preserved") {
    std::istringstream in(
        "{\"meta\":{\"format\":\"metamob-trajectories\",\"timebase\":\"ticks\"}}\n"
        "{\"agent\":\"a0\",\"t\":1,\"loc\":\"L5\"}\n");
    const auto file = read_events(in);
    CHECK(file.has_meta);
    CHECK(file.events.size() == 1);
    CHECK(nlohmann::json::parse(file.meta_json).contains("meta"));
}

TEST_CASE("ndjson errors carry the 1-based line number") {
    {
        std::istringstream in("{\"agent\":\"a\",\"t\":1,\"loc\":\"L\"}\nnot json\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("line 2"), DataError);
    }
    {
        std::istringstream in(
            "{\"agent\":\"a\",\"t\":1,\"loc\":\"L\"}\n"
            "{\"agent\":\"a\",\"t\":2,\"loc\":\"L\"}\n"
            "{\"agent\":\"a\",\"t\":3}\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("line 3"), DataError);
    }
    {
        std::istringstream in("{\"agent\":\"a\",\"t\":-4,\"loc\":\"L\"}\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("line 1"), DataError);
    }
    {
        std::istringstream in("{\"agent\":\"a\",\"t\":1.5,\"loc\":\"L\"}\n");
        CHECK_THROWS_AS(read_events(in), DataError);
    }
}

TEST_CASE("empty input produces no events and no error") {
    std::istringstream in("");
    const auto file = read_events(in);
    CHECK(file.events.empty());
    CHECK_FALSE(file.has_meta);
}

TEST_CASE("csv ingestion with the default header") {
    std::istringstream in(
        "agent,t,loc\n"
        "w1,100,C9\n"
        "w2,50,\"118,-10\"\n");
    const auto file = read_events(in);
    REQUIRE(file.events.size() == 2);
    CHECK(file.events[0].agent == "w1");
    CHECK(file.events[1].loc == "118,-10");  // quoted comma survives
    CHECK(file.events[1].t == 50);
}

TEST_CASE("csv ingestion with a column mapping") {
    const auto map = parse_column_map("agent=wallet,t=ts,loc=contract");
    std::istringstream in(
        "ts,contract,wallet,extra\n"
        "1650000000,0xabc,w1,junk\n");
    const auto file = read_events(in, map);
    REQUIRE(file.events.size() == 1);
    CHECK(file.events[0].agent == "w1");
    CHECK(file.events[0].t == 1650000000);
    CHECK(file.events[0].loc == "0xabc");
}

TEST_CASE("column map parsing errors") {
    CHECK_THROWS_AS(parse_column_map("agent"), ConfigError);
    CHECK_THROWS_AS(parse_column_map("bogus=x"), ConfigError);
    CHECK_THROWS_AS(parse_column_map("agent="), ConfigError);
}

TEST_CASE("csv errors carry line numbers") {
    {
        std::istringstream in("agent,t,loc\nw1,100\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("line 2"), DataError);
    }
    {
        std::istringstream in("agent,t,loc\nw1,abc,C9\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("line 2"), DataError);
    }
    {
        std::istringstream in("agent,when,loc\nw1,1,C9\n");
        CHECK_THROWS_WITH_AS(read_events(in), doctest::Contains("t"), DataError);
    }
}

TEST_CASE("simulate_to_file writes header plus events, canonicalization round-trips") {
    SimConfig cfg;
    cfg.model = ModelKind::mepr;
    cfg.agents = 20;
    cfg.locations = 100;
    cfg.steps = 15;
    cfg.seed = 31;
    const std::string path = "roundtrip_test.ndjson";
    const auto stats = simulate_to_file(cfg, path);
    const auto mem_events = run_simulation(cfg);
    CHECK(stats.events == mem_events.size());

    const auto file = read_events_file(path);
    CHECK(file.has_meta);
    REQUIRE(file.events.size() == mem_events.size());
    for (std::size_t i = 0; i < file.events.size(); ++i)
        CHECK(file.events[i] == mem_events[i]);

    const auto from_file = canonicalize_trajectories(file.events);
    const auto from_mem = canonicalize_trajectories(mem_events);
    REQUIRE(from_file.size() == from_mem.size());
    for (const auto& [agent, traj] : from_mem) {
        const auto& other = from_file.at(agent).events;
        REQUIRE(other.size() == traj.events.size());
        for (std::size_t i = 0; i < other.size(); ++i) CHECK(other[i] == traj.events[i]);
    }

    // meta echoes the config and the run counters
    const auto meta = nlohmann::json::parse(file.meta_json).at("meta");
    CHECK(meta.at("model") == "mepr");
    CHECK(meta.at("agents") == 20);
    CHECK(meta.at("seed") == 31);
    CHECK(meta.at("events") == stats.events);
    CHECK(meta.contains("epsilon"));
    CHECK(meta.contains("explore_fallthrough"));
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::remove(path.c_str());
}

TEST_CASE("network csv round trip preserves weights and headers") {
    std::vector<MovementEvent> events = {
        {"u", 0, "118,-10"}, {"u", 1, "120,-12"}, {"u", 2, "118,-10"},
        {"v", 0, "118,-10"}, {"v", 1, "120,-12"}, {"v", 2, "120,-12"},
    };
    const auto net = build_network(canonicalize_trajectories(events), true);
    write_network_csv(net, "net_test_edges.csv", "net_test_nodes.csv");
    {
        std::ifstream in("net_test_edges.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "src,dst,weight_events,weight_agents");
    }
    {
        std::ifstream in("net_test_nodes.csv");
        std::string header;
        std::getline(in, header);
        CHECK(header == "loc,visitors,events,self_transitions,degree");
    }
    const auto back = read_network_csv("net_test_edges.csv", "net_test_nodes.csv", true);
    CHECK(back.node_count() == net.node_count());
    CHECK(back.edge_count() == net.edge_count());
    for (const auto& [key, info] : net.edges()) {
        const auto src = net.label(std::uint32_t(key >> 32));
        const auto dst = net.label(std::uint32_t(key & 0xffffffffu));
        const auto isrc = back.find(src);
        const auto idst = back.find(dst);
        REQUIRE(isrc.has_value());
        REQUIRE(idst.has_value());
        const auto& e = back.edges().at(back.canonical_key(*isrc, *idst));
        CHECK(e.weight_events == info.weight_events);
        CHECK(e.weight_agents == info.weight_agents);
    }
    for (std::uint32_t i = 0; i < net.node_count(); ++i) {
        const auto j = back.find(net.label(i));
        REQUIRE(j.has_value());
        CHECK(back.node(*j).visitors == net.node(i).visitors);
        CHECK(back.node(*j).self_transitions == net.node(i).self_transitions);
    }
    std::remove("net_test_edges.csv");
    std::remove("net_test_nodes.csv");
}

TEST_CASE("curve csv carries the fixed header") {
    write_curve_csv("curve_test.csv", {1.5, 3.0}, {0.5, 0.25}, {10, 20});
    std::ifstream in("curve_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "bin_center,value,count");
    std::getline(in, line);
    CHECK(line == "1.5,0.5,10");
    std::remove("curve_test.csv");
}

TEST_CASE("run config json parsing and validation") {
    const auto rc = run_config_from_json(
        R"({"model":"epr","agents":10,"steps":5,"grid":{"x_min":-3,"x_max":3,"y_min":-3,"y_max":3},"seed":9})");
    CHECK(rc.sim.model == ModelKind::epr);
    CHECK(rc.sim.locations == 49);  // derived from the grid
    CHECK(rc.sim.seed == 9);
    CHECK_THROWS_WITH_AS(run_config_from_json(R"({"bogus":1})"),
                         doctest::Contains("bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(run_config_from_json(R"({"agents":0})"),
                         doctest::Contains("agents"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json("not json"), ConfigError);
    CHECK_THROWS_AS(run_config_from_json(R"({"rho":"high"})"), ConfigError);
    // round trip through the serializer
    const auto again = run_config_from_json(run_config_to_json(rc));
    CHECK(again.sim.model == rc.sim.model);
    CHECK(again.sim.locations == rc.sim.locations);
    CHECK(again.sim.grid == rc.sim.grid);
}

TEST_CASE("analyze options json") {
    const auto opts = analyze_options_from_json(
        R"({"grid":{"x_min":-1,"x_max":1,"y_min":-1,"y_max":1},"window":7,"top_fraction":0.05})");
    CHECK(opts.grid.has_value());
    CHECK(opts.window == 7);
    CHECK(opts.top_fraction == doctest::Approx(0.05));
    CHECK_THROWS_AS(analyze_options_from_json(R"({"nope":1})"), ConfigError);
    CHECK_THROWS_AS(analyze_options_from_json(R"({"top_fraction":2.0})"), ConfigError);
}
