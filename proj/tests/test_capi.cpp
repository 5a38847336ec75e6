#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "metamob.h"

namespace {

char err[512];

struct TempDir {
    std::filesystem::path path;
    TempDir() : path(std::filesystem::temp_directory_path() / "metamob_capi_test") {
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("version string") {
    CHECK(std::strcmp(mm_version(), "0.1.0") == 0);
}

TEST_CASE("config errors come back as MM_ERR_CONFIG with a message") {
    err[0] = '\0';
    CHECK(mm_simulate("{\"agents\":0}", "/tmp/never.ndjson", err, sizeof(err)) ==
          MM_ERR_CONFIG);
    CHECK(std::string(err).find("agents") != std::string::npos);

    err[0] = '\0';
    CHECK(mm_simulate("{\"mystery_knob\":1}", "/tmp/never.ndjson", err, sizeof(err)) ==
          MM_ERR_CONFIG);
    CHECK(std::string(err).find("mystery_knob") != std::string::npos);

    CHECK(mm_simulate("{}", nullptr, err, sizeof(err)) == MM_ERR_CONFIG);  // no out path
}

TEST_CASE("missing input file is a data error") {
    mm_trajset* ts = nullptr;
    CHECK(mm_trajset_read("/nonexistent/path.ndjson", nullptr, &ts, err, sizeof(err)) ==
          MM_ERR_DATA);
    CHECK(ts == nullptr);
}

TEST_CASE("full pipeline through the C surface") {
    TempDir dir;
    const std::string traj_path = dir.file("run.ndjson");
    const std::string config =
        R"({"model":"mepr","agents":60,"locations":400,"steps":25,"seed":11})";
    REQUIRE(mm_simulate(config.c_str(), traj_path.c_str(), err, sizeof(err)) == MM_OK);

    mm_trajset* ts = nullptr;
    REQUIRE(mm_trajset_read(traj_path.c_str(), nullptr, &ts, err, sizeof(err)) == MM_OK);
    CHECK(mm_trajset_generated(ts) == 1);
    CHECK(mm_trajset_agents(ts) > 0);
    CHECK(mm_trajset_events(ts) > 0);

    mm_network* net = nullptr;
    REQUIRE(mm_network_build(ts, 1, &net, err, sizeof(err)) == MM_OK);
    CHECK(mm_network_nodes(net) > 0);
    CHECK(mm_network_edges(net) > 0);
    CHECK(mm_network_transitions(net) > 0);

    const std::string edges = dir.file("net_edges.csv");
    const std::string nodes = dir.file("net_nodes.csv");
    REQUIRE(mm_network_write_csv(net, edges.c_str(), nodes.c_str(), err, sizeof(err)) == MM_OK);
    mm_network* back = nullptr;
    REQUIRE(mm_network_read_csv(edges.c_str(), nodes.c_str(), 1, &back, err, sizeof(err)) ==
            MM_OK);
    CHECK(mm_network_nodes(back) == mm_network_nodes(net));
    CHECK(mm_network_edges(back) == mm_network_edges(net));

    char* report = nullptr;
    REQUIRE(mm_analyze(ts, nullptr, nullptr, &report, err, sizeof(err)) == MM_OK);
    REQUIRE(report != nullptr);
    const auto doc = nlohmann::json::parse(report, nullptr, false);
    REQUIRE_FALSE(doc.is_discarded());
    CHECK(doc.contains("fits"));
    CHECK(doc.at("fits").contains("exploration_mu"));
    CHECK(doc.at("meta").at("window") == 1);  // generated input defaults to tick windows
    mm_free(report);

    // analysis against the prebuilt network gives the same node count
    char* report2 = nullptr;
    REQUIRE(mm_analyze(ts, back, "{\"window\":2}", &report2, err, sizeof(err)) == MM_OK);
    const auto doc2 = nlohmann::json::parse(report2);
    CHECK(doc2.at("meta").at("nodes") == mm_network_nodes(back));
    CHECK(doc2.at("meta").at("window") == 2);
    mm_free(report2);

    mm_network_free(back);
    mm_network_free(net);
    mm_trajset_free(ts);
}

TEST_CASE("randomize preserves the shape of the trajectory set") {
    TempDir dir;
    const std::string traj_path = dir.file("base.ndjson");
    REQUIRE(mm_simulate(R"({"model":"random","agents":25,"locations":120,"steps":10,"seed":3})",
                        traj_path.c_str(), err, sizeof(err)) == MM_OK);
    mm_trajset* ts = nullptr;
    REQUIRE(mm_trajset_read(traj_path.c_str(), nullptr, &ts, err, sizeof(err)) == MM_OK);

    mm_trajset* rand1 = nullptr;
    mm_trajset* rand2 = nullptr;
    REQUIRE(mm_trajset_randomize(ts, 77, &rand1, err, sizeof(err)) == MM_OK);
    REQUIRE(mm_trajset_randomize(ts, 77, &rand2, err, sizeof(err)) == MM_OK);
    CHECK(mm_trajset_agents(rand1) == mm_trajset_agents(ts));
    CHECK(mm_trajset_events(rand1) == mm_trajset_events(ts));

    const std::string out1 = dir.file("rand1.ndjson");
    const std::string out2 = dir.file("rand2.ndjson");
    REQUIRE(mm_trajset_write(rand1, out1.c_str(), err, sizeof(err)) == MM_OK);
    REQUIRE(mm_trajset_write(rand2, out2.c_str(), err, sizeof(err)) == MM_OK);
    std::ifstream f1(out1), f2(out2);
    const std::string s1((std::istreambuf_iterator<char>(f1)), {});
    const std::string s2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(s1 == s2);  // same seed, byte-identical
    CHECK_FALSE(s1.empty());

    mm_trajset_free(rand2);
    mm_trajset_free(rand1);
    mm_trajset_free(ts);
}

TEST_CASE("analyze rejects unknown option keys") {
    TempDir dir;
    const std::string traj_path = dir.file("opt.ndjson");
    REQUIRE(mm_simulate(R"({"model":"random","agents":10,"locations":50,"steps":5,"seed":1})",
                        traj_path.c_str(), err, sizeof(err)) == MM_OK);
    mm_trajset* ts = nullptr;
    REQUIRE(mm_trajset_read(traj_path.c_str(), nullptr, &ts, err, sizeof(err)) == MM_OK);
    char* report = nullptr;
    CHECK(mm_analyze(ts, nullptr, "{\"frobnicate\":1}", &report, err, sizeof(err)) ==
          MM_ERR_CONFIG);
    mm_trajset_free(ts);
}

TEST_CASE("error messages are truncated safely into small buffers") {
    char tiny[8];
    std::memset(tiny, 'x', sizeof(tiny));
    CHECK(mm_simulate("{\"agents\":0}", "/tmp/never.ndjson", tiny, sizeof(tiny)) ==
          MM_ERR_CONFIG);
    CHECK(tiny[7] == '\0');
}
