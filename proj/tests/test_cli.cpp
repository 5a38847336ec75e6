#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string cli = METAMOB_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "metamob_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

int run(const std::string& args, const std::string& out_file = "/dev/null",
        const std::string& err_file = "/dev/null") {
    const std::string cmd = cli + " " + args + " > " + out_file + " 2> " + err_file;
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++n;
    return n;
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("simulate --bogus-flag 1") == 1);
    CHECK(run("simulate --model pogo --agents 5 --locations 10 --steps 1 --out /dev/null") == 1);
}

TEST_CASE("missing input file exits with code 2") {
    CHECK(run("build-net --in /nonexistent.ndjson --out /tmp/x") == 2);
    CHECK(run("analyze --in /nonexistent.ndjson") == 2);
}

TEST_CASE("simulate is byte-deterministic across reruns") {
    TempDir dir;
    const auto a = dir.file("a.ndjson");
    const auto b = dir.file("b.ndjson");
    const std::string flags =
        "simulate --model mepr --agents 100 --locations 1000 --steps 50 --seed 7 --out ";
    REQUIRE(run(flags + a) == 0);
    REQUIRE(run(flags + b) == 0);
    const auto sa = slurp(a), sb = slurp(b);
    CHECK_FALSE(sa.empty());
    CHECK(sa == sb);
}

TEST_CASE("simulate with a grid emits grid-form ids") {
    TempDir dir;
    const auto out = dir.file("grid.ndjson");
    REQUIRE(run("simulate --model epr --grid -150:150,-150:150 --agents 20 --steps 10 --seed 2 "
                "--out " + out) == 0);
    std::ifstream in(out);
    std::string line;
    std::getline(in, line);  // meta
    REQUIRE(std::getline(in, line));
    const auto j = nlohmann::json::parse(line);
    const std::string loc = j.at("loc");
    CHECK(loc.find(',') != std::string::npos);
}

TEST_CASE("simulate honors a config file with flag overrides") {
    TempDir dir;
    const auto cfg_path = dir.file("cfg.json");
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({"model":"random","agents":10,"locations":60,"steps":5,"seed":1,"out":")"
            << dir.file("from_config.ndjson") << R"("})";
    }
    REQUIRE(run("simulate --config " + cfg_path) == 0);
    CHECK(fs::exists(dir.file("from_config.ndjson")));
    // flag overrides the document's seed, output goes to the flag path
    REQUIRE(run("simulate --config " + cfg_path + " --seed 2 --out " + dir.file("o2.ndjson")) ==
            0);
    CHECK(slurp(dir.file("from_config.ndjson")) != slurp(dir.file("o2.ndjson")));
}

TEST_CASE("build-net on [A,B,A]: directed has 2 edges, undirected 1") {
    TempDir dir;
    const auto traj = dir.file("aba.ndjson");
    {
        std::ofstream out(traj);
        out << R"({"agent":"u","t":0,"loc":"A"})" << "\n"
            << R"({"agent":"u","t":1,"loc":"B"})" << "\n"
            << R"({"agent":"u","t":2,"loc":"A"})" << "\n";
    }
    const auto stdout_path = dir.file("stdout.txt");
    REQUIRE(run("build-net --in " + traj + " --out " + dir.file("dir"), stdout_path) == 0);
    CHECK(line_count(dir.file("dir_edges.csv")) == 3);  // header + 2 edges
    CHECK(slurp(stdout_path).find("edges: 2") != std::string::npos);

    REQUIRE(run("build-net --in " + traj + " --undirected --out " + dir.file("und")) == 0);
    CHECK(line_count(dir.file("und_edges.csv")) == 2);  // header + 1 edge
    const auto edge_line = slurp(dir.file("und_edges.csv"));
    CHECK(edge_line.find("A,B,2,1") != std::string::npos);
}

TEST_CASE("build-net on an empty file succeeds with a warning") {
    TempDir dir;
    const auto traj = dir.file("empty.ndjson");
    std::ofstream(traj).close();
    const auto err_path = dir.file("stderr.txt");
    CHECK(run("build-net --in " + traj + " --out " + dir.file("e"), "/dev/null", err_path) == 0);
    CHECK_FALSE(slurp(err_path).empty());
    CHECK(line_count(dir.file("e_edges.csv")) == 1);  // header only
}

TEST_CASE("build-net reports malformed lines with their number") {
    TempDir dir;
    const auto traj = dir.file("bad.ndjson");
    {
        std::ofstream out(traj);
        out << R"({"agent":"u","t":0,"loc":"A"})" << "\n" << "garbage" << "\n";
    }
    const auto err_path = dir.file("stderr.txt");
    CHECK(run("build-net --in " + traj + " --out " + dir.file("x"), "/dev/null", err_path) == 2);
    CHECK(slurp(err_path).find("line 2") != std::string::npos);
}

TEST_CASE("analyze writes a report to stdout or a file and lists skips") {
    TempDir dir;
    const auto traj = dir.file("run.ndjson");
    REQUIRE(run("simulate --model mepr --agents 80 --locations 500 --steps 30 --seed 5 --out " +
                traj) == 0);
    const auto report_path = dir.file("report.json");
    const auto stdout_path = dir.file("stdout.txt");
    REQUIRE(run("analyze --in " + traj + " --report - ", stdout_path) == 0);
    const auto doc = nlohmann::json::parse(slurp(stdout_path), nullptr, false);
    REQUIRE_FALSE(doc.is_discarded());
    // non-grid synthetic data: grid metrics are listed as skipped
    bool teleport_skipped = false;
    for (const auto& s : doc.at("skipped"))
        if (s.get<std::string>().find("teleport_fraction") != std::string::npos)
            teleport_skipped = true;
    CHECK(teleport_skipped);
    CHECK(doc.at("fits").contains("exploration_mu"));

    REQUIRE(run("analyze --in " + traj + " --report " + report_path) == 0);
    CHECK(slurp(report_path) == slurp(stdout_path));

    // identical invocations produce identical reports
    const auto stdout2 = dir.file("stdout2.txt");
    REQUIRE(run("analyze --in " + traj + " --report - ", stdout2) == 0);
    CHECK(slurp(stdout_path) == slurp(stdout2));
}

TEST_CASE("analyze with grid bounds emits the grid metrics and curves") {
    TempDir dir;
    const auto traj = dir.file("grid_run.ndjson");
    REQUIRE(run("simulate --model epr --grid -30:30,-30:30 --agents 60 --steps 40 --seed 8 "
                "--out " + traj) == 0);
    const auto stdout_path = dir.file("stdout.txt");
    const auto curves = dir.file("curves");
    REQUIRE(run("analyze --in " + traj + " --grid -30:30,-30:30 --curves " + curves +
                " --report -", stdout_path) == 0);
    const auto doc = nlohmann::json::parse(slurp(stdout_path));
    CHECK(doc.at("metrics").contains("teleport_fraction"));
    CHECK(fs::exists(fs::path(curves) / "exploration.csv"));
    CHECK(fs::exists(fs::path(curves) / "jump_distance.csv"));
    std::ifstream curve(fs::path(curves) / "exploration.csv");
    std::string header;
    std::getline(curve, header);
    CHECK(header == "bin_center,value,count");
}

TEST_CASE("randomize is seed-deterministic and preserves event counts") {
    TempDir dir;
    const auto traj = dir.file("base.ndjson");
    REQUIRE(run("simulate --model mepr --agents 40 --locations 300 --steps 20 --seed 9 --out " +
                traj) == 0);
    const auto r1 = dir.file("r1.ndjson");
    const auto r2 = dir.file("r2.ndjson");
    REQUIRE(run("randomize --in " + traj + " --out " + r1 + " --seed 4") == 0);
    REQUIRE(run("randomize --in " + traj + " --out " + r2 + " --seed 4") == 0);
    CHECK(slurp(r1) == slurp(r2));
    CHECK(line_count(r1) == line_count(traj));  // meta line plus same event count
}

TEST_CASE("csv ingestion with a column map") {
    TempDir dir;
    const auto csv = dir.file("log.csv");
    {
        std::ofstream out(csv);
        out << "ts,wallet,contract\n";
        out << "100,w1,0xA\n100,w2,0xA\n200,w1,0xB\n200,w2,0xA\n";
    }
    const auto stdout_path = dir.file("stdout.txt");
    REQUIRE(run("build-net --in " + csv + " --map agent=wallet,t=ts,loc=contract --out " +
                dir.file("n"), stdout_path) == 0);
    CHECK(slurp(stdout_path).find("nodes: 2") != std::string::npos);
}

TEST_CASE("version flag prints and exits clean") {
    TempDir dir;
    const auto stdout_path = dir.file("stdout.txt");
    CHECK(run("--version", stdout_path) == 0);
    CHECK(slurp(stdout_path).find("0.1.0") != std::string::npos);
}
