#pragma once

#include "metamob/analysis.hpp"
#include "metamob/io.hpp"

namespace metamob {

struct AnalyzeOptions {
    std::optional<GridSpec> grid;        // enables Manhattan-based metrics
    std::optional<std::int64_t> window;  // default: 1 tick (generated), 86400 s (ingested)
    double top_fraction = 0.01;
    std::int64_t teleport_threshold = 10;
    std::string curves_dir;              // when set, per-curve CSVs are written here
    bool assume_generated = false;       // input carried a generator meta header
};

struct Report {
    // quantity name -> fit; distribution quantities carry _mle/_ols variants
    std::vector<std::pair<std::string, FitResult>> fits;
    std::vector<std::pair<std::string, double>> metrics;
    std::vector<std::string> skipped;
    std::vector<std::string> warnings;
    std::vector<std::pair<std::string, std::uint64_t>> excluded;
    std::int64_t window = 1;
    std::uint64_t agents = 0;
    std::uint64_t events = 0;
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;

    const FitResult* find_fit(const std::string& name) const;
    std::optional<double> find_metric(const std::string& name) const;

    /// Deterministic serialization: fixed key order, 17-significant-digit reals.
    std::string to_json() const;
};

/// Run every analysis that applies to the inputs. When `net` is null a
/// network is built from the trajectories (undirected, agent-deduplicated
/// weights). Grid-only metrics are skipped (and listed) without grid bounds.
Report analyze_all(const TrajectoryMap& trajs, const MobilityNetwork* net,
                   const AnalyzeOptions& options);

}  // namespace metamob
