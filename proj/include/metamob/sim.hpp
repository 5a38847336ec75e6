#pragma once

#include <functional>
#include <unordered_map>

#include "metamob/fenwick.hpp"
#include "metamob/rng.hpp"
#include "metamob/types.hpp"

namespace metamob {

enum class ModelKind { random, epr, mepr };

const char* model_name(ModelKind m);
ModelKind model_from_name(const std::string& name);

struct ActivationSpec {
    enum class Kind { always, per_agent_uniform, file };
    Kind kind = Kind::per_agent_uniform;
    double lo = 0.05;
    double hi = 1.0;
    std::string path;  // file kind: one probability per line, one per agent
};

struct SimConfig {
    ModelKind model = ModelKind::mepr;
    std::int64_t agents = 5000;
    std::int64_t locations = 20000;
    std::int64_t steps = 400;
    std::int64_t moves_per_activation = 4;
    double rho = 0.6;
    double gamma = 0.41;
    double epsilon = 1.0;
    ActivationSpec activation;
    std::optional<GridSpec> grid;  // EPR only
    double jump_exponent = 1.55;
    std::uint64_t seed = 0;
    std::int64_t rejection_cap = 32;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Global per-location visit counts with O(log S) weighted sampling over the
/// smoothed weights m_i + epsilon.
class PopularityTable {
public:
    PopularityTable(std::size_t locations, double epsilon)
        : epsilon_(epsilon), counts_(locations, 0), fen_(locations) {
        for (std::size_t i = 0; i < locations; ++i) fen_.add(i, epsilon_);
    }

    std::size_t size() const { return counts_.size(); }
    double epsilon() const { return epsilon_; }

    void increment(std::size_t i, std::int64_t delta = 1) {
        counts_[i] += delta;
        total_count_ += delta;
        fen_.add(i, double(delta));
    }

    std::int64_t count(std::size_t i) const { return counts_[i]; }
    std::int64_t total_count() const { return total_count_; }
    double weight(std::size_t i) const { return double(counts_[i]) + epsilon_; }
    double total_weight() const { return double(total_count_) + epsilon_ * double(counts_.size()); }

    /// Draw index i with probability (m_i + eps) / sum_j (m_j + eps).
    std::size_t sample(Rng& rng) const {
        const double total = total_weight();
        if (!(total > 0.0)) throw InternalError("PopularityTable: zero total weight");
        return fen_.find(rng.next_double() * total);
    }

private:
    double epsilon_;
    std::vector<std::int64_t> counts_;
    std::int64_t total_count_ = 0;
    FenwickTree fen_;
};

/// A single agent's visitation history. Locations are stored in discovery
/// order so weighted scans are deterministic.
struct AgentState {
    std::vector<std::uint32_t> locs;    // discovery order
    std::vector<std::uint32_t> counts;  // personal visit counts, same order
    std::unordered_map<std::uint32_t, std::uint32_t> slot;
    std::uint64_t total_visits = 0;     // sum of counts = moves made + 1
    std::uint32_t current = 0;
    double activity = 1.0;

    std::size_t distinct() const { return locs.size(); }

    bool has_visited(std::uint32_t loc) const { return slot.count(loc) != 0; }

    void record_visit(std::uint32_t loc) {
        auto it = slot.find(loc);
        if (it == slot.end()) {
            slot.emplace(loc, std::uint32_t(locs.size()));
            locs.push_back(loc);
            counts.push_back(1);
        } else {
            ++counts[it->second];
        }
        ++total_visits;
        current = loc;
    }
};

struct SimCounters {
    std::uint64_t explore_fallthrough = 0;   // explore drawn with nothing left to explore
    std::uint64_t rejection_fallback = 0;    // rejection cap hit, uniform-over-unvisited used
};

/// Exploration probability p_new = min(1, rho * S^-gamma).
double p_new(std::uint64_t s, double rho, double gamma);

/// Power-law displacement kernel P(dr) proportional to dr^-exponent over
/// dr in [1, max_dr], used by the grid EPR explore branch.
class GridJumpKernel {
public:
    GridJumpKernel(double exponent, std::int64_t max_dr);
    std::int64_t sample(Rng& rng) const;

private:
    std::vector<double> cdf_;
};

// Single-move transition kernels. Each returns the destination and updates
// the agent's personal history; the global table is read-only here
// (increments are applied synchronously at the end of the global step).
std::uint32_t step_random(AgentState& agent, const SimConfig& cfg, Rng& rng);
std::uint32_t step_epr(AgentState& agent, const SimConfig& cfg, const GridJumpKernel* kernel,
                       Rng& rng, SimCounters& counters);
std::uint32_t step_mepr(AgentState& agent, const PopularityTable& table, const SimConfig& cfg,
                        Rng& rng, SimCounters& counters);

using EventSink = std::function<void(const MovementEvent&)>;

struct SimStats {
    std::uint64_t events = 0;
    SimCounters counters;
    std::int64_t final_total_count = 0;  // sum of m_i when the run ended
};

/// Number of workers implied by `requested` and METAMOB_THREADS
/// (env value 0 = hardware concurrency; unset = sequential).
unsigned resolve_worker_count(unsigned requested);

class SimEngine {
public:
    explicit SimEngine(SimConfig cfg);

    /// Runs placement plus cfg.steps global steps, emitting one event per
    /// move in (step, agent index, move index) order. Identical config and
    /// seed produce identical event sequences for any worker count.
    SimStats run(const EventSink& sink, unsigned workers = 0);

    /// Test hook: identical semantics, but agents are *processed* in the
    /// given order within each step. Emission order stays canonical, so the
    /// output must be unchanged — that is the synchronous-update contract.
    SimStats run_with_processing_order(const EventSink& sink,
                                       const std::vector<std::uint32_t>& order);

    const LocationId& label(std::uint32_t loc) const { return labels_[loc]; }
    const PopularityTable& table() const { return table_; }

private:
    struct AgentMoves {
        std::vector<std::uint32_t> destinations;
    };

    void init_labels();
    void init_agents();
    void process_agent(std::uint32_t idx, AgentMoves& out, SimCounters& counters);

    SimConfig cfg_;
    std::vector<LocationId> labels_;
    std::vector<std::string> agent_names_;
    std::vector<AgentState> agents_;
    std::vector<Rng> streams_;
    PopularityTable table_;
    std::optional<GridJumpKernel> kernel_;
};

/// Convenience wrapper: run a full simulation, collecting events.
std::vector<MovementEvent> run_simulation(const SimConfig& cfg, SimStats* stats = nullptr,
                                          unsigned workers = 0);

/// Streaming variant used by the CLI.
SimStats run_simulation_to_sink(const SimConfig& cfg, const EventSink& sink,
                                unsigned workers = 0);

}  // namespace metamob
