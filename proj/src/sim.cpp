#include "metamob/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace metamob {

const char* model_name(ModelKind m) {
    switch (m) {
        case ModelKind::random: return "random";
        case ModelKind::epr: return "epr";
        case ModelKind::mepr: return "mepr";
    }
    return "mepr";
}

ModelKind model_from_name(const std::string& name) {
    if (name == "random") return ModelKind::random;
    if (name == "epr") return ModelKind::epr;
    if (name == "mepr") return ModelKind::mepr;
    throw ConfigError("model: expected one of random|epr|mepr, got \"" + name + "\"");
}

void SimConfig::validate() const {
    if (agents < 1) throw ConfigError("agents: must be >= 1");
    if (locations < 2) throw ConfigError("locations: must be >= 2");
    if (steps < 0) throw ConfigError("steps: must be >= 0");
    if (moves_per_activation < 1) throw ConfigError("moves_per_activation: must be >= 1");
    if (!(rho > 0.0) || rho > 1.0) throw ConfigError("rho: must be in (0, 1]");
    if (!(gamma >= 0.0)) throw ConfigError("gamma: must be >= 0");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon: must be >= 0");
    if (rejection_cap < 1) throw ConfigError("rejection_cap: must be >= 1");
    if (grid) {
        if (model != ModelKind::epr) throw ConfigError("grid: only valid for model=epr");
        grid->validate();
        if (locations != grid->cell_count())
            throw ConfigError("locations: must equal the grid cell count (" +
                              std::to_string(grid->cell_count()) + ")");
        if (!(jump_exponent > 0.0)) throw ConfigError("jump_exponent: must be > 0");
    }
    switch (activation.kind) {
        case ActivationSpec::Kind::always:
            break;
        case ActivationSpec::Kind::per_agent_uniform:
            if (!(activation.lo > 0.0) || activation.lo > activation.hi || activation.hi > 1.0)
                throw ConfigError("activation: require 0 < lo <= hi <= 1");
            break;
        case ActivationSpec::Kind::file:
            if (activation.path.empty()) throw ConfigError("activation: file path missing");
            break;
    }
}

double p_new(std::uint64_t s, double rho, double gamma) {
    const double p = rho * std::pow(double(s), -gamma);
    return p < 1.0 ? p : 1.0;
}

GridJumpKernel::GridJumpKernel(double exponent, std::int64_t max_dr) {
    if (max_dr < 1) throw InternalError("GridJumpKernel: empty support");
    cdf_.resize(std::size_t(max_dr));
    double cum = 0.0;
    for (std::int64_t dr = 1; dr <= max_dr; ++dr) {
        cum += std::pow(double(dr), -exponent);
        cdf_[std::size_t(dr - 1)] = cum;
    }
}

std::int64_t GridJumpKernel::sample(Rng& rng) const {
    const double u = rng.next_double() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::int64_t(it - cdf_.begin()) + 1;
}

namespace {

/// Uniform draw over the locations the agent has not visited. The caller
/// guarantees at least one exists. Rejection first (visited sets are small
/// relative to the world), exact index walk when the cap runs out.
std::uint32_t uniform_unvisited(const AgentState& agent, std::uint64_t total, Rng& rng,
                                std::int64_t cap) {
    for (std::int64_t tries = 0; tries < cap; ++tries) {
        const auto i = std::uint32_t(rng.uniform_index(total));
        if (!agent.has_visited(i)) return i;
    }
    std::uint64_t r = rng.uniform_index(total - agent.distinct());
    for (std::uint64_t i = 0; i < total; ++i) {
        if (agent.has_visited(std::uint32_t(i))) continue;
        if (r == 0) return std::uint32_t(i);
        --r;
    }
    throw InternalError("uniform_unvisited: no unvisited location found");
}

/// Uniform point on the L1 ring of radius r around c (4r lattice points).
GridCoord ring_point(GridCoord c, std::int64_t r, Rng& rng) {
    const std::uint64_t k = rng.uniform_index(std::uint64_t(4 * r));
    const std::int64_t q = std::int64_t(k) / r;
    const std::int64_t j = std::int64_t(k) % r;
    std::int64_t dx = 0, dy = 0;
    switch (q) {
        case 0: dx = r - j; dy = j; break;
        case 1: dx = -j; dy = r - j; break;
        case 2: dx = -(r - j); dy = -j; break;
        default: dx = j; dy = -(r - j); break;
    }
    return GridCoord{int(c.x + dx), int(c.y + dy)};
}

}  // namespace

std::uint32_t step_random(AgentState& agent, const SimConfig& cfg, Rng& rng) {
    const auto dest = std::uint32_t(rng.uniform_index(std::uint64_t(cfg.locations)));
    agent.record_visit(dest);
    return dest;
}

std::uint32_t step_epr(AgentState& agent, const SimConfig& cfg, const GridJumpKernel* kernel,
                       Rng& rng, SimCounters& counters) {
    const auto total = std::uint64_t(cfg.locations);
    bool explore = rng.bernoulli(p_new(agent.distinct(), cfg.rho, cfg.gamma));
    if (explore && agent.distinct() >= total) {
        ++counters.explore_fallthrough;
        explore = false;
    }
    std::uint32_t dest;
    if (explore) {
        if (cfg.grid) {
            // Displacement kernel: jump dr in a random lattice direction.
            // Off-grid candidates get a fresh direction; after the cap the
            // last candidate is clamped. A landing on an already-visited
            // cell is kept (S simply does not grow that move).
            const GridSpec& g = *cfg.grid;
            const GridCoord cur = g.coord_of(agent.current);
            const std::int64_t dr = kernel->sample(rng);
            GridCoord cand = ring_point(cur, dr, rng);
            for (std::int64_t tries = 1; tries < cfg.rejection_cap && !g.contains(cand); ++tries)
                cand = ring_point(cur, dr, rng);
            if (!g.contains(cand)) cand = g.clamp(cand);
            dest = std::uint32_t(g.index_of(cand));
        } else {
            // infinite-dimensional mode
            dest = uniform_unvisited(agent, total, rng, cfg.rejection_cap);
        }
    } else {
        // preferential return on the agent's own history
        const double u = rng.next_double() * double(agent.total_visits);
        double cum = 0.0;
        std::size_t pick = agent.locs.size() - 1;
        for (std::size_t i = 0; i < agent.locs.size(); ++i) {
            cum += double(agent.counts[i]);
            if (u < cum) {
                pick = i;
                break;
            }
        }
        dest = agent.locs[pick];
    }
    agent.record_visit(dest);
    return dest;
}

std::uint32_t step_mepr(AgentState& agent, const PopularityTable& table, const SimConfig& cfg,
                        Rng& rng, SimCounters& counters) {
    const std::uint64_t total = table.size();
    bool explore = rng.bernoulli(p_new(agent.distinct(), cfg.rho, cfg.gamma));
    if (explore && agent.distinct() >= total) {
        ++counters.explore_fallthrough;
        explore = false;
    }
    std::uint32_t dest;
    if (explore) {
        // popularity-biased exploration, rejecting already-visited locations
        bool found = false;
        std::uint32_t cand = 0;
        for (std::int64_t tries = 0; tries < cfg.rejection_cap; ++tries) {
            cand = std::uint32_t(table.sample(rng));
            if (!agent.has_visited(cand)) {
                found = true;
                break;
            }
        }
        if (!found) {
            ++counters.rejection_fallback;
            cand = uniform_unvisited(agent, total, rng, cfg.rejection_cap);
        }
        dest = cand;
    } else {
        // revisit proportional to global weight restricted to the visited set
        double sum = 0.0;
        for (const auto loc : agent.locs) sum += table.weight(loc);
        const double u = rng.next_double() * sum;
        double cum = 0.0;
        std::size_t pick = agent.locs.size() - 1;
        for (std::size_t i = 0; i < agent.locs.size(); ++i) {
            cum += table.weight(agent.locs[i]);
            if (u < cum) {
                pick = i;
                break;
            }
        }
        dest = agent.locs[pick];
    }
    agent.record_visit(dest);
    return dest;
}

unsigned resolve_worker_count(unsigned requested) {
    if (requested > 0) return requested;
    const char* env = std::getenv("METAMOB_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
        throw ConfigError("METAMOB_THREADS: must be a non-negative integer");
    if (v == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw ? hw : 1;
    }
    return unsigned(v);
}

SimEngine::SimEngine(SimConfig cfg)
    : cfg_(std::move(cfg)), table_(1, 0.0) {
    cfg_.validate();
    init_labels();
    if (cfg_.grid)
        kernel_.emplace(cfg_.jump_exponent, cfg_.grid->width() + cfg_.grid->height() - 2);
    agent_names_.reserve(std::size_t(cfg_.agents));
    for (std::int64_t i = 0; i < cfg_.agents; ++i) agent_names_.push_back("a" + std::to_string(i));
}

void SimEngine::init_labels() {
    labels_.clear();
    labels_.reserve(std::size_t(cfg_.locations));
    if (cfg_.grid) {
        for (std::int64_t i = 0; i < cfg_.locations; ++i)
            labels_.push_back(make_grid_id(cfg_.grid->coord_of(i)));
    } else {
        for (std::int64_t i = 0; i < cfg_.locations; ++i)
            labels_.push_back("L" + std::to_string(i));
    }
}

void SimEngine::init_agents() {
    const auto n = std::size_t(cfg_.agents);
    agents_.assign(n, AgentState{});
    streams_.clear();
    streams_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) streams_.emplace_back(substream_seed(cfg_.seed, i));
    table_ = PopularityTable(std::size_t(cfg_.locations), cfg_.epsilon);

    std::vector<double> activities;
    if (cfg_.activation.kind == ActivationSpec::Kind::file) {
        std::ifstream in(cfg_.activation.path);
        if (!in) throw ConfigError("activation: cannot open file " + cfg_.activation.path);
        double p;
        while (in >> p) {
            if (!(p > 0.0) || p > 1.0)
                throw ConfigError("activation: probabilities must be in (0, 1]");
            activities.push_back(p);
        }
        if (activities.size() < n)
            throw ConfigError("activation: file has " + std::to_string(activities.size()) +
                              " probabilities, need " + std::to_string(n));
    }

    for (std::size_t i = 0; i < n; ++i) {
        AgentState& ag = agents_[i];
        Rng& rng = streams_[i];
        switch (cfg_.activation.kind) {
            case ActivationSpec::Kind::always:
                ag.activity = 1.0;
                break;
            case ActivationSpec::Kind::per_agent_uniform:
                ag.activity = rng.uniform(cfg_.activation.lo, cfg_.activation.hi);
                break;
            case ActivationSpec::Kind::file:
                ag.activity = activities[i];
                break;
        }
        // initial placement counts as a visit and seeds the popularity table
        const auto loc = std::uint32_t(rng.uniform_index(std::uint64_t(cfg_.locations)));
        ag.record_visit(loc);
        table_.increment(loc);
    }
}

void SimEngine::process_agent(std::uint32_t idx, AgentMoves& out, SimCounters& counters) {
    AgentState& ag = agents_[idx];
    Rng& rng = streams_[idx];
    if (!rng.bernoulli(ag.activity)) return;
    out.destinations.reserve(std::size_t(cfg_.moves_per_activation));
    for (std::int64_t k = 0; k < cfg_.moves_per_activation; ++k) {
        std::uint32_t dest = 0;
        switch (cfg_.model) {
            case ModelKind::random:
                dest = step_random(ag, cfg_, rng);
                break;
            case ModelKind::epr:
                dest = step_epr(ag, cfg_, kernel_ ? &*kernel_ : nullptr, rng, counters);
                break;
            case ModelKind::mepr:
                dest = step_mepr(ag, table_, cfg_, rng, counters);
                break;
        }
        out.destinations.push_back(dest);
    }
}

SimStats SimEngine::run(const EventSink& sink, unsigned workers) {
    const unsigned w = resolve_worker_count(workers);
    init_agents();
    SimStats stats;
    const auto n = std::size_t(cfg_.agents);
    std::vector<AgentMoves> moves(n);

    for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
        for (auto& mv : moves) mv.destinations.clear();

        if (w <= 1 || n < 2 * w) {
            for (std::size_t i = 0; i < n; ++i)
                process_agent(std::uint32_t(i), moves[i], stats.counters);
        } else {
            // Agents read the frozen table and write only their own slot, so
            // contiguous chunks can run concurrently; counters merge in
            // chunk order.
            const std::size_t chunk = (n + w - 1) / w;
            std::vector<SimCounters> local(w);
            std::vector<std::thread> pool;
            pool.reserve(w);
            for (unsigned c = 0; c < w; ++c) {
                const std::size_t lo = c * chunk;
                const std::size_t hi = std::min(n, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back([this, &moves, &local, c, lo, hi] {
                    for (std::size_t i = lo; i < hi; ++i)
                        process_agent(std::uint32_t(i), moves[i], local[c]);
                });
            }
            for (auto& th : pool) th.join();
            for (const auto& lc : local) {
                stats.counters.explore_fallthrough += lc.explore_fallthrough;
                stats.counters.rejection_fallback += lc.rejection_fallback;
            }
        }

        // canonical emission order: (agent index, move index)
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto dest : moves[i].destinations) {
                sink(MovementEvent{agent_names_[i], t, labels_[dest]});
                ++stats.events;
            }
        }
        // synchronous popularity update at end of step
        for (std::size_t i = 0; i < n; ++i)
            for (const auto dest : moves[i].destinations) table_.increment(dest);
    }
    stats.final_total_count = table_.total_count();
    return stats;
}

SimStats SimEngine::run_with_processing_order(const EventSink& sink,
                                              const std::vector<std::uint32_t>& order) {
    init_agents();
    SimStats stats;
    const auto n = std::size_t(cfg_.agents);
    if (order.size() != n) throw InternalError("processing order size mismatch");
    std::vector<AgentMoves> moves(n);

    for (std::int64_t t = 1; t <= cfg_.steps; ++t) {
        for (auto& mv : moves) mv.destinations.clear();
        for (const auto idx : order) process_agent(idx, moves[idx], stats.counters);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto dest : moves[i].destinations) {
                sink(MovementEvent{agent_names_[i], t, labels_[dest]});
                ++stats.events;
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            for (const auto dest : moves[i].destinations) table_.increment(dest);
    }
    stats.final_total_count = table_.total_count();
    return stats;
}

std::vector<MovementEvent> run_simulation(const SimConfig& cfg, SimStats* stats,
                                          unsigned workers) {
    std::vector<MovementEvent> out;
    SimEngine engine(cfg);
    SimStats st = engine.run([&out](const MovementEvent& ev) { out.push_back(ev); }, workers);
    if (stats) *stats = st;
    return out;
}

SimStats run_simulation_to_sink(const SimConfig& cfg, const EventSink& sink, unsigned workers) {
    SimEngine engine(cfg);
    return engine.run(sink, workers);
}

}  // namespace metamob
