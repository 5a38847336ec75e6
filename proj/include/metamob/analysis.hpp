#pragma once

#include "metamob/network.hpp"
#include "metamob/types.hpp"

namespace metamob {

/// Geometric (base-2) binned curve: canonical centers 2^(i+1/2), arithmetic
/// mean of y per bin. Every nonempty bin is kept, so counts sum to the
/// sample size; reporting layers filter by count.
struct BinnedCurve {
    std::vector<double> centers;
    std::vector<double> values;
    std::vector<std::uint64_t> counts;

    std::size_t size() const { return centers.size(); }
};

BinnedCurve bin_geometric(const std::vector<std::pair<double, double>>& samples);

/// Clauset-style power-law fit: xmin scanned by KS distance, alpha by MLE
/// (continuous closed form, or discrete zeta-based likelihood), standard
/// error (alpha-1)/sqrt(n). Throws DataError on degenerate input or when no
/// candidate xmin keeps >= 10 tail samples.
FitResult fit_powerlaw_mle(const std::vector<double>& samples, bool discrete,
                           Quantity quantity = Quantity::generic);

/// Binned-regression estimate of the same exponent: log-binned histogram
/// densities, OLS slope. The side-by-side companion of fit_powerlaw_mle.
FitResult fit_powerlaw_ols(const std::vector<double>& samples,
                           Quantity quantity = Quantity::generic);

/// OLS on (ln x, ln y) after base-2 geometric binning with log-space (i.e.
/// geometric-mean) bin averages, which keeps noiseless power laws exact.
/// Requires >= 3 distinct x values and strictly positive coordinates.
FitResult fit_loglog_ols(const std::vector<std::pair<double, double>>& pairs,
                         Quantity quantity = Quantity::generic);

struct DistributionFit {
    std::vector<double> samples;
    FitResult mle;
    std::optional<FitResult> ols;  // binned regression needs >= 3 populated bins
};

/// Per-node visitor counts and their power-law fits.
DistributionFit visitor_distribution(const MobilityNetwork& net);

struct ExplorationCurve {
    BinnedCurve curve;            // x = moves n, y = mean distinct locations S(n)
    std::optional<FitResult> fit; // mu; absent when fewer than 3 fit points exist
};

ExplorationCurve exploration_curve(const TrajectoryMap& trajs);

struct RankFrequencyResult {
    std::vector<double> mean_fraction;       // index r -> mean visit share of rank r+1
    std::vector<std::uint64_t> agents_at_rank;
    std::optional<FitResult> fit;            // alpha
    std::uint64_t excluded_single_location = 0;
};

RankFrequencyResult rank_frequency(const TrajectoryMap& trajs);

struct FluctuationResult {
    std::vector<std::pair<double, double>> points;  // (f_mean, sigma_f) per agent
    std::optional<FitResult> fit;                   // beta
    std::uint64_t excluded_zero_sigma = 0;
};

FluctuationResult fluctuation_scaling(const std::vector<AgentStats>& stats);

struct GammaEstimate {
    BinnedCurve curve;            // x = S before the move, y = empirical p_new
    std::optional<FitResult> fit; // exponent = gamma (positive)
    std::uint64_t opportunities = 0;
};

GammaEstimate estimate_gamma(const TrajectoryMap& trajs);

struct PreferentialResult {
    std::vector<std::pair<double, double>> pairs;  // (popularity share, next-window share)
    std::optional<FitResult> fit;
    std::uint64_t boundaries = 0;
    std::uint64_t zero_dropped = 0;
};

PreferentialResult preferential_check(const TrajectoryMap& trajs, std::int64_t window);

/// Mean absolute difference Gini; values must be non-negative, not all zero.
double gini(const std::vector<double>& values);

struct ReturnProbabilityResult {
    std::vector<std::pair<std::int64_t, double>> per_window;  // (window index, return fraction)
    std::vector<std::uint64_t> window_moves;
    double overall = 0.0;  // fraction of moves to locations the agent had seen before
    std::uint64_t total_moves = 0;
};

ReturnProbabilityResult return_probability(const TrajectoryMap& trajs, std::int64_t window);

/// Self-transition share of all transitions.
double retention_rate(const TrajectoryMap& trajs);

/// Manhattan jump histogram over consecutive grid-form events.
std::map<std::int64_t, std::uint64_t> manhattan_jump_histogram(const TrajectoryMap& trajs);

/// Fraction of moves with Manhattan displacement greater than the threshold.
double teleport_fraction(const TrajectoryMap& trajs, std::int64_t threshold = 10);

/// Share of all visitors held by the top ceil(fraction * nodes) nodes.
double top_share(const MobilityNetwork& net, double fraction);

struct RankedDistanceResult {
    // stratum lower bound on S (base-2), rank k, mean Manhattan distance, samples
    struct Row {
        std::uint64_t stratum_lo;
        std::uint64_t rank;
        double mean_distance;
        std::uint64_t count;
    };
    std::vector<Row> rows;
    std::vector<std::pair<double, double>> pooled;  // (k, mean distance) across strata
    std::optional<FitResult> fit;                   // pooled slope
    std::uint64_t excluded_single_location = 0;
};

RankedDistanceResult ranked_distance(const TrajectoryMap& trajs, const GridSpec& grid);

// Each sub-fit is present only when its estimator's preconditions hold, so
// degenerate networks still yield the parts that make sense.
struct DegreeVisitorResult {
    std::vector<double> degrees;        // undirected-projection degree per node (>= 1)
    std::vector<double> weights;        // weight_agents per edge
    std::uint64_t isolated_nodes = 0;   // degree-0 nodes excluded from the fit
    std::optional<FitResult> degree_mle, degree_ols;
    std::optional<FitResult> weight_mle, weight_ols;
    std::optional<FitResult> beta;      // N_S ~ k^beta
    std::vector<std::pair<double, double>> k_ns_pairs;
};

DegreeVisitorResult degree_visitor_scaling(const MobilityNetwork& net);

/// Predicted exploration exponent mu = 1 / (1 + gamma).
double analytic_mu(double gamma);

}  // namespace metamob
