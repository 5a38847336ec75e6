#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metamob {

// Exit-code contract shared by the library, the C API and the CLI:
// 0 success, 1 usage/config error, 2 input data error, 3 internal invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 1;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 2;
};

class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    static constexpr int exit_code = 3;
};

/// Opaque location identifier. Grid worlds use the canonical form "x,y"
/// with signed integer coordinates; ids compare byte-exact.
using LocationId = std::string;

struct GridCoord {
    int x = 0;
    int y = 0;

    bool operator==(const GridCoord&) const = default;
};

struct GridSpec {
    int x_min = -150;
    int x_max = 150;
    int y_min = -150;
    int y_max = 150;

    void validate() const {
        if (x_min > x_max || y_min > y_max)
            throw ConfigError("grid: min bound exceeds max bound");
    }

    std::int64_t width() const { return std::int64_t(x_max) - x_min + 1; }
    std::int64_t height() const { return std::int64_t(y_max) - y_min + 1; }
    std::int64_t cell_count() const { return width() * height(); }

    bool contains(GridCoord c) const {
        return c.x >= x_min && c.x <= x_max && c.y >= y_min && c.y <= y_max;
    }

    GridCoord clamp(GridCoord c) const {
        if (c.x < x_min) c.x = x_min;
        if (c.x > x_max) c.x = x_max;
        if (c.y < y_min) c.y = y_min;
        if (c.y > y_max) c.y = y_max;
        return c;
    }

    // Row-major cell index; callers must pass an in-bounds coordinate.
    std::int64_t index_of(GridCoord c) const {
        return (std::int64_t(c.y) - y_min) * width() + (std::int64_t(c.x) - x_min);
    }

    GridCoord coord_of(std::int64_t index) const {
        return GridCoord{int(index % width()) + x_min, int(index / width()) + y_min};
    }

    bool operator==(const GridSpec&) const = default;
};

/// Parse a grid-form id "x,y". Returns nullopt when the id is not grid-form.
std::optional<GridCoord> try_parse_grid_id(const LocationId& id);

/// Parse a grid-form id, throwing DataError naming the offending id.
GridCoord parse_grid_id(const LocationId& id);

LocationId make_grid_id(GridCoord c);

struct MovementEvent {
    std::string agent;
    std::int64_t t = 0;  // simulation tick, or epoch seconds for ingested data
    LocationId loc;

    bool operator==(const MovementEvent&) const = default;
};

struct Trajectory {
    std::string agent;
    std::vector<MovementEvent> events;  // time-ordered after canonicalization

    std::size_t size() const { return events.size(); }
};

/// Lexicographically ordered by agent id.
using TrajectoryMap = std::map<std::string, Trajectory>;

struct AgentStats {
    std::string agent;
    std::uint64_t n = 0;  // event count
    std::uint64_t s = 0;  // distinct locations
    double f_mean = 0.0;  // n / s
    double sigma_f = 0.0; // population std of per-location visit counts
    std::map<LocationId, std::uint64_t> visit_counts;
};

enum class Estimator { mle, ols };

enum class Quantity {
    generic,
    visitor_alpha,
    rank_frequency_alpha,
    exploration_mu,
    fluctuation_beta,
    gamma,
    preferential_beta,
    degree_alpha,
    weight_alpha,
    degree_visitor_beta,
    neighborhood_beta,
    ranked_distance_slope,
};

const char* quantity_name(Quantity q);

struct FitResult {
    Quantity quantity = Quantity::generic;
    Estimator estimator = Estimator::mle;
    double exponent = 0.0;
    double se = 0.0;      // standard error of the exponent
    double xmin = 1.0;    // lower cutoff the fit applies from
    std::optional<double> ks;  // KS distance (MLE fits)
    std::optional<double> r2;  // coefficient of determination (OLS fits)
    std::size_t n_samples = 0;
};

}  // namespace metamob
