#include "metamob/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string_view>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "metamob/core.hpp"

namespace metamob {

namespace {

// GSL's default error handler aborts the process; report through values.
const bool g_gsl_handler_off = [] {
    gsl_set_error_handler_off();
    return true;
}();

int bin_index(double x) { return std::ilogb(x); }

double bin_center(int i) { return std::exp2(double(i) + 0.5); }

struct OlsResult {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
    double r2 = 1.0;
    std::size_t n = 0;
};

// plain least squares on already-transformed coordinates
OlsResult ols(const std::vector<std::pair<double, double>>& xy) {
    OlsResult res;
    res.n = xy.size();
    if (xy.size() < 2) throw DataError("ols: need at least 2 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [x, y] : xy) {
        sx += x;
        sy += y;
    }
    const double mx = sx / double(xy.size());
    const double my = sy / double(xy.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : xy) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0.0) throw DataError("ols: x values are collinear");
    res.slope = sxy / sxx;
    res.intercept = my - res.slope * mx;
    double sse = 0.0;
    for (const auto& [x, y] : xy) {
        const double e = y - (res.intercept + res.slope * x);
        sse += e * e;
    }
    if (xy.size() > 2) res.se_slope = std::sqrt(sse / double(xy.size() - 2) / sxx);
    res.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return res;
}

double hurwitz_zeta(double s, double q) {
    gsl_sf_result r;
    if (gsl_sf_hzeta_e(s, q, &r) != GSL_SUCCESS)
        return std::numeric_limits<double>::quiet_NaN();
    return r.val;
}

// negative log-likelihood of the discrete power law on the tail
double discrete_nll(double alpha, double xmin, double sum_log, std::size_t n) {
    const double z = hurwitz_zeta(alpha, xmin);
    if (!(z > 0.0) || !std::isfinite(z)) return std::numeric_limits<double>::infinity();
    return double(n) * std::log(z) + alpha * sum_log;
}

double discrete_mle_alpha(double xmin, double sum_log, std::size_t n) {
    // the likelihood is strictly concave in alpha; ternary search suffices
    double lo = 1.000001, hi = 20.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (discrete_nll(m1, xmin, sum_log, n) < discrete_nll(m2, xmin, sum_log, n))
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

struct TailFit {
    double alpha = 0.0;
    double ks = 1.0;
    std::size_t n = 0;
};

TailFit fit_tail_continuous(const std::vector<double>& sorted, std::size_t first) {
    TailFit fit;
    const double xmin = sorted[first];
    const std::size_t n = sorted.size() - first;
    double sum_log = 0.0;
    for (std::size_t i = first; i < sorted.size(); ++i) sum_log += std::log(sorted[i] / xmin);
    if (sum_log <= 0.0) return fit;  // all tail values equal: unusable candidate
    fit.alpha = 1.0 + double(n) / sum_log;
    fit.n = n;
    double d = 0.0;
    for (std::size_t i = first; i < sorted.size(); ++i) {
        const double f = 1.0 - std::pow(sorted[i] / xmin, 1.0 - fit.alpha);
        const double lo = double(i - first) / double(n);
        const double hi = double(i - first + 1) / double(n);
        d = std::max(d, std::max(std::abs(f - lo), std::abs(f - hi)));
    }
    fit.ks = d;
    return fit;
}

TailFit fit_tail_discrete(const std::vector<double>& sorted, std::size_t first) {
    TailFit fit;
    const double xmin = sorted[first];
    const std::size_t n = sorted.size() - first;
    double sum_log = 0.0;
    bool varied = false;
    for (std::size_t i = first; i < sorted.size(); ++i) {
        sum_log += std::log(sorted[i]);
        if (sorted[i] != xmin) varied = true;
    }
    if (!varied) return fit;
    fit.alpha = discrete_mle_alpha(xmin, sum_log, n);
    fit.n = n;
    const double z0 = hurwitz_zeta(fit.alpha, xmin);
    double d = 0.0;
    std::size_t i = first;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double femp = double(j - first) / double(n);
        const double fth = 1.0 - hurwitz_zeta(fit.alpha, sorted[i] + 1.0) / z0;
        d = std::max(d, std::abs(femp - fth));
        i = j;
    }
    fit.ks = d;
    return fit;
}

std::vector<std::pair<double, double>> log_points(const BinnedCurve& curve,
                                                  std::uint64_t min_count) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (curve.counts[i] >= min_count && curve.values[i] > 0.0)
            pts.emplace_back(curve.centers[i], curve.values[i]);
    }
    return pts;
}


std::optional<FitResult> try_loglog(const std::vector<std::pair<double, double>>& pairs,
                                    Quantity quantity) {
    try {
        return fit_loglog_ols(pairs, quantity);
    } catch (const DataError&) {
        return std::nullopt;
    }
}

constexpr std::uint64_t kMinBinCount = 5;


}  // namespace

BinnedCurve bin_geometric(const std::vector<std::pair<double, double>>& samples) {
    std::map<int, std::pair<double, std::uint64_t>> acc;
    for (const auto& [x, y] : samples) {
        if (!(x > 0.0)) throw DataError("bin_geometric: x must be positive");
        auto& slot = acc[bin_index(x)];
        slot.first += y;
        ++slot.second;
    }
    BinnedCurve curve;
    for (const auto& [i, slot] : acc) {
        curve.centers.push_back(bin_center(i));
        curve.values.push_back(slot.first / double(slot.second));
        curve.counts.push_back(slot.second);
    }
    return curve;
}

FitResult fit_powerlaw_mle(const std::vector<double>& samples, bool discrete, Quantity quantity) {
    if (samples.size() < 10) throw DataError("fit_powerlaw_mle: need >= 10 samples");
    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.front() > 0.0)) throw DataError("fit_powerlaw_mle: samples must be positive");
    if (sorted.front() == sorted.back())
        throw DataError("fit_powerlaw_mle: degenerate distribution (all samples equal)");
    if (discrete) {
        for (const double x : sorted) {
            if (x != std::floor(x) || x < 1.0)
                throw DataError("fit_powerlaw_mle: discrete samples must be integers >= 1");
        }
    }

    // candidate xmin = first occurrence of each distinct value keeping a
    // tail of >= 10 samples; capped to bound the KS scan
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        if (sorted.size() - i < 10) break;
        candidates.push_back(i);
    }
    if (candidates.empty()) throw DataError("fit_powerlaw_mle: no xmin with >= 10 tail samples");
    constexpr std::size_t kMaxCandidates = 100;
    if (candidates.size() > kMaxCandidates) {
        std::vector<std::size_t> pick;
        pick.reserve(kMaxCandidates);
        for (std::size_t k = 0; k < kMaxCandidates; ++k)
            pick.push_back(candidates[k * candidates.size() / kMaxCandidates]);
        pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
        candidates.swap(pick);
    }

    TailFit best;
    double best_xmin = sorted[candidates.front()];
    bool have = false;
    for (const auto first : candidates) {
        const TailFit fit =
            discrete ? fit_tail_discrete(sorted, first) : fit_tail_continuous(sorted, first);
        if (fit.n == 0) continue;
        if (!have || fit.ks < best.ks) {
            best = fit;
            best_xmin = sorted[first];
            have = true;
        }
    }
    if (!have) throw DataError("fit_powerlaw_mle: degenerate distribution (no usable tail)");

    FitResult res;
    res.quantity = quantity;
    res.estimator = Estimator::mle;
    res.exponent = best.alpha;
    res.se = (best.alpha - 1.0) / std::sqrt(double(best.n));
    res.xmin = best_xmin;
    res.ks = best.ks;
    res.n_samples = best.n;
    return res;
}

FitResult fit_powerlaw_ols(const std::vector<double>& samples, Quantity quantity) {
    if (samples.size() < 10) throw DataError("fit_powerlaw_ols: need >= 10 samples");
    // histogram density over base-2 bins
    std::map<int, std::uint64_t> hist;
    for (const double x : samples) {
        if (!(x > 0.0)) throw DataError("fit_powerlaw_ols: samples must be positive");
        ++hist[bin_index(x)];
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& [i, count] : hist) {
        if (count < kMinBinCount) continue;
        const double width = std::exp2(double(i));  // 2^(i+1) - 2^i
        pts.emplace_back(bin_center(i), double(count) / (double(samples.size()) * width));
    }
    if (pts.size() < 3) throw DataError("fit_powerlaw_ols: fewer than 3 populated bins");
    std::vector<std::pair<double, double>> logpts;
    logpts.reserve(pts.size());
    for (const auto& [x, y] : pts) logpts.emplace_back(std::log(x), std::log(y));
    const OlsResult fit = ols(logpts);
    FitResult res;
    res.quantity = quantity;
    res.estimator = Estimator::ols;
    res.exponent = -fit.slope;
    res.se = fit.se_slope;
    res.xmin = *std::min_element(samples.begin(), samples.end());
    res.r2 = fit.r2;
    res.n_samples = samples.size();
    return res;
}

FitResult fit_loglog_ols(const std::vector<std::pair<double, double>>& pairs, Quantity quantity) {
    std::vector<double> xs;
    xs.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        if (!(x > 0.0) || !(y > 0.0))
            throw DataError("fit_loglog_ols: coordinates must be positive");
        xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.size() < 3) throw DataError("fit_loglog_ols: need >= 3 distinct x values");

    // geometric-mean binning: log-space averages keep exact power laws exact
    std::map<int, std::array<double, 3>> acc;  // sum ln x, sum ln y, count
    for (const auto& [x, y] : pairs) {
        auto& slot = acc[bin_index(x)];
        slot[0] += std::log(x);
        slot[1] += std::log(y);
        slot[2] += 1.0;
    }
    std::vector<std::pair<double, double>> logpts;
    if (acc.size() >= 3) {
        for (const auto& [i, slot] : acc)
            logpts.emplace_back(slot[0] / slot[2], slot[1] / slot[2]);
    } else {
        for (const auto& [x, y] : pairs) logpts.emplace_back(std::log(x), std::log(y));
    }
    const OlsResult fit = ols(logpts);
    FitResult res;
    res.quantity = quantity;
    res.estimator = Estimator::ols;
    res.exponent = fit.slope;
    res.se = fit.se_slope;
    res.xmin = xs.front();
    res.r2 = fit.r2;
    res.n_samples = pairs.size();
    return res;
}

DistributionFit visitor_distribution(const MobilityNetwork& net) {
    if (net.node_count() == 0) throw DataError("visitor_distribution: empty network");
    DistributionFit out;
    out.samples.reserve(net.node_count());
    for (std::uint32_t i = 0; i < net.node_count(); ++i)
        out.samples.push_back(double(net.node(i).visitors));
    std::sort(out.samples.begin(), out.samples.end());
    out.mle = fit_powerlaw_mle(out.samples, true, Quantity::visitor_alpha);
    try {
        out.ols = fit_powerlaw_ols(out.samples, Quantity::visitor_alpha);
    } catch (const DataError&) {
    }
    return out;
}

ExplorationCurve exploration_curve(const TrajectoryMap& trajs) {
    if (trajs.empty()) throw DataError("exploration_curve: no trajectories");
    std::map<int, std::pair<double, std::uint64_t>> acc;
    std::unordered_set<std::string_view> seen;
    for (const auto& [agent, traj] : trajs) {
        seen.clear();
        std::uint64_t s = 0;
        std::uint64_t n = 0;
        for (const auto& ev : traj.events) {
            if (seen.insert(ev.loc).second) ++s;
            ++n;
            auto& slot = acc[bin_index(double(n))];
            slot.first += double(s);
            ++slot.second;
        }
    }
    ExplorationCurve out;
    for (const auto& [i, slot] : acc) {
        out.curve.centers.push_back(bin_center(i));
        out.curve.values.push_back(slot.first / double(slot.second));
        out.curve.counts.push_back(slot.second);
    }
    auto pts = log_points(out.curve, kMinBinCount);
    if (pts.size() < 3) pts = log_points(out.curve, 1);
    out.fit = try_loglog(pts, Quantity::exploration_mu);
    return out;
}

namespace {

/// Personal visit counts ranked by (count desc, first visit asc).
std::vector<std::uint64_t> ranked_counts(const Trajectory& traj,
                                         std::vector<const LocationId*>* ranked_locs = nullptr) {
    std::unordered_map<std::string_view, std::uint32_t> slot;
    std::vector<std::uint64_t> counts;
    std::vector<const LocationId*> locs;
    for (const auto& ev : traj.events) {
        auto [it, inserted] = slot.emplace(ev.loc, std::uint32_t(counts.size()));
        if (inserted) {
            counts.push_back(1);
            locs.push_back(&ev.loc);
        } else {
            ++counts[it->second];
        }
    }
    std::vector<std::uint32_t> order(counts.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&counts](std::uint32_t a, std::uint32_t b) {
        return counts[a] > counts[b];  // stable: first-visit order breaks ties
    });
    std::vector<std::uint64_t> out(order.size());
    if (ranked_locs) ranked_locs->resize(order.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        out[r] = counts[order[r]];
        if (ranked_locs) (*ranked_locs)[r] = locs[order[r]];
    }
    return out;
}

}  // namespace

RankFrequencyResult rank_frequency(const TrajectoryMap& trajs) {
    RankFrequencyResult res;
    std::vector<double> sum;
    std::vector<std::uint64_t> cnt;
    for (const auto& [agent, traj] : trajs) {
        const auto counts = ranked_counts(traj);
        if (counts.size() < 2) {
            ++res.excluded_single_location;
            continue;
        }
        const double n = double(traj.events.size());
        if (counts.size() > sum.size()) {
            sum.resize(counts.size(), 0.0);
            cnt.resize(counts.size(), 0);
        }
        for (std::size_t r = 0; r < counts.size(); ++r) {
            sum[r] += double(counts[r]) / n;
            ++cnt[r];
        }
    }
    if (sum.empty()) throw DataError("rank_frequency: no agent with >= 2 locations");
    res.mean_fraction.resize(sum.size());
    res.agents_at_rank = cnt;
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t r = 0; r < sum.size(); ++r) {
        res.mean_fraction[r] = sum[r] / double(cnt[r]);
        if (cnt[r] >= kMinBinCount && res.mean_fraction[r] > 0.0)
            pairs.emplace_back(double(r + 1), res.mean_fraction[r]);
    }
    if (pairs.size() < 3)
        for (std::size_t r = 0; r < sum.size(); ++r)
            if (cnt[r] < kMinBinCount) pairs.emplace_back(double(r + 1), res.mean_fraction[r]);
    res.fit = try_loglog(pairs, Quantity::rank_frequency_alpha);
    if (res.fit) res.fit->exponent = -res.fit->exponent;  // decay exponent reported positive
    return res;
}

FluctuationResult fluctuation_scaling(const std::vector<AgentStats>& stats) {
    FluctuationResult res;
    for (const auto& st : stats) {
        if (st.sigma_f <= 0.0) {
            ++res.excluded_zero_sigma;
            continue;
        }
        res.points.emplace_back(st.f_mean, st.sigma_f);
    }
    if (res.points.size() < 3)
        throw DataError("fluctuation_scaling: need >= 3 agents with dispersion");
    res.fit = try_loglog(res.points, Quantity::fluctuation_beta);
    return res;
}

GammaEstimate estimate_gamma(const TrajectoryMap& trajs) {
    GammaEstimate res;
    std::map<int, std::pair<double, std::uint64_t>> acc;
    std::unordered_set<std::string_view> seen;
    for (const auto& [agent, traj] : trajs) {
        seen.clear();
        for (std::size_t i = 0; i < traj.events.size(); ++i) {
            if (i == 0) {
                seen.insert(traj.events[0].loc);
                continue;  // first event is initial state, not a move
            }
            const double s_before = double(seen.size());
            const bool is_new = seen.insert(traj.events[i].loc).second;
            auto& slot = acc[bin_index(s_before)];
            slot.first += is_new ? 1.0 : 0.0;
            ++slot.second;
            ++res.opportunities;
        }
    }
    if (res.opportunities < 100)
        throw DataError("estimate_gamma: need >= 100 exploration opportunities");
    for (const auto& [i, slot] : acc) {
        res.curve.centers.push_back(bin_center(i));
        res.curve.values.push_back(slot.first / double(slot.second));
        res.curve.counts.push_back(slot.second);
    }
    auto pts = log_points(res.curve, kMinBinCount);
    if (pts.size() < 3) pts = log_points(res.curve, 1);
    res.fit = try_loglog(pts, Quantity::gamma);
    if (res.fit) res.fit->exponent = -res.fit->exponent;  // p_new ~ S^-gamma
    return res;
}

PreferentialResult preferential_check(const TrajectoryMap& trajs, std::int64_t window) {
    if (window < 1) throw ConfigError("preferential_check: window must be >= 1");
    std::int64_t t_min = 0;
    bool any = false;
    for (const auto& [agent, traj] : trajs) {
        for (const auto& ev : traj.events) {
            if (!any || ev.t < t_min) t_min = ev.t;
            any = true;
        }
    }
    if (!any) throw DataError("preferential_check: no events");

    // per window: visit counts (popularity) and move counts
    std::map<std::int64_t, std::unordered_map<std::string_view, std::uint64_t>> visits, moves;
    for (const auto& [agent, traj] : trajs) {
        for (std::size_t i = 0; i < traj.events.size(); ++i) {
            const auto& ev = traj.events[i];
            const std::int64_t w = (ev.t - t_min) / window;
            ++visits[w][ev.loc];
            if (i > 0) ++moves[w][ev.loc];
        }
    }
    if (visits.size() < 2) throw DataError("preferential_check: need >= 2 time windows");

    PreferentialResult res;
    std::unordered_map<std::string_view, std::uint64_t> cumulative;
    std::uint64_t cumulative_total = 0;
    std::int64_t prev_w = visits.begin()->first;
    bool first = true;
    for (const auto& [w, wv] : visits) {
        if (!first) {
            ++res.boundaries;
            // share at end of prev window vs. move fraction in this window
            auto mv = moves.find(w);
            std::uint64_t move_total = 0;
            if (mv != moves.end())
                for (const auto& [loc, c] : mv->second) move_total += c;
            if (mv != moves.end() && move_total > 0 && cumulative_total > 0) {
                for (const auto& [loc, c] : mv->second) {
                    auto it = cumulative.find(loc);
                    if (it == cumulative.end()) {
                        ++res.zero_dropped;
                        continue;
                    }
                    res.pairs.emplace_back(double(it->second) / double(cumulative_total),
                                           double(c) / double(move_total));
                }
            }
        }
        for (const auto& [loc, c] : wv) {
            cumulative[loc] += c;
            cumulative_total += c;
        }
        prev_w = w;
        first = false;
    }
    (void)prev_w;
    if (res.pairs.size() < 3) throw DataError("preferential_check: too few popularity pairs");
    std::sort(res.pairs.begin(), res.pairs.end());  // deterministic fit input
    res.fit = try_loglog(res.pairs, Quantity::preferential_beta);
    return res;
}

double gini(const std::vector<double>& values) {
    if (values.empty()) throw DataError("gini: empty input");
    std::vector<double> v(values);
    std::sort(v.begin(), v.end());
    if (!(v.front() >= 0.0)) throw DataError("gini: values must be non-negative");
    double total = 0.0, weighted = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        total += v[i];
        weighted += double(i + 1) * v[i];
    }
    if (total <= 0.0) throw DataError("gini: all values are zero");
    const double n = double(v.size());
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

ReturnProbabilityResult return_probability(const TrajectoryMap& trajs, std::int64_t window) {
    if (window < 1) throw ConfigError("return_probability: window must be >= 1");
    std::int64_t t_min = 0, t_max = 0;
    bool any = false;
    for (const auto& [agent, traj] : trajs) {
        for (const auto& ev : traj.events) {
            if (!any) {
                t_min = t_max = ev.t;
                any = true;
            } else {
                t_min = std::min(t_min, ev.t);
                t_max = std::max(t_max, ev.t);
            }
        }
    }
    if (!any) throw DataError("return_probability: no events");
    const std::int64_t n_windows = (t_max - t_min) / window + 1;
    if (n_windows < 2) throw DataError("return_probability: trajectories span a single window");

    std::vector<std::uint64_t> window_returns(std::size_t(n_windows), 0);
    std::vector<std::uint64_t> window_moves(std::size_t(n_windows), 0);
    ReturnProbabilityResult res;
    std::unordered_map<std::string_view, std::int64_t> first_window;
    for (const auto& [agent, traj] : trajs) {
        first_window.clear();
        for (std::size_t i = 0; i < traj.events.size(); ++i) {
            const auto& ev = traj.events[i];
            const std::int64_t w = (ev.t - t_min) / window;
            if (i > 0) {
                ++res.total_moves;
                ++window_moves[std::size_t(w)];
                auto it = first_window.find(ev.loc);
                if (it != first_window.end()) {
                    res.overall += 1.0;  // seen before (any earlier event)
                    if (it->second < w) ++window_returns[std::size_t(w)];
                }
            }
            auto [it, inserted] = first_window.emplace(ev.loc, w);
            if (!inserted && w < it->second) it->second = w;
        }
    }
    res.overall = res.total_moves ? res.overall / double(res.total_moves) : 0.0;
    for (std::int64_t w = 1; w < n_windows; ++w) {
        if (window_moves[std::size_t(w)] == 0) continue;
        res.per_window.emplace_back(
            w, double(window_returns[std::size_t(w)]) / double(window_moves[std::size_t(w)]));
        res.window_moves.push_back(window_moves[std::size_t(w)]);
    }
    return res;
}

double retention_rate(const TrajectoryMap& trajs) {
    std::uint64_t self = 0, total = 0;
    for (const auto& [agent, traj] : trajs) {
        for (std::size_t i = 1; i < traj.events.size(); ++i) {
            ++total;
            if (traj.events[i].loc == traj.events[i - 1].loc) ++self;
        }
    }
    if (total == 0) throw DataError("retention_rate: no transitions");
    return double(self) / double(total);
}

std::map<std::int64_t, std::uint64_t> manhattan_jump_histogram(const TrajectoryMap& trajs) {
    std::map<std::int64_t, std::uint64_t> hist;
    for (const auto& [agent, traj] : trajs) {
        for (std::size_t i = 1; i < traj.events.size(); ++i)
            ++hist[manhattan_distance(traj.events[i - 1].loc, traj.events[i].loc)];
    }
    return hist;
}

double teleport_fraction(const TrajectoryMap& trajs, std::int64_t threshold) {
    std::uint64_t over = 0, total = 0;
    for (const auto& [agent, traj] : trajs) {
        for (std::size_t i = 1; i < traj.events.size(); ++i) {
            ++total;
            if (manhattan_distance(traj.events[i - 1].loc, traj.events[i].loc) > threshold) ++over;
        }
    }
    if (total == 0) throw DataError("teleport_fraction: no moves");
    return double(over) / double(total);
}

double top_share(const MobilityNetwork& net, double fraction) {
    if (net.node_count() == 0) throw DataError("top_share: empty network");
    if (!(fraction > 0.0) || fraction > 1.0)
        throw ConfigError("top_share: fraction must be in (0, 1]");
    std::vector<std::uint32_t> idx = net.nodes_by_label();  // label order breaks ties
    std::stable_sort(idx.begin(), idx.end(), [&net](std::uint32_t a, std::uint32_t b) {
        return net.node(a).visitors > net.node(b).visitors;
    });
    double total = 0.0;
    for (std::uint32_t i = 0; i < net.node_count(); ++i) total += double(net.node(i).visitors);
    if (total <= 0.0) throw DataError("top_share: no visitors");
    const auto k = std::size_t(std::ceil(fraction * double(net.node_count())));
    double top = 0.0;
    for (std::size_t i = 0; i < k && i < idx.size(); ++i) top += double(net.node(idx[i]).visitors);
    return top / total;
}

RankedDistanceResult ranked_distance(const TrajectoryMap& trajs, const GridSpec& grid) {
    grid.validate();
    RankedDistanceResult res;
    // (stratum, rank) -> accumulated distance, count
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::pair<double, std::uint64_t>> acc;
    for (const auto& [agent, traj] : trajs) {
        std::vector<const LocationId*> locs;
        const auto counts = ranked_counts(traj, &locs);
        if (counts.size() < 2) {
            ++res.excluded_single_location;
            continue;
        }
        const auto stratum = std::uint64_t(1) << bin_index(double(counts.size()));
        const GridCoord top = parse_grid_id(*locs[0]);
        for (std::size_t r = 1; r < locs.size(); ++r) {
            const GridCoord c = parse_grid_id(*locs[r]);
            const double d = double(std::abs(top.x - c.x) + std::abs(top.y - c.y));
            auto& slot = acc[{stratum, std::uint64_t(r + 1)}];
            slot.first += d;
            ++slot.second;
        }
    }
    if (acc.empty()) throw DataError("ranked_distance: no agent with >= 2 locations");
    std::map<std::uint64_t, std::pair<double, std::uint64_t>> pooled;
    for (const auto& [key, slot] : acc) {
        res.rows.push_back({key.first, key.second, slot.first / double(slot.second), slot.second});
        auto& p = pooled[key.second];
        p.first += slot.first;
        p.second += slot.second;
    }
    for (const auto& [rank, slot] : pooled) {
        if (slot.second >= kMinBinCount)
            res.pooled.emplace_back(double(rank), slot.first / double(slot.second));
    }
    if (res.pooled.size() < 3)
        for (const auto& [rank, slot] : pooled)
            if (slot.second < kMinBinCount)
                res.pooled.emplace_back(double(rank), slot.first / double(slot.second));
    std::sort(res.pooled.begin(), res.pooled.end());
    std::vector<std::pair<double, double>> fit_pairs;
    for (const auto& [k, d] : res.pooled)
        if (d > 0.0) fit_pairs.emplace_back(k, d);
    res.fit = try_loglog(fit_pairs, Quantity::ranked_distance_slope);
    return res;
}

DegreeVisitorResult degree_visitor_scaling(const MobilityNetwork& net) {
    if (net.node_count() == 0) throw DataError("degree_visitor_scaling: empty network");
    DegreeVisitorResult res;
    const auto degrees = net.undirected_degrees();
    for (std::uint32_t i = 0; i < net.node_count(); ++i) {
        if (degrees[i] == 0) {
            ++res.isolated_nodes;
            continue;
        }
        res.degrees.push_back(double(degrees[i]));
        res.k_ns_pairs.emplace_back(double(degrees[i]), double(net.node(i).visitors));
    }
    for (const auto& [key, info] : net.edges()) res.weights.push_back(double(info.weight_agents));
    std::sort(res.degrees.begin(), res.degrees.end());
    std::sort(res.weights.begin(), res.weights.end());
    std::sort(res.k_ns_pairs.begin(), res.k_ns_pairs.end());
    auto try_fit = [](std::optional<FitResult>& slot, auto&& fn) {
        try {
            slot = fn();
        } catch (const DataError&) {
        }
    };
    try_fit(res.degree_mle,
            [&] { return fit_powerlaw_mle(res.degrees, true, Quantity::degree_alpha); });
    try_fit(res.degree_ols, [&] { return fit_powerlaw_ols(res.degrees, Quantity::degree_alpha); });
    try_fit(res.weight_mle,
            [&] { return fit_powerlaw_mle(res.weights, true, Quantity::weight_alpha); });
    try_fit(res.weight_ols, [&] { return fit_powerlaw_ols(res.weights, Quantity::weight_alpha); });
    try_fit(res.beta,
            [&] { return fit_loglog_ols(res.k_ns_pairs, Quantity::degree_visitor_beta); });
    return res;
}

double analytic_mu(double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("analytic_mu: gamma must be >= 0");
    return 1.0 / (1.0 + gamma);
}

}  // namespace metamob
