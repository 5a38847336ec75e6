#include "metamob/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "metamob/core.hpp"

namespace metamob {

namespace {

std::string fit_json(const FitResult& f) {
    std::string s = "{";
    s += "\"quantity\":\"" + std::string(quantity_name(f.quantity)) + "\"";
    s += ",\"estimator\":\"" + std::string(f.estimator == Estimator::mle ? "mle" : "ols") + "\"";
    s += ",\"exponent\":" + format_real(f.exponent);
    s += ",\"stderr\":" + format_real(f.se);
    s += ",\"xmin\":" + format_real(f.xmin);
    s += ",\"ks_stat\":" + (f.ks ? format_real(*f.ks) : std::string("null"));
    s += ",\"r2\":" + (f.r2 ? format_real(*f.r2) : std::string("null"));
    s += ",\"n_samples\":" + std::to_string(f.n_samples);
    s += "}";
    return s;
}

bool is_grid_data(const TrajectoryMap& trajs) {
    for (const auto& [agent, traj] : trajs) {
        for (const auto& ev : traj.events)
            return try_parse_grid_id(ev.loc).has_value();
    }
    return false;
}

}  // namespace

const FitResult* Report::find_fit(const std::string& name) const {
    for (const auto& [key, fit] : fits)
        if (key == name) return &fit;
    return nullptr;
}

std::optional<double> Report::find_metric(const std::string& name) const {
    for (const auto& [key, value] : metrics)
        if (key == name) return value;
    return std::nullopt;
}

std::string Report::to_json() const {
    std::string s = "{\"meta\":{";
    s += "\"agents\":" + std::to_string(agents);
    s += ",\"events\":" + std::to_string(events);
    s += ",\"nodes\":" + std::to_string(nodes);
    s += ",\"edges\":" + std::to_string(edges);
    s += ",\"window\":" + std::to_string(window);
    s += "},\"fits\":{";
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (i) s += ',';
        s += "\"" + fits[i].first + "\":" + fit_json(fits[i].second);
    }
    s += "},\"metrics\":{";
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (i) s += ',';
        s += "\"" + metrics[i].first + "\":" + format_real(metrics[i].second);
    }
    s += "},\"excluded\":{";
    for (std::size_t i = 0; i < excluded.size(); ++i) {
        if (i) s += ',';
        s += "\"" + excluded[i].first + "\":" + std::to_string(excluded[i].second);
    }
    s += "},\"skipped\":[";
    for (std::size_t i = 0; i < skipped.size(); ++i) {
        if (i) s += ',';
        s += "\"" + json_escape(skipped[i]) + "\"";
    }
    s += "],\"warnings\":[";
    for (std::size_t i = 0; i < warnings.size(); ++i) {
        if (i) s += ',';
        s += "\"" + json_escape(warnings[i]) + "\"";
    }
    s += "]}";
    return s;
}

Report analyze_all(const TrajectoryMap& trajs, const MobilityNetwork* net,
                   const AnalyzeOptions& options) {
    if (trajs.empty()) throw DataError("analyze: no trajectories");
    Report rep;
    rep.agents = trajs.size();
    for (const auto& [agent, traj] : trajs) rep.events += traj.events.size();
    rep.window = options.window.value_or(options.assume_generated ? 1 : 86400);
    if (rep.window < 1) throw ConfigError("window: must be >= 1");

    const bool want_curves = !options.curves_dir.empty();
    if (want_curves) std::filesystem::create_directories(options.curves_dir);
    auto curve_path = [&](const char* name) {
        return (std::filesystem::path(options.curves_dir) / name).string();
    };

    MobilityNetwork built(false);
    if (!net) {
        built = build_network(trajs, /*directed=*/false);
        net = &built;
    }
    rep.nodes = net->node_count();
    rep.edges = net->edge_count();

    auto note_skip = [&rep](const std::string& what, const std::string& why) {
        rep.skipped.push_back(what + ": " + why);
    };
    auto check_pair = [&rep](const std::string& name, const FitResult& mle,
                             const FitResult& ols) {
        if (std::abs(mle.exponent - ols.exponent) > 0.3)
            rep.warnings.push_back(name + ": estimators disagree by more than 0.3 (mle " +
                                   format_real(mle.exponent) + ", ols " +
                                   format_real(ols.exponent) + ")");
    };

    // ---- trajectory-level quantities ----
    try {
        const auto ec = exploration_curve(trajs);
        if (ec.fit)
            rep.fits.emplace_back("exploration_mu", *ec.fit);
        else
            note_skip("exploration_mu", "too few curve points to fit");
        if (want_curves)
            write_curve_csv(curve_path("exploration.csv"), ec.curve.centers, ec.curve.values,
                            ec.curve.counts);
    } catch (const DataError& e) {
        note_skip("exploration_mu", e.what());
    }

    try {
        const auto rf = rank_frequency(trajs);
        if (rf.fit)
            rep.fits.emplace_back("rank_frequency_alpha", *rf.fit);
        else
            note_skip("rank_frequency_alpha", "too few ranks to fit");
        rep.excluded.emplace_back("rank_frequency_single_location", rf.excluded_single_location);
        if (want_curves) {
            std::vector<double> ranks(rf.mean_fraction.size());
            for (std::size_t r = 0; r < ranks.size(); ++r) ranks[r] = double(r + 1);
            write_curve_csv(curve_path("rank_frequency.csv"), ranks, rf.mean_fraction,
                            rf.agents_at_rank);
        }
    } catch (const DataError& e) {
        note_skip("rank_frequency_alpha", e.what());
    }

    try {
        std::vector<AgentStats> stats;
        stats.reserve(trajs.size());
        for (const auto& [agent, traj] : trajs) stats.push_back(agent_stats(traj));
        const auto fl = fluctuation_scaling(stats);
        if (fl.fit)
            rep.fits.emplace_back("fluctuation_beta", *fl.fit);
        else
            note_skip("fluctuation_beta", "too few points to fit");
        rep.excluded.emplace_back("fluctuation_zero_sigma", fl.excluded_zero_sigma);
        if (want_curves) {
            const auto curve = bin_geometric(fl.points);
            write_curve_csv(curve_path("fluctuation.csv"), curve.centers, curve.values,
                            curve.counts);
        }
        // mean per-agent visitation Gini over agents with at least 2 locations
        double gsum = 0.0;
        std::uint64_t gcount = 0;
        for (const auto& st : stats) {
            if (st.s < 2) continue;
            std::vector<double> counts;
            counts.reserve(st.visit_counts.size());
            for (const auto& [loc, c] : st.visit_counts) counts.push_back(double(c));
            gsum += gini(counts);
            ++gcount;
        }
        if (gcount > 0)
            rep.metrics.emplace_back("gini_visitation_mean", gsum / double(gcount));
        else
            note_skip("gini_visitation_mean", "no agent with >= 2 locations");
    } catch (const DataError& e) {
        note_skip("fluctuation_beta", e.what());
    }

    try {
        const auto ge = estimate_gamma(trajs);
        if (ge.fit)
            rep.fits.emplace_back("gamma", *ge.fit);
        else
            note_skip("gamma", "too few curve points to fit");
        rep.metrics.emplace_back("explore_opportunities", double(ge.opportunities));
        if (want_curves)
            write_curve_csv(curve_path("pnew_s.csv"), ge.curve.centers, ge.curve.values,
                            ge.curve.counts);
    } catch (const DataError& e) {
        note_skip("gamma", e.what());
    }

    try {
        const auto pc = preferential_check(trajs, rep.window);
        if (pc.fit)
            rep.fits.emplace_back("preferential_beta", *pc.fit);
        else
            note_skip("preferential_beta", "too few pairs to fit");
        rep.excluded.emplace_back("preferential_zero_dropped", pc.zero_dropped);
        if (want_curves) {
            const auto curve = bin_geometric(pc.pairs);
            write_curve_csv(curve_path("preferential.csv"), curve.centers, curve.values,
                            curve.counts);
        }
    } catch (const DataError& e) {
        note_skip("preferential_beta", e.what());
    }

    try {
        rep.metrics.emplace_back("retention_rate", retention_rate(trajs));
    } catch (const DataError& e) {
        note_skip("retention_rate", e.what());
    }

    try {
        const auto rp = return_probability(trajs, rep.window);
        rep.metrics.emplace_back("return_fraction_overall", rp.overall);
        if (want_curves) {
            std::vector<double> centers, values;
            for (const auto& [w, p] : rp.per_window) {
                centers.push_back(double(w));
                values.push_back(p);
            }
            write_curve_csv(curve_path("return_probability.csv"), centers, values,
                            rp.window_moves);
        }
    } catch (const DataError& e) {
        note_skip("return_probability", e.what());
    }

    // ---- grid-only quantities ----
    const bool grid_ids = is_grid_data(trajs);
    if (options.grid && grid_ids) {
        try {
            rep.metrics.emplace_back("teleport_fraction",
                                     teleport_fraction(trajs, options.teleport_threshold));
            rep.metrics.emplace_back("teleport_threshold", double(options.teleport_threshold));
            if (want_curves) {
                const auto hist = manhattan_jump_histogram(trajs);
                std::uint64_t total = 0;
                for (const auto& [d, c] : hist) total += c;
                std::vector<double> centers, values;
                std::vector<std::uint64_t> counts;
                for (const auto& [d, c] : hist) {
                    centers.push_back(double(d));
                    values.push_back(double(c) / double(total));
                    counts.push_back(c);
                }
                write_curve_csv(curve_path("jump_distance.csv"), centers, values, counts);
            }
        } catch (const DataError& e) {
            note_skip("teleport_fraction", e.what());
        }
        try {
            const auto rd = ranked_distance(trajs, *options.grid);
            if (rd.fit)
                rep.fits.emplace_back("ranked_distance_slope", *rd.fit);
            else
                note_skip("ranked_distance_slope", "too few ranks to fit");
            rep.excluded.emplace_back("ranked_distance_single_location",
                                      rd.excluded_single_location);
            if (want_curves) {
                std::map<double, std::uint64_t> rank_counts;
                for (const auto& row : rd.rows) rank_counts[double(row.rank)] += row.count;
                std::vector<double> centers, values;
                std::vector<std::uint64_t> counts;
                for (const auto& [k, d] : rd.pooled) {
                    centers.push_back(k);
                    values.push_back(d);
                    counts.push_back(rank_counts[k]);
                }
                write_curve_csv(curve_path("ranked_distance.csv"), centers, values, counts);
            }
        } catch (const DataError& e) {
            note_skip("ranked_distance_slope", e.what());
        }
        try {
            const auto nb = neighborhood_visitor_average(trajs, *options.grid);
            // fit y = N_S against x = mean neighbor visitors
            std::vector<std::pair<double, double>> pairs;
            pairs.reserve(nb.pairs.size());
            for (const auto& [ns, nss] : nb.pairs)
                if (nss > 0.0 && ns > 0.0) pairs.emplace_back(nss, ns);
            rep.fits.emplace_back("neighborhood_beta",
                                  fit_loglog_ols(pairs, Quantity::neighborhood_beta));
            rep.excluded.emplace_back("neighborhood_isolated", nb.omitted);
            if (want_curves) {
                const auto curve = bin_geometric(pairs);
                write_curve_csv(curve_path("neighborhood.csv"), curve.centers, curve.values,
                                curve.counts);
            }
        } catch (const DataError& e) {
            note_skip("neighborhood_beta", e.what());
        }
    } else {
        const char* why = options.grid ? "locations are not grid-form ids"
                                       : "grid bounds not provided";
        note_skip("teleport_fraction", why);
        note_skip("ranked_distance_slope", why);
        note_skip("neighborhood_beta", why);
    }

    // ---- network-level quantities ----
    try {
        const auto vd = visitor_distribution(*net);
        rep.fits.emplace_back("visitor_alpha_mle", vd.mle);
        if (vd.ols) {
            rep.fits.emplace_back("visitor_alpha_ols", *vd.ols);
            check_pair("visitor_alpha", vd.mle, *vd.ols);
        }
        if (want_curves) {
            const auto curve = bin_geometric([&] {
                std::vector<std::pair<double, double>> s;
                s.reserve(vd.samples.size());
                for (const double v : vd.samples) s.emplace_back(v, 1.0);
                return s;
            }());
            std::vector<double> density(curve.size());
            for (std::size_t i = 0; i < curve.size(); ++i)
                density[i] = double(curve.counts[i]) /
                             (double(vd.samples.size()) * curve.centers[i] / std::sqrt(2.0));
            write_curve_csv(curve_path("visitor_distribution.csv"), curve.centers, density,
                            curve.counts);
        }
    } catch (const DataError& e) {
        note_skip("visitor_alpha", e.what());
    }

    try {
        const auto dv = degree_visitor_scaling(*net);
        auto put = [&rep, &note_skip](const char* name, const std::optional<FitResult>& fit) {
            if (fit)
                rep.fits.emplace_back(name, *fit);
            else
                note_skip(name, "estimator preconditions not met");
        };
        put("degree_alpha_mle", dv.degree_mle);
        put("degree_alpha_ols", dv.degree_ols);
        put("weight_alpha_mle", dv.weight_mle);
        put("weight_alpha_ols", dv.weight_ols);
        put("degree_visitor_beta", dv.beta);
        rep.excluded.emplace_back("degree_isolated_nodes", dv.isolated_nodes);
        if (dv.degree_mle && dv.degree_ols)
            check_pair("degree_alpha", *dv.degree_mle, *dv.degree_ols);
        if (dv.weight_mle && dv.weight_ols)
            check_pair("weight_alpha", *dv.weight_mle, *dv.weight_ols);
        if (want_curves) {
            auto histogram = [](const std::vector<double>& samples) {
                std::vector<std::pair<double, double>> s;
                s.reserve(samples.size());
                for (const double v : samples) s.emplace_back(v, 1.0);
                return bin_geometric(s);
            };
            const auto dk = histogram(dv.degrees);
            std::vector<double> ddens(dk.size());
            for (std::size_t i = 0; i < dk.size(); ++i)
                ddens[i] = double(dk.counts[i]) /
                           (double(dv.degrees.size()) * dk.centers[i] / std::sqrt(2.0));
            write_curve_csv(curve_path("degree_distribution.csv"), dk.centers, ddens, dk.counts);
            const auto wk = histogram(dv.weights);
            std::vector<double> wdens(wk.size());
            for (std::size_t i = 0; i < wk.size(); ++i)
                wdens[i] = double(wk.counts[i]) /
                           (double(dv.weights.size()) * wk.centers[i] / std::sqrt(2.0));
            write_curve_csv(curve_path("weight_distribution.csv"), wk.centers, wdens, wk.counts);
            const auto kn = bin_geometric(dv.k_ns_pairs);
            write_curve_csv(curve_path("degree_visitors.csv"), kn.centers, kn.values, kn.counts);
        }
    } catch (const DataError& e) {
        note_skip("degree_alpha", e.what());
    }

    try {
        rep.metrics.emplace_back("top_share", top_share(*net, options.top_fraction));
        rep.metrics.emplace_back("top_share_fraction", options.top_fraction);
    } catch (const DataError& e) {
        note_skip("top_share", e.what());
    }

    try {
        const auto jd = contract_jump_distances(trajs, *net);
        std::vector<double> centers, values;
        std::vector<std::uint64_t> counts;
        for (const auto& [d, c] : jd.counts) {
            centers.push_back(double(d));
            values.push_back(double(c) / double(jd.total));
            counts.push_back(c);
        }
        if (jd.total > 0 && jd.counts.count(0))
            rep.metrics.emplace_back("network_jump_zero_fraction",
                                     double(jd.counts.at(0)) / double(jd.total));
        if (want_curves)
            write_curve_csv(curve_path("network_jump_distance.csv"), centers, values, counts);
    } catch (const DataError& e) {
        note_skip("network_jump_distance", e.what());
    }

    return rep;
}

}  // namespace metamob
