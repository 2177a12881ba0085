// Acceptance gate for the floor optimization stack. Each criterion is a
// self-contained scenario with its tolerances and runtime budget pinned in
// the code; the binary prints one line per criterion and exits nonzero if
// any fail. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "floors/auction.hpp"
#include "floors/bid_fit.hpp"
#include "floors/dates.hpp"
#include "floors/floor_index.hpp"
#include "floors/logfmt.hpp"
#include "floors/model_csv.hpp"
#include "floors/pipeline.hpp"
#include "floors/revenue.hpp"
#include "floors/rng.hpp"
#include "floors/sim.hpp"
#include "floors/validator.hpp"
#include "floors/weibull.hpp"
#include "support/synthetic.hpp"

#ifndef FLOORS_CONFIG_DIR
#define FLOORS_CONFIG_DIR "configs"
#endif

using namespace floors;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return std::string(buf);
}

PlacementBidder flat_bidder(const std::string& id, BidderType type, double shape, double scale,
                            double participation) {
    PlacementBidder b;
    b.bidder_id = id;
    b.type = type;
    b.model.link.shape_a0 = std::log(shape);
    b.model.link.scale_b0 = std::log(scale);
    b.model.participation = ParticipationModel{participation, 100000};
    return b;
}

// ---------------------------------------------------------------------------
// 1. One bidder, exponential bids (shape 1, scale 2), certain participation,
//    passback 0.4. The objective has the closed form
//      e^{-rho/2} (rho + 2) + 0.4 (1 - e^{-rho/2}),
//    from integrating b f(b) above the floor plus passback below it.

Outcome single_bidder_closed_form() {
    PlacementContext ctx;
    ctx.publisher_id = "p";
    ctx.site_id = "s";
    ctx.placement_id = "l";
    ctx.adx_rev = 0.4;
    ctx.bidders.push_back(flat_bidder("solo", BidderType::Regular, 1.0, 2.0, 1.0));

    double worst = 0.0;
    for (double rho : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double want =
            std::exp(-rho / 2.0) * (rho + 2.0) + 0.4 * (1.0 - std::exp(-rho / 2.0));
        const double got = expected_revenue(FloorVector{rho, rho}, ctx, 16, 1).value;
        worst = std::max(worst, std::abs(got - want) / want);
    }
    return {worst < 1e-3, fmt("max rel err %.2e over 5 floors (tol 1e-3)", worst)};
}

// ---------------------------------------------------------------------------
// 2. Per-bidder revenue terms from quadrature against a brute-force Monte
//    Carlo oracle drawing every bidder from its full latent distribution.

Outcome quadrature_matches_monte_carlo() {
    double worst_z = 0.0;
    int terms = 0;
    bool all_ok = true;
    for (int rep = 0; rep < 20; ++rep) {
        auto eng = make_engine(derive_seed(900, "accept2", static_cast<std::uint64_t>(rep)));
        const int n = 2 + rep % 2;
        PlacementContext ctx;
        std::vector<testsupport::OracleBidder> oracle;
        std::vector<double> floors;
        for (int i = 0; i < n; ++i) {
            const double shape = 0.9 + 1.6 * uniform01(eng);
            const double scale = 0.8 + 1.4 * uniform01(eng);
            const double floor = 1.2 * uniform01(eng);
            oracle.push_back({shape, scale, floor});
            floors.push_back(floor);
            ctx.bidders.push_back(flat_bidder(
                "b" + std::to_string(i), i % 2 ? BidderType::Rebroadcaster : BidderType::Regular,
                shape, scale, 1.0));
        }
        // The MC oracle has no upper cutoff, so run the quadrature with a
        // tail quantile tight enough that truncation error is far below the
        // MC noise floor.
        EvalOptions tight;
        tight.tail_quantile = 1.0 - 1e-8;
        RevenueEvaluator ev(ctx, 1, 1, tight);
        const std::uint32_t all = (1u << n) - 1u;
        for (int i = 0; i < n; ++i) {
            double se = 0.0;
            const double mc = testsupport::mc_bidder_revenue(
                oracle, static_cast<std::size_t>(i), 1000000,
                derive_seed(903, "mc", static_cast<std::uint64_t>(terms)), &se);
            const double quad = ev.expected_bidder_revenue(static_cast<std::size_t>(i), floors, all);
            const double z = std::abs(quad - mc) / se;
            worst_z = std::max(worst_z, z);
            ++terms;
            if (z > 3.0) all_ok = false;
        }
    }
    return {all_ok, fmt("%d bidder terms, worst |z| %.2f (limit 3 MC std errors)", terms, worst_z)};
}

// ---------------------------------------------------------------------------
// 3. The grid-then-refine optimizer against an exhaustive 60x60 grid under
//    the same common-random-numbers evaluator.

Outcome optimizer_attains_grid_max() {
    double worst_ratio = 2.0;
    for (int rep = 0; rep < 10; ++rep) {
        auto eng = make_engine(derive_seed(910, "accept3", static_cast<std::uint64_t>(rep)));
        PlacementContext ctx;
        for (int i = 0; i < 2; ++i) {
            PlacementBidder b = flat_bidder(
                "b" + std::to_string(i), i ? BidderType::Rebroadcaster : BidderType::Regular,
                0.9 + 1.6 * uniform01(eng), 0.8 + 1.4 * uniform01(eng),
                0.4 + 0.6 * uniform01(eng));
            b.model.link.shape_a1 = -0.1 + 0.5 * uniform01(eng);
            b.model.link.scale_b1 = -0.1 + 0.4 * uniform01(eng);
            ctx.bidders.push_back(b);
        }
        ctx.adx_rev = 0.6 * uniform01(eng);

        const double cap = 1.5;
        OptimizerConfig oc;
        oc.floor_cap = cap;
        oc.grid_size = 15;
        oc.mc_draws = 200;
        oc.seed = derive_seed(911, "opt", static_cast<std::uint64_t>(rep));
        const OptimizeResult res = optimize_floors(ctx, oc);

        RevenueEvaluator ev(ctx, oc.mc_draws, oc.seed);
        double grid_best = 0.0;
        for (int i = 0; i < 60; ++i) {
            for (int j = 0; j < 60; ++j) {
                const FloorVector f{cap * i / 59.0, cap * j / 59.0};
                grid_best = std::max(grid_best, ev.expected_revenue(f).value);
            }
        }
        worst_ratio = std::min(worst_ratio, ev.expected_revenue(res.floors).value / grid_best);
    }
    return {worst_ratio >= 0.995,
            fmt("10 contexts, worst optimizer/grid ratio %.4f (floor 0.995)", worst_ratio)};
}

// ---------------------------------------------------------------------------
// 4. Latent parameter recovery from left-truncated samples: shape 1.5,
//    scale 2.0, floors uniform on [0, 1], 10k observations per replication.

Outcome truncated_fit_recovery() {
    int good = 0;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        auto eng = make_engine(derive_seed(920, "accept4", static_cast<std::uint64_t>(rep)));
        std::vector<BidObservation> rows(10000);
        for (auto& r : rows) {
            r.floor_sent = uniform01(eng);
            r.bid = testsupport::truncated_weibull_sample(eng, 1.5, 2.0, r.floor_sent);
        }
        const FloorLinkModel fit = fit_bid_model(rows);
        const WeibullParams p = link_params(0.5, fit);
        const double err_shape = std::abs(p.shape - 1.5) / 1.5;
        const double err_scale = std::abs(p.scale - 2.0) / 2.0;
        if (err_shape < 0.05 && err_scale < 0.05) ++good;
        worst = std::max({worst, err_shape, err_scale});
    }
    return {good >= 18, fmt("%d/20 replications within 5%% (need 18); worst rel err %.3f", good, worst)};
}

// ---------------------------------------------------------------------------
// 5. With no passback and links that ignore the floor, raising a floor only
//    blocks sales (dR/drho_i = -rho_i f_i(rho_i) prod_j F_j(rho_i) <= 0), so
//    the optimum is at zero; the optimizer must land within one grid cell.

Outcome floors_collapse_without_passback() {
    const double cap = 1.0;
    const int grid_size = 15;
    const double cell = cap / (grid_size - 1);
    double worst = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        auto eng = make_engine(derive_seed(930, "accept5", static_cast<std::uint64_t>(rep)));
        PlacementContext ctx;
        ctx.bidders.push_back(flat_bidder("a", BidderType::Regular, 1.0 + 1.2 * uniform01(eng),
                                          0.8 + 1.2 * uniform01(eng), 0.5 + 0.5 * uniform01(eng)));
        ctx.bidders.push_back(flat_bidder("r", BidderType::Rebroadcaster,
                                          1.0 + 1.2 * uniform01(eng), 0.8 + 1.2 * uniform01(eng),
                                          0.5 + 0.5 * uniform01(eng)));
        ctx.adx_rev = 0.0;

        OptimizerConfig oc;
        oc.floor_cap = cap;
        oc.grid_size = grid_size;
        oc.mc_draws = 200;
        oc.seed = derive_seed(931, "opt", static_cast<std::uint64_t>(rep));
        const OptimizeResult res = optimize_floors(ctx, oc);
        worst = std::max({worst, res.floors.regular, res.floors.rebroadcaster});
    }
    return {worst <= cell + 1e-9,
            fmt("3 contexts, largest floor %.4f (cell %.4f)", worst, cell)};
}

// ---------------------------------------------------------------------------
// 6. Observed bids under a fixed floor: nothing below the floor, and a
//    higher floor strictly raises the mean observed bid while strictly
//    lowering the response count.

Outcome floored_bids_shift() {
    SimConfig cfg;
    cfg.requests_per_day = 150000;
    cfg.days = 1;
    cfg.seed = 33;
    cfg.start_date = CivilDate{2026, 8, 10};
    cfg.shares = BucketShares{1.0, 0.0, 0.0};
    SimPlacement pl;
    pl.key = PlacementKey{"pubX", "site", "slot"};
    pl.weight = 1.0;
    pl.adx_mean = 0.4;
    pl.adx_sigma = 0.0;
    pl.training_cap = 2.0;
    cfg.placements.push_back(pl);
    cfg.agents.push_back(DspAgentSpec{"dsp_a", BidderType::Regular, 0.1, 0.5, 0.7, 0.6});
    cfg.agents.push_back(DspAgentSpec{"reb_b", BidderType::Rebroadcaster, -0.1, 0.45, 0.65, 0.5});

    struct Stats {
        long responses = 0;
        double sum = 0.0;
        double worst_below = 0.0;  // most negative bid - floor seen
    };
    auto run = [&cfg](double floor) {
        Stats s;
        simulate_period(cfg, static_policy(FloorVector{floor, floor}),
                        [&s](const AuctionLogRecord& r) {
                            if (!r.bid) return;
                            s.worst_below = std::min(s.worst_below, *r.bid - r.floor_sent);
                            ++s.responses;
                            s.sum += *r.bid;
                        });
        return s;
    };
    const Stats lo = run(0.5);
    const Stats hi = run(1.10);
    const double mean_lo = lo.sum / lo.responses;
    const double mean_hi = hi.sum / hi.responses;
    const bool none_below = lo.worst_below >= -1e-12 && hi.worst_below >= -1e-12;
    const bool pass = none_below && mean_hi > mean_lo && hi.responses < lo.responses;
    return {pass, fmt("mean bid %.3f->%.3f, responses %ld->%ld, none below floor: %s", mean_lo,
                      mean_hi, lo.responses, hi.responses, none_below ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 7. Full-loop A/B on the reference marketplace: fit bid models from
//    randomized-floor exploration logs, optimize floors, and serve them to
//    the dynamic bucket against the static passback-value floors in the
//    disabled bucket. The lift table must show more total revenue, fewer
//    exchange impressions at a higher eCPM, and more passback impressions,
//    each at twice its bootstrap standard error.

double shape_from_cv(double cv) {
    // Inverts sd/mean for a Weibull via log E[W^2]/E[W]^2 = lgamma terms.
    const double target = std::log1p(cv * cv);
    auto g = [](double k) {
        return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k);
    };
    double lo = 0.3, hi = 12.0;
    if (g(lo) < target) return lo;
    if (g(hi) > target) return hi;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// E[W | W >= rho] for Weibull(k, lambda), by integrating the conditional
// survival function.
double conditional_mean_above(double k, double lambda, double rho) {
    const double srho = std::pow(rho / lambda, k);
    double acc = 0.0;
    const int n = 4000;
    const double hi = rho + 12.0 * lambda;
    const double h = (hi - rho) / n;
    double prev = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double x = rho + h * i;
        const double cur = std::exp(srho - std::pow(x / lambda, k));
        acc += 0.5 * (prev + cur) * h;
        prev = cur;
    }
    return rho + acc;
}

struct ExploreCohort {
    std::string bidder_id;
    BidderType type = BidderType::Regular;
    std::vector<std::pair<double, std::optional<double>>> rows;  // floor, bid
};

// Reference-model fit for one bidder from randomized-floor logs: bucket the
// floors into equal-count bins, reconstruct per-bin Weibull parameters from
// the response rate (survival at the floor) and the mean observed bid
// (conditional mean above it), then regress log shape and log scale on the
// floor. Response-rate decay with the floor is what makes the fitted scale
// grow with the floor.
FloorLinkModel reference_link(ExploreCohort& c, double* participation_out) {
    constexpr int kBins = 8;
    constexpr long kMinResponses = 50;
    std::sort(c.rows.begin(), c.rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    const std::size_t n = c.rows.size();

    struct Bin {
        double floor_sum = 0.0;
        long requests = 0;
        long responses = 0;
        double bid_sum = 0.0, bid_sq = 0.0;
    };
    std::vector<Bin> bins(kBins);
    for (std::size_t i = 0; i < n; ++i) {
        Bin& b = bins[std::min<std::size_t>(i * kBins / n, kBins - 1)];
        b.floor_sum += c.rows[i].first;
        ++b.requests;
        if (c.rows[i].second) {
            ++b.responses;
            b.bid_sum += *c.rows[i].second;
            b.bid_sq += *c.rows[i].second * *c.rows[i].second;
        }
    }
    const double base_rate =
        bins[0].requests > 0 ? static_cast<double>(bins[0].responses) / bins[0].requests : 0.0;
    *participation_out = base_rate;

    std::vector<double> xs, ln_shape, ln_scale, weight;
    for (const Bin& b : bins) {
        if (b.responses < kMinResponses || b.requests == 0) continue;
        const double rho = b.floor_sum / b.requests;
        const double rate = static_cast<double>(b.responses) / b.requests;
        const double m = b.bid_sum / b.responses;
        const double sd =
            std::sqrt(std::max(b.bid_sq / b.responses - m * m, 1e-8));
        const double survival = std::min(rate / std::max(base_rate, 1e-9), 1.0);

        double k, lambda;
        if (survival > 0.95 || rho < 0.05) {
            // Truncation negligible: plain method of moments.
            k = shape_from_cv(sd / m);
            lambda = m / std::exp(std::lgamma(1.0 + 1.0 / k));
        } else {
            // Match survival at the floor and the conditional mean above it.
            auto mean_at = [&](double kk) {
                return conditional_mean_above(kk, rho * std::pow(-std::log(survival), -1.0 / kk),
                                              rho);
            };
            double klo = 0.35, khi = 12.0;
            if (mean_at(klo) < m) {
                k = klo;
            } else if (mean_at(khi) > m) {
                k = khi;
            } else {
                for (int i = 0; i < 50; ++i) {
                    const double mid = 0.5 * (klo + khi);
                    (mean_at(mid) > m ? klo : khi) = mid;
                }
                k = 0.5 * (klo + khi);
            }
            lambda = rho * std::pow(-std::log(survival), -1.0 / k);
        }
        xs.push_back(rho);
        ln_shape.push_back(std::log(k));
        ln_scale.push_back(std::log(lambda));
        weight.push_back(static_cast<double>(b.responses));
    }

    FloorLinkModel link;
    link.diagnostics.sample_count = static_cast<long>(n);
    if (xs.size() < 2) {
        link.shape_a0 = ln_shape.empty() ? 0.0 : ln_shape[0];
        link.scale_b0 = ln_scale.empty() ? 0.0 : ln_scale[0];
        return link;
    }
    auto weighted_fit = [&](const std::vector<double>& y, double* c0, double* c1) {
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sw += weight[i];
            sx += weight[i] * xs[i];
            sy += weight[i] * y[i];
            sxx += weight[i] * xs[i] * xs[i];
            sxy += weight[i] * xs[i] * y[i];
        }
        const double det = sw * sxx - sx * sx;
        *c1 = det > 1e-12 ? (sw * sxy - sx * sy) / det : 0.0;
        *c0 = (sy - *c1 * sx) / sw;
    };
    weighted_fit(ln_shape, &link.shape_a0, &link.shape_a1);
    weighted_fit(ln_scale, &link.scale_b0, &link.scale_b1);
    link.diagnostics.converged = true;
    link.diagnostics.floor_dependent = true;
    return link;
}

Outcome dynamic_vs_static_lift() {
    const std::string path = std::string(FLOORS_CONFIG_DIR) + "/reference_sim.conf";
    const SimConfig cfg = load_sim_config_file(path);
    if (cfg.placements.size() != 3 || cfg.agents.size() != 4 ||
        cfg.requests_per_day * cfg.days != 1000000) {
        return {false, "reference config must be 3 placements, 4 agents, 1e6 requests"};
    }

    // Exploration pass: randomized floors only, separate seed stream.
    SimConfig explore = cfg;
    explore.shares = BucketShares{0.0, 0.0, 0.5};
    explore.requests_per_day = 400000;
    explore.days = 1;
    explore.seed = cfg.seed + 1000;

    struct PlacementAgg {
        std::map<std::string, ExploreCohort> cohorts;
        double adx_sum = 0.0;
        long adx_n = 0;
        double max_floor = 0.0;
        std::string last_ts;
    };
    std::map<PlacementKey, PlacementAgg> agg;
    simulate_period(explore, adx_static_policy(explore), [&agg](const AuctionLogRecord& r) {
        if (r.bucket != Bucket::Training) return;
        PlacementAgg& pa = agg[PlacementKey{r.publisher_id, r.site_id, r.placement_id}];
        if (pa.last_ts != r.ts) {
            pa.last_ts = r.ts;
            if (r.settled_origin == SettledOrigin::Adx) {
                pa.adx_sum += r.settled_revenue;
                ++pa.adx_n;
            }
        }
        pa.max_floor = std::max(pa.max_floor, r.floor_sent);
        ExploreCohort& c = pa.cohorts[r.bidder_id];
        if (c.bidder_id.empty()) {
            c.bidder_id = r.bidder_id;
            c.type = r.bidder_type;
        }
        c.rows.emplace_back(r.floor_sent, r.bid);
    });

    FloorModel model;
    for (auto& [key, pa] : agg) {
        PlacementContext ctx;
        ctx.publisher_id = key.publisher_id;
        ctx.site_id = key.site_id;
        ctx.placement_id = key.placement_id;
        ctx.adx_rev = pa.adx_n > 0 ? pa.adx_sum / pa.adx_n : 0.0;
        for (auto& [id, cohort] : pa.cohorts) {
            PlacementBidder b;
            b.bidder_id = cohort.bidder_id;
            b.type = cohort.type;
            double participation = 0.0;
            b.model.link = reference_link(cohort, &participation);
            b.model.participation =
                ParticipationModel{participation, static_cast<long>(cohort.rows.size())};
            ctx.bidders.push_back(std::move(b));
        }
        OptimizerConfig oc;
        oc.floor_cap = pa.max_floor;
        oc.grid_size = 15;
        oc.mc_draws = 200;
        oc.seed = derive_seed(cfg.seed, key.display());
        const OptimizeResult res = optimize_floors(ctx, oc);
        FloorModelRow row;
        row.publisher_id = key.publisher_id;
        row.site_id = key.site_id;
        row.placement_id = key.placement_id;
        row.regular = quantize_floor(res.floors.regular, pa.max_floor);
        row.rebroadcaster = quantize_floor(res.floors.rebroadcaster, pa.max_floor);
        model.rows.push_back(row);
    }
    model.version = model_version_of(emit_model_csv(model.rows));

    auto idx = std::make_shared<const FloorIndex>(FloorIndex::from_model(model, 0.0));
    LiftAccumulator acc;
    simulate_period(cfg, index_policy(idx), [&acc](const AuctionLogRecord& r) { acc.add(r); });
    const LiftReport rep = acc.report(200, 7);

    const bool total_up = rep.total.revenue > 0 && rep.total.revenue > 2 * rep.total.revenue_se;
    const bool yahoox_impr_down =
        rep.yahoox.impressions < 0 && -rep.yahoox.impressions > 2 * rep.yahoox.impressions_se;
    const bool yahoox_ecpm_up = rep.yahoox.ecpm > 0 && rep.yahoox.ecpm > 2 * rep.yahoox.ecpm_se;
    const bool adx_impr_up =
        rep.adx.impressions > 0 && rep.adx.impressions > 2 * rep.adx.impressions_se;
    const bool pass = total_up && yahoox_impr_down && yahoox_ecpm_up && adx_impr_up;
    return {pass, fmt("total rev %+.2f%%%s, yahoox impr %+.2f%%%s, yahoox ecpm %+.2f%%%s, "
                      "adx impr %+.2f%%%s (each vs 2 SE)",
                      100 * rep.total.revenue, total_up ? "" : "!",
                      100 * rep.yahoox.impressions, yahoox_impr_down ? "" : "!",
                      100 * rep.yahoox.ecpm, yahoox_ecpm_up ? "" : "!",
                      100 * rep.adx.impressions, adx_impr_up ? "" : "!")};
}

// ---------------------------------------------------------------------------
// 8. A floor ten times outside a stable history must be fenced out and the
//    deployment rejected in the journal; a model matching the history passes.

Outcome outlier_gate_blocks() {
    std::vector<FloorModel> history;
    for (int m = 0; m < 14; ++m) {
        FloorModel fm;
        for (int i = 0; i < 6; ++i) {
            FloorModelRow row;
            row.publisher_id = "net";
            row.site_id = "s";
            row.placement_id = "pl" + std::to_string(i);
            const double jitter = 0.01 * ((2 * m + i) % 5 - 2);
            row.regular = 0.5 + 0.1 * i + jitter;
            row.rebroadcaster = 0.7 + 0.1 * i + jitter;
            fm.rows.push_back(row);
        }
        fm.version = model_version_of(emit_model_csv(fm.rows));
        history.push_back(std::move(fm));
    }

    FloorModel good = history.back();
    FloorModel bad = good;
    bad.rows[2].regular *= 10.0;
    bad.version = model_version_of(emit_model_csv(bad.rows));

    const ValidatorConfig vc{14, 1.5};
    const ValidationReport bad_report = validate_model(bad, history, vc);
    const ValidationReport good_report = validate_model(good, history, vc);

    const std::string dir = testsupport::scratch_dir("accept8");
    DeploymentJournal journal(dir + "/journal.ndjson");
    journal.record({"2026-08-20T00:00:00Z", DeployAction::Deploy, history.back().version,
                    "scheduled rollout"});
    const bool blocked =
        bad_report.status == ValidationStatus::Fail && !bad_report.outliers.empty();
    if (blocked) {
        journal.record(
            {"2026-08-21T00:00:00Z", DeployAction::Reject, bad.version, "fence violation"});
    }
    bool outlier_named = false;
    for (const auto& o : bad_report.outliers) {
        if (o.placement_id == "pl2" && o.field == "Regular" &&
            (o.value < o.fences.low || o.value > o.fences.high)) {
            outlier_named = true;
        }
    }
    const bool served_intact =
        journal.current_deployed_version().value_or("") == history.back().version;
    const bool clean_pass =
        good_report.status == ValidationStatus::Pass && good_report.outliers.empty();
    const bool pass = blocked && outlier_named && served_intact && clean_pass;
    return {pass, fmt("outlier blocked: %s, reject journaled over deploy: %s, unchanged passes: %s",
                      blocked && outlier_named ? "yes" : "NO", served_intact ? "yes" : "NO",
                      clean_pass ? "yes" : "NO")};
}

// ---------------------------------------------------------------------------
// 9. Lookup answers, the fallback ladder, p99 latency on a 100k-row index,
//    and version consistency under concurrent swaps.

Outcome lookup_correct_and_fast() {
    FloorModel m;
    auto add = [&m](const char* p, const char* s, const char* l, double reg, double reb) {
        FloorModelRow row;
        row.publisher_id = p;
        row.site_id = s;
        row.placement_id = l;
        row.regular = reg;
        row.rebroadcaster = reb;
        m.rows.push_back(row);
    };
    add("ABCD", "KKKK", "AAAA", 0.88, 1.15);
    add("ABCD", "KKKK", "BBBB", 1.34, 1.58);
    add("ABCD", "HHHH", "CCCC", 0.57, 0.75);
    m.version = model_version_of(emit_model_csv(m.rows));
    const FloorIndex idx = FloorIndex::from_model(m, 0.25);

    auto exact = [&idx, &m](const char* p, const char* s, const char* l, BidderType t, double want,
                            MatchLevel level) {
        const FloorAnswer a = idx.lookup(FloorQuery{p, s, l, t});
        return std::abs(a.floor - want) < 1e-12 && a.match_level == level &&
               a.model_version == m.version;
    };
    bool rows_ok = exact("ABCD", "KKKK", "AAAA", BidderType::Regular, 0.88, MatchLevel::Placement) &&
                   exact("ABCD", "KKKK", "AAAA", BidderType::Rebroadcaster, 1.15, MatchLevel::Placement) &&
                   exact("ABCD", "KKKK", "BBBB", BidderType::Regular, 1.34, MatchLevel::Placement) &&
                   exact("ABCD", "KKKK", "BBBB", BidderType::Rebroadcaster, 1.58, MatchLevel::Placement) &&
                   exact("ABCD", "HHHH", "CCCC", BidderType::Regular, 0.57, MatchLevel::Placement) &&
                   exact("ABCD", "HHHH", "CCCC", BidderType::Rebroadcaster, 0.75, MatchLevel::Placement);
    // Unknown placement: site median. Unknown site: publisher median of site
    // medians. Unknown publisher: the global default.
    rows_ok = rows_ok &&
              exact("ABCD", "KKKK", "ZZZZ", BidderType::Regular, (0.88 + 1.34) / 2, MatchLevel::Site) &&
              exact("ABCD", "KKKK", "ZZZZ", BidderType::Rebroadcaster, (1.15 + 1.58) / 2, MatchLevel::Site) &&
              exact("ABCD", "QQQQ", "AAAA", BidderType::Regular, ((0.88 + 1.34) / 2 + 0.57) / 2, MatchLevel::Publisher) &&
              exact("ABCD", "QQQQ", "AAAA", BidderType::Rebroadcaster, ((1.15 + 1.58) / 2 + 0.75) / 2, MatchLevel::Publisher) &&
              exact("NOPE", "KKKK", "AAAA", BidderType::Regular, 0.25, MatchLevel::Global) &&
              exact("NOPE", "KKKK", "AAAA", BidderType::Rebroadcaster, 0.25, MatchLevel::Global);

    // p99 latency over a 100-publisher x 10-site x 100-placement model.
    FloorModel big;
    big.version = "latency-bench";
    big.rows.reserve(100000);
    for (int p = 0; p < 100; ++p) {
        for (int s = 0; s < 10; ++s) {
            for (int l = 0; l < 100; ++l) {
                FloorModelRow row;
                row.publisher_id = "p" + std::to_string(p);
                row.site_id = "s" + std::to_string(s);
                row.placement_id = "pl" + std::to_string(l);
                row.regular = 0.1 + ((7 * p + 3 * s + l) % 190) / 100.0;
                row.rebroadcaster = row.regular + 0.1;
                big.rows.push_back(std::move(row));
            }
        }
    }
    const FloorIndex big_idx = FloorIndex::from_model(big, 0.2);
    auto eng = make_engine(derive_seed(940, "queries"));
    std::vector<FloorQuery> queries;
    queries.reserve(50000);
    for (int i = 0; i < 50000; ++i) {
        queries.push_back(FloorQuery{
            "p" + std::to_string(static_cast<int>(uniform01(eng) * 100)),
            "s" + std::to_string(static_cast<int>(uniform01(eng) * 10)),
            "pl" + std::to_string(static_cast<int>(uniform01(eng) * 100)),
            i % 2 ? BidderType::Rebroadcaster : BidderType::Regular});
    }
    std::vector<double> micros;
    micros.reserve(queries.size());
    double checksum = 0.0;
    for (const FloorQuery& q : queries) {
        const auto t0 = std::chrono::steady_clock::now();
        checksum += big_idx.lookup(q).floor;
        const auto t1 = std::chrono::steady_clock::now();
        micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    std::nth_element(micros.begin(), micros.begin() + micros.size() * 99 / 100, micros.end());
    const double p99 = micros[micros.size() * 99 / 100];
    const bool fast = p99 < 100.0 && checksum > 0.0;

    // Swap stress: every answer must pair the floor with the version of the
    // model it came from, across 100 hot swaps under 8 readers.
    std::map<std::string, double> expected;
    std::vector<std::shared_ptr<const FloorIndex>> versions;
    for (int k = 0; k < 100; ++k) {
        FloorModel vm;
        FloorModelRow row;
        row.publisher_id = "PP";
        row.site_id = "SS";
        row.placement_id = "LL";
        row.regular = 0.01 * (k + 1);
        row.rebroadcaster = 0.02 * (k + 1);
        vm.rows.push_back(row);
        vm.version = model_version_of(emit_model_csv(vm.rows));
        expected[vm.version] = row.regular;
        versions.push_back(std::make_shared<const FloorIndex>(FloorIndex::from_model(vm, 0.0)));
    }
    IndexHolder holder;
    holder.swap(versions[0]);
    std::atomic<bool> done{false};
    std::atomic<long> reads{0};
    std::atomic<long> torn{0};
    std::vector<std::thread> readers;
    for (int t = 0; t < 8; ++t) {
        readers.emplace_back([&] {
            const FloorQuery q{"PP", "SS", "LL", BidderType::Regular};
            while (!done.load(std::memory_order_relaxed)) {
                const FloorAnswer a = holder.get()->lookup(q);
                const auto it = expected.find(a.model_version);
                if (it == expected.end() || std::abs(a.floor - it->second) > 1e-12) ++torn;
                ++reads;
            }
        });
    }
    for (int k = 1; k < 100; ++k) {
        holder.swap(versions[k]);
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    done = true;
    for (auto& t : readers) t.join();
    const bool consistent = torn == 0 && reads > 0;

    const bool pass = rows_ok && fast && consistent;
    return {pass, fmt("rows+ladder: %s, p99 %.2fus (limit 100), %ld stress reads, %ld torn",
                      rows_ok ? "ok" : "BAD", p99, reads.load(), torn.load())};
}

// ---------------------------------------------------------------------------
// 10. One simulated log trained with 1 worker and with 8 workers under the
//     same seed must serialize to byte-identical model CSVs.

Outcome parallel_training_deterministic() {
    SimConfig cfg;
    cfg.requests_per_day = 30000;
    cfg.days = 1;
    cfg.seed = 21;
    cfg.start_date = CivilDate{2026, 8, 12};
    cfg.shares = BucketShares{0.0, 0.0, 0.5};
    const char* pubs[3] = {"pubA", "pubA", "pubB"};
    const char* sites[3] = {"news", "news", "sports"};
    const char* slots[3] = {"top", "side", "hero"};
    for (int i = 0; i < 3; ++i) {
        SimPlacement pl;
        pl.key = PlacementKey{pubs[i], sites[i], slots[i]};
        pl.weight = 1.0 + i;
        pl.adx_mean = 0.3 + 0.1 * i;
        pl.adx_sigma = 0.05;
        pl.training_cap = 2.0;
        cfg.placements.push_back(pl);
    }
    cfg.agents.push_back(DspAgentSpec{"dsp_a", BidderType::Regular, 0.2, 0.5, 0.7, 0.6});
    cfg.agents.push_back(DspAgentSpec{"reb_c", BidderType::Rebroadcaster, 0.0, 0.45, 0.6, 0.5});

    const std::string dir = testsupport::scratch_dir("accept10");
    const std::string log = dir + "/auctions.log";
    simulate_period_to_file(cfg, adx_static_policy(cfg), log);
    const TrainingSet set = ingest_logs({log}, add_days(cfg.start_date, cfg.days), IngestConfig{});

    TrainConfig tc;
    tc.seed = 5;
    tc.parallelism = 1;
    const TrainResult serial = train_all(set, tc);
    tc.parallelism = 8;
    const TrainResult threaded = train_all(set, tc);

    const std::string csv_serial = emit_model_csv(serial.model.rows);
    const std::string csv_threaded = emit_model_csv(threaded.model.rows);
    const bool pass = csv_serial == csv_threaded &&
                      serial.model.version == threaded.model.version &&
                      serial.report.trained == 3 && threaded.report.trained == 3;
    return {pass, fmt("%d placements trained, CSVs %s (%zu bytes), versions %s",
                      serial.report.trained,
                      csv_serial == csv_threaded ? "identical" : "DIFFER", csv_serial.size(),
                      serial.model.version == threaded.model.version ? "equal" : "DIFFER")};
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 means no wall-clock requirement
    Outcome (*fn)();
};

constexpr Criterion kCriteria[] = {
    {1, "closed-form single-bidder revenue", 1.0, single_bidder_closed_form},
    {2, "quadrature revenue vs Monte Carlo", 30.0, quadrature_matches_monte_carlo},
    {3, "optimizer vs dense grid", 60.0, optimizer_attains_grid_max},
    {4, "truncated-fit parameter recovery", 60.0, truncated_fit_recovery},
    {5, "floor collapse without passback", 10.0, floors_collapse_without_passback},
    {6, "bid distribution shift under floors", 0.0, floored_bids_shift},
    {7, "dynamic-vs-static lift signs", 300.0, dynamic_vs_static_lift},
    {8, "outlier gate blocks deployment", 0.0, outlier_gate_blocks},
    {9, "lookup correctness and latency", 0.0, lookup_correct_and_fast},
    {10, "training determinism across threads", 0.0, parallel_training_deterministic},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int ran = 0, passed = 0;
    for (const Criterion& c : kCriteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.pass && c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            o.pass = false;
            o.detail += fmt(" [exceeded %.0fs budget]", c.budget_seconds);
        }
        ++ran;
        passed += o.pass ? 1 : 0;
        std::printf("%2d %-38s %s %7.2fs  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", passed, ran);
    return passed == ran ? 0 : 1;
}
