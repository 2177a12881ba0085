#include "floors/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "floors/errors.hpp"
#include "floors/rng.hpp"
#include "floors/stats.hpp"

namespace floors {

std::optional<double> RandomizationPlan::cap_for(const PlacementKey& k) const {
    for (const auto& e : entries) {
        if (e.key == k) return e.floor_cap;
    }
    return std::nullopt;
}

RandomizationPlan build_randomization_plan(const std::vector<AuctionLogRecord>& history,
                                           double bucket_share) {
    if (!(bucket_share > 0.0 && bucket_share <= 1.0)) {
        throw ConfigError("bucket share must be in (0, 1]");
    }
    std::map<PlacementKey, std::vector<double>> bids;
    for (const auto& r : history) {
        PlacementKey k{r.publisher_id, r.site_id, r.placement_id};
        auto& v = bids[k];  // placement registered even if it never drew a bid
        if (r.bid) v.push_back(*r.bid);
    }

    RandomizationPlan plan;
    plan.bucket_share = bucket_share;
    if (bids.empty()) {
        plan.warnings.push_back("no history: empty randomization plan");
        return plan;
    }
    for (auto& [key, v] : bids) {
        if (v.empty()) {
            plan.warnings.push_back("no bids for placement " + key.display() + ": excluded");
            continue;
        }
        double cap = quantile(v, 0.95);
        plan.entries.push_back({key, cap});
    }
    return plan;
}

const PlacementTrainingData* TrainingSet::find(const PlacementKey& k) const {
    auto it = std::lower_bound(placements.begin(), placements.end(), k,
                               [](const PlacementTrainingData& p, const PlacementKey& key) {
                                   return p.key < key;
                               });
    if (it == placements.end() || !(it->key == k)) return nullptr;
    return &*it;
}

namespace {

struct PlacementAccumulator {
    std::map<std::string, BidderCohort> bidders;
    long requests = 0;
    long passbacks = 0;
    double adx_sum = 0.0;
    double max_floor = 0.0;
    std::string last_ts;  // records of one request are adjacent and share ts
};

}  // namespace

TrainingSet ingest_logs(const std::vector<std::string>& paths,
                        CivilDate run_date,
                        const IngestConfig& cfg) {
    if (cfg.window_days <= 0) throw ConfigError("window days must be positive");

    const CivilDate window_begin = add_days(run_date, -cfg.window_days);
    TrainingSet set;
    set.window_begin = window_begin;
    set.window_end = run_date;

    std::map<PlacementKey, PlacementAccumulator> acc;
    long parsed_total = 0;
    long rejected_total = 0;

    for (const auto& path : paths) {
        auto [parsed, rejected] = read_log_file(path, [&](const AuctionLogRecord& r) {
            if (r.bucket != Bucket::Training) {
                ++set.records_skipped;
                return;
            }
            auto d = timestamp_date(r.ts);
            if (!d || *d < window_begin || !(*d < run_date)) {
                ++set.records_skipped;
                return;
            }
            ++set.records_used;

            PlacementKey key{r.publisher_id, r.site_id, r.placement_id};
            auto& pa = acc[key];
            if (pa.last_ts != r.ts) {
                pa.last_ts = r.ts;
                ++pa.requests;
                if (r.settled_origin == SettledOrigin::Adx) {
                    ++pa.passbacks;
                    pa.adx_sum += r.settled_revenue;
                }
            }
            pa.max_floor = std::max(pa.max_floor, r.floor_sent);

            auto& cohort = pa.bidders[r.bidder_id];
            if (cohort.bidder_id.empty()) {
                cohort.bidder_id = r.bidder_id;
                cohort.bidder_type = r.bidder_type;
            }
            cohort.observations.push_back({r.floor_sent, r.bid});
            ++cohort.requests;
        });
        parsed_total += parsed;
        rejected_total += rejected;
    }

    set.records_rejected = rejected_total;
    const long total_rows = parsed_total + rejected_total;
    if (total_rows > 0 &&
        static_cast<double>(rejected_total) > cfg.max_reject_fraction * static_cast<double>(total_rows)) {
        throw IngestError("rejected " + std::to_string(rejected_total) + " of " +
                          std::to_string(total_rows) + " rows, above the " +
                          std::to_string(cfg.max_reject_fraction) + " bound");
    }

    for (auto& [key, pa] : acc) {
        PlacementTrainingData d;
        d.key = key;
        d.requests = pa.requests;
        d.passbacks = pa.passbacks;
        d.adx_rev = pa.passbacks > 0 ? pa.adx_sum / static_cast<double>(pa.passbacks) : 0.0;
        d.max_floor_seen = pa.max_floor;
        for (auto& [id, cohort] : pa.bidders) {
            d.bidders.push_back(std::move(cohort));
        }
        set.placements.push_back(std::move(d));
    }
    return set;
}

const char* to_string(PlacementStatus s) {
    switch (s) {
        case PlacementStatus::Trained: return "trained";
        case PlacementStatus::FallbackTimeout: return "fallback-timeout";
        case PlacementStatus::FallbackInsufficientData: return "fallback-insufficient-data";
        case PlacementStatus::FallbackError: return "fallback-error";
    }
    return "?";
}

// Bids sitting exactly at the sent floor are the exchange's floor push, not
// draws from the bidder's own price distribution: they say only that the
// bidder was willing to clear the floor. Feeding them to the truncated MLE as
// density mass at the left edge drags the scale link down with the floor, so
// they count toward participation but not toward the likelihood sample.
std::vector<BidObservation> density_sample(std::span<const BidObservation> rows) {
    std::vector<BidObservation> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        if (r.bid && *r.bid <= r.floor_sent * (1.0 + 1e-9) + 1e-12) continue;
        out.push_back(r);
    }
    return out;
}

namespace {

FloorModelRow fallback_row(const PlacementTrainingData& data, const TrainConfig& cfg) {
    if (cfg.previous_model) {
        for (const auto& r : cfg.previous_model->rows) {
            if (r.publisher_id == data.key.publisher_id && r.site_id == data.key.site_id &&
                r.placement_id == data.key.placement_id) {
                return r;
            }
        }
    }
    // Never published before: serve the passback value as a neutral floor.
    FloorModelRow row;
    row.publisher_id = data.key.publisher_id;
    row.site_id = data.key.site_id;
    row.placement_id = data.key.placement_id;
    double f = quantize_floor(data.adx_rev, data.adx_rev);
    row.regular = f;
    row.rebroadcaster = f;
    return row;
}

}  // namespace

TrainOutcome train_placement(const PlacementTrainingData& data, const TrainConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const auto deadline =
        start + std::chrono::duration_cast<clock::duration>(
                    std::chrono::duration<double>(cfg.placement_budget_seconds));

    TrainOutcome out;
    out.report.key = data.key;

    auto finish = [&](PlacementStatus status, std::string detail) {
        out.row = fallback_row(data, cfg);
        out.report.status = status;
        out.report.detail = std::move(detail);
        out.report.seconds = std::chrono::duration<double>(clock::now() - start).count();
        return out;
    };

    if (cfg.placement_budget_seconds <= 0.0) {
        return finish(PlacementStatus::FallbackTimeout, "zero budget");
    }
    if (data.bidders.empty()) {
        return finish(PlacementStatus::FallbackInsufficientData, "no bidder cohorts");
    }
    if (data.max_floor_seen <= 0.0) {
        return finish(PlacementStatus::FallbackInsufficientData, "no explored floor range");
    }

    try {
        PlacementContext ctx;
        ctx.publisher_id = data.key.publisher_id;
        ctx.site_id = data.key.site_id;
        ctx.placement_id = data.key.placement_id;
        ctx.adx_rev = data.adx_rev;

        FitConfig fit_cfg;
        fit_cfg.min_observations = cfg.min_observations;
        std::vector<std::string> thin;
        for (const auto& cohort : data.bidders) {
            if (clock::now() >= deadline) {
                return finish(PlacementStatus::FallbackTimeout, "budget expired during fitting");
            }
            try {
                PlacementBidder b;
                b.bidder_id = cohort.bidder_id;
                b.type = cohort.bidder_type;
                b.model.link = fit_bid_model(density_sample(cohort.observations), fit_cfg);
                b.model.participation = estimate_participation(cohort.observations);
                ctx.bidders.push_back(std::move(b));
            } catch (const InsufficientDataError&) {
                thin.push_back(cohort.bidder_id);
            }
        }
        if (ctx.bidders.empty()) {
            return finish(PlacementStatus::FallbackInsufficientData,
                          "no bidder reached " + std::to_string(cfg.min_observations) + " bids");
        }

        OptimizerConfig opt;
        opt.floor_cap = data.max_floor_seen;
        opt.grid_size = cfg.grid_size;
        opt.mc_draws = static_cast<int>(cfg.mc_draws);
        opt.seed = derive_seed(cfg.seed, data.key.display());
        opt.eval.quadrature_nodes = cfg.quadrature_nodes;
        opt.deadline = deadline;

        OptimizeResult res = optimize_floors(ctx, opt);
        out.report.evaluations = res.evaluations;
        if (res.timed_out) {
            return finish(PlacementStatus::FallbackTimeout, "optimizer hit the budget");
        }

        out.row.publisher_id = data.key.publisher_id;
        out.row.site_id = data.key.site_id;
        out.row.placement_id = data.key.placement_id;
        out.row.regular = quantize_floor(res.floors.regular, data.max_floor_seen);
        out.row.rebroadcaster = quantize_floor(res.floors.rebroadcaster, data.max_floor_seen);
        out.report.status = PlacementStatus::Trained;
        if (!thin.empty()) {
            std::string d = "skipped thin bidders:";
            for (const auto& id : thin) d += " " + id;
            out.report.detail = d;
        }
        out.report.seconds = std::chrono::duration<double>(clock::now() - start).count();
        return out;
    } catch (const std::exception& e) {
        return finish(PlacementStatus::FallbackError, e.what());
    }
}

TrainResult train_all(const TrainingSet& set, const TrainConfig& cfg) {
    if (set.placements.empty()) throw PipelineError("empty training set");
    if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");

    const size_t n = set.placements.size();
    std::vector<TrainOutcome> outcomes(n);
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            outcomes[i] = train_placement(set.placements[i], cfg);
        }
    };

    if (cfg.parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        int count = std::min<int>(cfg.parallelism, static_cast<int>(n));
        threads.reserve(static_cast<size_t>(count));
        for (int t = 0; t < count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    TrainResult result;
    std::vector<FloorModelRow> rows;
    rows.reserve(n);
    for (auto& o : outcomes) {
        rows.push_back(o.row);
        switch (o.report.status) {
            case PlacementStatus::Trained: ++result.report.trained; break;
            case PlacementStatus::FallbackTimeout: ++result.report.fallback_timeout; break;
            case PlacementStatus::FallbackInsufficientData: ++result.report.fallback_insufficient; break;
            case PlacementStatus::FallbackError: ++result.report.fallback_error; break;
        }
        result.report.placements.push_back(std::move(o.report));
    }
    std::string csv = emit_model_csv(std::move(rows));
    result.model = parse_model_csv(csv);
    return result;
}

}  // namespace floors
