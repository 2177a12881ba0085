#include "floors/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "floors/errors.hpp"
#include "floors/model_csv.hpp"
#include "floors/rng.hpp"
#include "floors/stats.hpp"

namespace floors {

void validate_sim_config(const SimConfig& cfg) {
    if (cfg.requests_per_day <= 0) throw ConfigError("requestsPerDay must be positive");
    if (cfg.days <= 0) throw ConfigError("days must be positive");
    const auto& s = cfg.shares;
    if (s.dynamic < 0 || s.disabled < 0 || s.training < 0) {
        throw ConfigError("bucket shares must be nonnegative");
    }
    if (s.sum() > 1.0 + 1e-12) throw ConfigError("bucket shares must sum to at most 1");
    if (cfg.placements.empty()) throw ConfigError("at least one placement required");
    std::set<PlacementKey> keys;
    for (const auto& p : cfg.placements) {
        if (p.key.publisher_id.empty() || p.key.site_id.empty() || p.key.placement_id.empty()) {
            throw ConfigError("placement ids must be non-empty");
        }
        if (!keys.insert(p.key).second) throw ConfigError("duplicate placement " + p.key.display());
        if (!(p.weight > 0)) throw ConfigError("placement weight must be positive");
        if (p.adx_mean < 0) throw ConfigError("adxMean must be nonnegative");
        if (p.adx_sigma < 0) throw ConfigError("adxSigma must be nonnegative");
        if (!(p.training_cap > 0)) throw ConfigError("trainingCap must be positive");
    }
    if (cfg.agents.empty()) throw ConfigError("at least one agent required");
    std::set<std::string> ids;
    for (const auto& a : cfg.agents) {
        if (a.bidder_id.empty()) throw ConfigError("bidderId must be non-empty");
        if (!ids.insert(a.bidder_id).second) throw ConfigError("duplicate bidderId " + a.bidder_id);
        if (!(a.alpha > 0 && a.alpha <= 1)) throw ConfigError("alpha must be in (0,1]");
        if (a.participation < 0 || a.participation > 1) {
            throw ConfigError("participation must be in [0,1]");
        }
        if (a.log_sigma < 0) throw ConfigError("logSigma must be nonnegative");
    }
}

SimConfig load_sim_config(const Config& kv) {
    SimConfig cfg;
    cfg.requests_per_day = kv.get_long("requestsPerDay", cfg.requests_per_day);
    cfg.days = static_cast<int>(kv.get_long("days", cfg.days));
    cfg.seed = static_cast<std::uint64_t>(kv.get_long("seed", 1));
    if (auto d = kv.get("startDate")) {
        auto parsed = parse_date(*d);
        if (!parsed) throw ConfigError("startDate must be YYYY-MM-DD, got " + *d);
        cfg.start_date = *parsed;
    }
    cfg.shares.dynamic = kv.get_double("bucket.dynamic", cfg.shares.dynamic);
    cfg.shares.disabled = kv.get_double("bucket.disabled", cfg.shares.disabled);
    cfg.shares.training = kv.get_double("bucket.training", cfg.shares.training);

    for (int i = 1;; ++i) {
        const std::string prefix = "placement." + std::to_string(i) + ".";
        if (!kv.has(prefix + "placementId")) break;
        SimPlacement p;
        p.key.publisher_id = kv.require_string(prefix + "publisherId");
        p.key.site_id = kv.require_string(prefix + "siteId");
        p.key.placement_id = kv.require_string(prefix + "placementId");
        p.weight = kv.get_double(prefix + "weight", 1.0);
        p.adx_mean = kv.get_double(prefix + "adxMean", 0.3);
        p.adx_sigma = kv.get_double(prefix + "adxSigma", 0.0);
        p.training_cap = kv.get_double(prefix + "trainingCap", 2.0);
        cfg.placements.push_back(std::move(p));
    }
    for (int i = 1;; ++i) {
        const std::string prefix = "agent." + std::to_string(i) + ".";
        if (!kv.has(prefix + "bidderId")) break;
        DspAgentSpec a;
        a.bidder_id = kv.require_string(prefix + "bidderId");
        auto type = parse_bidder_type(kv.get_string(prefix + "bidderType", "regular"));
        if (!type) throw ConfigError(prefix + "bidderType must be regular or rebroadcaster");
        a.bidder_type = *type;
        a.log_mu = kv.get_double(prefix + "logMu", 0.0);
        a.log_sigma = kv.get_double(prefix + "logSigma", 0.5);
        a.alpha = kv.get_double(prefix + "alpha", 1.0);
        a.participation = kv.get_double(prefix + "participation", 1.0);
        cfg.agents.push_back(std::move(a));
    }
    validate_sim_config(cfg);
    return cfg;
}

SimConfig load_sim_config_file(const std::string& path) {
    return load_sim_config(Config::load(path));
}

BidSubmission dsp_agent_bid(double valuation, double floor, const DspAgentSpec& spec) {
    if (valuation < floor) return BidSubmission::no_bid(spec.bidder_id, spec.bidder_type);
    return BidSubmission::of(spec.bidder_id, spec.bidder_type,
                             std::max(spec.alpha * valuation, floor));
}

FloorPolicy static_policy(FloorVector floors) {
    return [floors](const PlacementKey&) { return floors; };
}

FloorPolicy adx_static_policy(const SimConfig& cfg) {
    std::map<PlacementKey, double> adx;
    for (const auto& p : cfg.placements) adx[p.key] = p.adx_mean;
    return [adx](const PlacementKey& key) {
        auto it = adx.find(key);
        double f = it != adx.end() ? it->second : 0.0;
        return FloorVector{f, f};
    };
}

FloorPolicy index_policy(std::shared_ptr<const FloorIndex> idx) {
    return [idx](const PlacementKey& key) {
        FloorQuery q{key.publisher_id, key.site_id, key.placement_id, BidderType::Regular};
        double reg = idx->lookup(q).floor;
        q.bidder_type = BidderType::Rebroadcaster;
        double reb = idx->lookup(q).floor;
        return FloorVector{reg, reb};
    };
}

namespace {

// Everything random about one request, drawn before any floor-dependent
// branching so policy comparisons under one seed are exactly paired.
struct RequestDraw {
    double bucket_u = 0.0;
    size_t placement = 0;
    double training_u = 0.0;
    std::vector<bool> participating;
    std::vector<double> valuations;
    double adx_value = 0.0;
};

struct Generator {
    const SimConfig& cfg;
    std::vector<double> cum_weight;  // normalized cumulative placement weights

    explicit Generator(const SimConfig& c) : cfg(c) {
        double total = 0.0;
        for (const auto& p : cfg.placements) total += p.weight;
        double acc = 0.0;
        for (const auto& p : cfg.placements) {
            acc += p.weight / total;
            cum_weight.push_back(acc);
        }
        cum_weight.back() = 1.0;
    }

    void fill(std::mt19937_64& eng, RequestDraw& d) const {
        d.bucket_u = uniform01(eng);
        const double pu = uniform01(eng);
        d.placement = static_cast<size_t>(
            std::lower_bound(cum_weight.begin(), cum_weight.end(), pu) - cum_weight.begin());
        if (d.placement >= cfg.placements.size()) d.placement = cfg.placements.size() - 1;
        d.training_u = uniform01(eng);

        const size_t n = cfg.agents.size();
        d.participating.resize(n);
        d.valuations.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const auto& a = cfg.agents[i];
            d.participating[i] = uniform01(eng) < a.participation;
            d.valuations[i] = lognormal(eng, a.log_mu, a.log_sigma);
        }
        const auto& pl = cfg.placements[d.placement];
        if (pl.adx_sigma > 0) {
            const double mu = std::log(std::max(pl.adx_mean, 1e-12)) -
                              0.5 * pl.adx_sigma * pl.adx_sigma;
            d.adx_value = lognormal(eng, mu, pl.adx_sigma);
        } else {
            d.adx_value = pl.adx_mean;
        }
    }

    // Collects bids and settles the request at the given floors.
    Settlement run_auction(const RequestDraw& d, const FloorVector& floors,
                           std::vector<BidSubmission>& bids) const {
        bids.clear();
        for (size_t i = 0; i < cfg.agents.size(); ++i) {
            const auto& a = cfg.agents[i];
            if (!d.participating[i]) {
                bids.push_back(BidSubmission::no_bid(a.bidder_id, a.bidder_type));
                continue;
            }
            bids.push_back(dsp_agent_bid(d.valuations[i], floors.for_type(a.bidder_type), a));
        }
        AuctionOutcome outcome = resolve_first_price(bids, floors);
        return settle(outcome, d.adx_value);
    }
};

}  // namespace

void simulate_period(const SimConfig& cfg, const FloorPolicy& dynamic_policy,
                     const std::function<void(const AuctionLogRecord&)>& sink) {
    validate_sim_config(cfg);
    Generator gen(cfg);
    const auto& s = cfg.shares;

    RequestDraw draw;
    std::vector<BidSubmission> bids;
    AuctionLogRecord rec;

    for (int day = 0; day < cfg.days; ++day) {
        const CivilDate date = add_days(cfg.start_date, day);
        const std::uint64_t day_seed = derive_seed(cfg.seed, "day", static_cast<std::uint64_t>(day));
        for (long seq = 0; seq < cfg.requests_per_day; ++seq) {
            auto eng = make_engine(derive_seed(day_seed, "req", static_cast<std::uint64_t>(seq)));
            gen.fill(eng, draw);

            Bucket bucket;
            if (draw.bucket_u < s.dynamic) {
                bucket = Bucket::Dynamic;
            } else if (draw.bucket_u < s.dynamic + s.disabled) {
                bucket = Bucket::Disabled;
            } else if (draw.bucket_u < s.sum()) {
                bucket = Bucket::Training;
            } else {
                continue;  // production remainder, not logged
            }

            const SimPlacement& pl = cfg.placements[draw.placement];
            FloorVector floors;
            switch (bucket) {
                case Bucket::Dynamic:
                    floors = dynamic_policy(pl.key);
                    break;
                case Bucket::Disabled:
                    floors = FloorVector{pl.adx_mean, pl.adx_mean};
                    break;
                case Bucket::Training: {
                    const double f = draw.training_u * pl.training_cap;
                    floors = FloorVector{f, f};
                    break;
                }
            }

            Settlement st = gen.run_auction(draw, floors, bids);

            rec.ts = format_timestamp(date, static_cast<std::uint64_t>(seq));
            rec.bucket = bucket;
            rec.publisher_id = pl.key.publisher_id;
            rec.site_id = pl.key.site_id;
            rec.placement_id = pl.key.placement_id;
            rec.settled_origin =
                st.origin == RevenueOrigin::Adx ? SettledOrigin::Adx : SettledOrigin::YahooX;
            rec.settled_revenue = st.revenue;
            for (size_t i = 0; i < cfg.agents.size(); ++i) {
                rec.bidder_id = cfg.agents[i].bidder_id;
                rec.bidder_type = cfg.agents[i].bidder_type;
                rec.floor_sent = floors.for_type(rec.bidder_type);
                rec.bid = bids[i].amount;
                sink(rec);
            }
        }
    }
}

void simulate_period_to_file(const SimConfig& cfg, const FloorPolicy& dynamic_policy,
                             const std::string& path) {
    LogWriter writer(path);
    simulate_period(cfg, dynamic_policy, [&](const AuctionLogRecord& r) { writer.write(r); });
}

GroundTruthRevenue simulate_static_revenue(const SimConfig& cfg, const FloorPolicy& policy,
                                           long requests, std::string_view tag) {
    validate_sim_config(cfg);
    if (requests <= 0) throw ConfigError("requests must be positive");
    Generator gen(cfg);

    std::vector<FloorVector> floors_by_placement;
    floors_by_placement.reserve(cfg.placements.size());
    for (const auto& p : cfg.placements) floors_by_placement.push_back(policy(p.key));

    const std::uint64_t base = derive_seed(cfg.seed, tag);
    GroundTruthRevenue out;
    out.requests = requests;
    RequestDraw draw;
    std::vector<BidSubmission> bids;
    for (long seq = 0; seq < requests; ++seq) {
        auto eng = make_engine(derive_seed(base, "req", static_cast<std::uint64_t>(seq)));
        gen.fill(eng, draw);
        Settlement st = gen.run_auction(draw, floors_by_placement[draw.placement], bids);
        if (st.origin == RevenueOrigin::Adx) {
            out.adx += st.revenue;
        } else {
            out.yahoox += st.revenue;
        }
    }
    out.total = out.yahoox + out.adx;
    return out;
}

void LiftAccumulator::add(const AuctionLogRecord& r) {
    if (r.ts == last_ts_) return;  // settlement already counted for this request
    last_ts_ = r.ts;
    if (r.bucket == Bucket::Dynamic || r.bucket == Bucket::Disabled) {
        RequestSummary s;
        if (r.settled_origin == SettledOrigin::YahooX) {
            s.yahoox_revenue = static_cast<float>(r.settled_revenue);
            s.yahoox_impression = 1;
        } else if (r.settled_origin == SettledOrigin::Adx) {
            s.adx_revenue = static_cast<float>(r.settled_revenue);
            s.adx_impression = 1;
        }
        (r.bucket == Bucket::Dynamic ? dynamic_ : disabled_).push_back(s);
    } else {
        ++other_requests_;
    }
}

namespace {

struct Tally {
    double yahoox_rev = 0.0;
    double adx_rev = 0.0;
    double yahoox_impr = 0.0;
    double adx_impr = 0.0;
    double n = 0.0;

    double rev() const { return yahoox_rev + adx_rev; }
    double impr() const { return yahoox_impr + adx_impr; }
};

// Ratio of requests-normalized rates minus one; 0 when undefined.
double rate_lift(double dyn_num, double dyn_n, double dis_num, double dis_n) {
    if (dyn_n <= 0 || dis_n <= 0 || dis_num == 0) return 0.0;
    return (dyn_num / dyn_n) / (dis_num / dis_n) - 1.0;
}

}  // namespace

LiftReport LiftAccumulator::report(int bootstrap_replicates, std::uint64_t seed) const {
    if (dynamic_.empty() || disabled_.empty()) {
        throw PipelineError("lift needs traffic in both the dynamic and disabled buckets");
    }

    auto tally_all = [](const std::vector<RequestSummary>& v) {
        Tally t;
        for (const auto& s : v) {
            t.yahoox_rev += s.yahoox_revenue;
            t.adx_rev += s.adx_revenue;
            t.yahoox_impr += s.yahoox_impression;
            t.adx_impr += s.adx_impression;
        }
        t.n = static_cast<double>(v.size());
        return t;
    };

    const Tally dyn = tally_all(dynamic_);
    const Tally dis = tally_all(disabled_);

    LiftReport rep;
    rep.dynamic.requests = static_cast<long>(dyn.n);
    rep.dynamic.yahoox_impressions = static_cast<long>(dyn.yahoox_impr);
    rep.dynamic.adx_impressions = static_cast<long>(dyn.adx_impr);
    rep.dynamic.yahoox_revenue = dyn.yahoox_rev;
    rep.dynamic.adx_revenue = dyn.adx_rev;
    rep.disabled.requests = static_cast<long>(dis.n);
    rep.disabled.yahoox_impressions = static_cast<long>(dis.yahoox_impr);
    rep.disabled.adx_impressions = static_cast<long>(dis.adx_impr);
    rep.disabled.yahoox_revenue = dis.yahoox_rev;
    rep.disabled.adx_revenue = dis.adx_rev;

    const double total_requests = dyn.n + dis.n + static_cast<double>(other_requests_);
    rep.dynamic.rescale_factor = rep.rescale_target_share * total_requests / dyn.n;
    rep.disabled.rescale_factor = rep.rescale_target_share * total_requests / dis.n;

    auto fill_line = [&](LiftLine& line, double dyn_rev, double dis_rev, double dyn_impr,
                         double dis_impr) {
        line.revenue = rate_lift(dyn_rev, dyn.n, dis_rev, dis.n);
        line.impressions = rate_lift(dyn_impr, dyn.n, dis_impr, dis.n);
    };
    fill_line(rep.total, dyn.rev(), dis.rev(), dyn.impr(), dis.impr());
    fill_line(rep.yahoox, dyn.yahoox_rev, dis.yahoox_rev, dyn.yahoox_impr, dis.yahoox_impr);
    fill_line(rep.adx, dyn.adx_rev, dis.adx_rev, dyn.adx_impr, dis.adx_impr);
    // Bucket-level eCPM is revenue per 1000 requests, so its lift tracks the
    // revenue rate. Per-origin eCPM prices the traffic the origin actually
    // served, so it is normalized by that origin's impressions.
    rep.total.ecpm = rep.total.revenue;
    rep.yahoox.ecpm = rate_lift(dyn.yahoox_rev, dyn.yahoox_impr, dis.yahoox_rev, dis.yahoox_impr);
    rep.adx.ecpm = rate_lift(dyn.adx_rev, dyn.adx_impr, dis.adx_rev, dis.adx_impr);

    if (bootstrap_replicates > 1) {
        std::vector<std::array<double, 9>> reps;
        reps.reserve(static_cast<size_t>(bootstrap_replicates));
        for (int b = 0; b < bootstrap_replicates; ++b) {
            auto eng = make_engine(derive_seed(seed, "bootstrap", static_cast<std::uint64_t>(b)));
            auto resample = [&](const std::vector<RequestSummary>& v) {
                Tally t;
                const size_t n = v.size();
                for (size_t i = 0; i < n; ++i) {
                    const auto& s = v[eng() % n];
                    t.yahoox_rev += s.yahoox_revenue;
                    t.adx_rev += s.adx_revenue;
                    t.yahoox_impr += s.yahoox_impression;
                    t.adx_impr += s.adx_impression;
                }
                t.n = static_cast<double>(n);
                return t;
            };
            const Tally bd = resample(dynamic_);
            const Tally bs = resample(disabled_);
            const double rev = rate_lift(bd.rev(), bd.n, bs.rev(), bs.n);
            const double yrev = rate_lift(bd.yahoox_rev, bd.n, bs.yahoox_rev, bs.n);
            const double arev = rate_lift(bd.adx_rev, bd.n, bs.adx_rev, bs.n);
            reps.push_back({rev,
                            rate_lift(bd.impr(), bd.n, bs.impr(), bs.n),
                            rev,
                            yrev,
                            rate_lift(bd.yahoox_impr, bd.n, bs.yahoox_impr, bs.n),
                            rate_lift(bd.yahoox_rev, bd.yahoox_impr, bs.yahoox_rev, bs.yahoox_impr),
                            arev,
                            rate_lift(bd.adx_impr, bd.n, bs.adx_impr, bs.n),
                            rate_lift(bd.adx_rev, bd.adx_impr, bs.adx_rev, bs.adx_impr)});
        }
        auto se_of = [&](size_t col) {
            std::vector<double> vals;
            vals.reserve(reps.size());
            for (const auto& a : reps) vals.push_back(a[col]);
            return sample_stddev(vals);
        };
        rep.total.revenue_se = se_of(0);
        rep.total.impressions_se = se_of(1);
        rep.total.ecpm_se = se_of(2);
        rep.yahoox.revenue_se = se_of(3);
        rep.yahoox.impressions_se = se_of(4);
        rep.yahoox.ecpm_se = se_of(5);
        rep.adx.revenue_se = se_of(6);
        rep.adx.impressions_se = se_of(7);
        rep.adx.ecpm_se = se_of(8);
    }
    return rep;
}

LiftReport compute_lift(const std::vector<std::string>& log_paths, int bootstrap_replicates,
                        std::uint64_t seed) {
    LiftAccumulator acc;
    for (const auto& p : log_paths) {
        read_log_file(p, [&](const AuctionLogRecord& r) { acc.add(r); });
    }
    return acc.report(bootstrap_replicates, seed);
}

std::string bid_histogram_csv(const std::vector<std::string>& log_paths, double bin_width) {
    if (!(bin_width > 0)) throw ConfigError("bin width must be positive");
    // floor level in cents -> bin index -> count
    std::map<long, std::map<long, long>> hist;
    for (const auto& p : log_paths) {
        read_log_file(p, [&](const AuctionLogRecord& r) {
            if (!r.bid) return;
            const long level = std::lround(r.floor_sent * 100.0);
            const long bin = static_cast<long>(*r.bid / bin_width);
            ++hist[level][bin];
        });
    }
    std::string out = "floorSent,binLow,binHigh,count\n";
    char buf[96];
    for (const auto& [level, bins] : hist) {
        for (const auto& [bin, count] : bins) {
            std::snprintf(buf, sizeof buf, "%.2f,%.4f,%.4f,%ld\n",
                          static_cast<double>(level) / 100.0,
                          static_cast<double>(bin) * bin_width,
                          static_cast<double>(bin + 1) * bin_width, count);
            out += buf;
        }
    }
    return out;
}

std::string floor_series_csv(
    const std::vector<std::pair<std::string, std::string>>& dated_model_paths) {
    std::string out = "date,publisherId,siteId,placementId,Regular,Rebroadcaster\n";
    char buf[64];
    for (const auto& [date, path] : dated_model_paths) {
        FloorModel m = load_model_file(path);
        for (const auto& row : m.rows) {
            out += date;
            out += ',';
            out += row.publisher_id;
            out += ',';
            out += row.site_id;
            out += ',';
            out += row.placement_id;
            out += ',';
            std::snprintf(buf, sizeof buf, "%.2f,%.2f\n", row.regular, row.rebroadcaster);
            out += buf;
        }
    }
    return out;
}

}  // namespace floors
