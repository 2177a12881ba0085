#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "floors/auction.hpp"
#include "floors/config.hpp"
#include "floors/dates.hpp"
#include "floors/floor_index.hpp"
#include "floors/keys.hpp"
#include "floors/logfmt.hpp"

namespace floors {

// A synthetic demand partner: lognormal valuations, linear bid shading,
// Bernoulli participation.
struct DspAgentSpec {
    std::string bidder_id;
    BidderType bidder_type = BidderType::Regular;
    double log_mu = 0.0;     // valuation lognormal, log-dollar mean
    double log_sigma = 0.5;  // valuation lognormal, log-dollar spread
    double alpha = 1.0;      // shading factor in (0, 1]
    double participation = 1.0;
};

struct SimPlacement {
    PlacementKey key;
    double weight = 1.0;       // relative traffic share
    double adx_mean = 0.3;     // expected passback revenue
    double adx_sigma = 0.0;    // passback revenue lognormal spread (0 = constant)
    double training_cap = 2.0; // exploration floors drawn uniform [0, cap]
};

struct BucketShares {
    double dynamic = 0.05;
    double disabled = 0.05;
    double training = 0.01;

    double sum() const { return dynamic + disabled + training; }
};

struct SimConfig {
    long requests_per_day = 100000;
    int days = 1;
    std::uint64_t seed = 1;
    CivilDate start_date{2026, 1, 1};
    BucketShares shares;
    std::vector<SimPlacement> placements;
    std::vector<DspAgentSpec> agents;
};

// Throws ConfigError on structural problems (empty roster, bad shares,
// alpha outside (0,1], nonpositive weights).
void validate_sim_config(const SimConfig& cfg);

SimConfig load_sim_config(const Config& cfg);
SimConfig load_sim_config_file(const std::string& path);

// Shade toward valuation but never above it: below the floor the agent
// stays out, otherwise it bids max(alpha * valuation, floor).
BidSubmission dsp_agent_bid(double valuation, double floor, const DspAgentSpec& spec);

// Dynamic-bucket floor source.
using FloorPolicy = std::function<FloorVector(const PlacementKey&)>;

FloorPolicy static_policy(FloorVector floors);
// The no-optimization baseline: each placement floored at its passback value.
FloorPolicy adx_static_policy(const SimConfig& cfg);
FloorPolicy index_policy(std::shared_ptr<const FloorIndex> idx);

// Runs the marketplace for cfg.days, streaming one record per
// (request, roster agent) to the sink. Traffic outside the three logged
// buckets is production remainder and is skipped. Deterministic: records
// depend only on (cfg, policy), not on sink behavior.
void simulate_period(const SimConfig& cfg, const FloorPolicy& dynamic_policy,
                     const std::function<void(const AuctionLogRecord&)>& sink);

void simulate_period_to_file(const SimConfig& cfg, const FloorPolicy& dynamic_policy,
                             const std::string& path);

// Ground-truth expected revenue of a fixed floor policy: every request uses
// the policy (no buckets, no logging). Same request-level random draws for
// any policy under one (cfg, tag), so policy comparisons are paired.
struct GroundTruthRevenue {
    double total = 0.0;
    double yahoox = 0.0;
    double adx = 0.0;
    long requests = 0;

    double per_request() const { return requests > 0 ? total / static_cast<double>(requests) : 0.0; }
};

GroundTruthRevenue simulate_static_revenue(const SimConfig& cfg, const FloorPolicy& policy,
                                           long requests, std::string_view tag = "truth");

// Per-bucket tallies; settlement counted once per request.
struct BucketMetrics {
    long requests = 0;
    long yahoox_impressions = 0;
    long adx_impressions = 0;
    double yahoox_revenue = 0.0;
    double adx_revenue = 0.0;
    double rescale_factor = 1.0;

    long impressions() const { return yahoox_impressions + adx_impressions; }
    double total_revenue() const { return yahoox_revenue + adx_revenue; }
    double ecpm(double revenue) const {
        return requests > 0 ? revenue / static_cast<double>(requests) * 1000.0 : 0.0;
    }
    double adx_impression_share() const {
        return impressions() > 0
                   ? static_cast<double>(adx_impressions) / static_cast<double>(impressions())
                   : 0.0;
    }
};

struct LiftLine {
    double revenue = 0.0;
    double impressions = 0.0;
    double ecpm = 0.0;
    double revenue_se = 0.0;     // bootstrap standard errors
    double impressions_se = 0.0;
    double ecpm_se = 0.0;
};

struct LiftReport {
    BucketMetrics dynamic;
    BucketMetrics disabled;
    LiftLine total;
    LiftLine yahoox;
    LiftLine adx;
    double rescale_target_share = 0.94;
};

class LiftAccumulator {
public:
    void add(const AuctionLogRecord& r);

    // Throws PipelineError unless both A/B buckets saw traffic.
    LiftReport report(int bootstrap_replicates = 200, std::uint64_t seed = 7) const;

private:
    struct RequestSummary {
        float yahoox_revenue = 0.0f;
        float adx_revenue = 0.0f;
        std::uint8_t yahoox_impression = 0;
        std::uint8_t adx_impression = 0;
    };
    std::vector<RequestSummary> dynamic_;
    std::vector<RequestSummary> disabled_;
    long other_requests_ = 0;
    std::string last_ts_;
    friend LiftReport lift_from_summaries(const LiftAccumulator&, int, std::uint64_t);
};

LiftReport compute_lift(const std::vector<std::string>& log_paths,
                        int bootstrap_replicates = 200, std::uint64_t seed = 7);

// Plot series: per-floor-level histogram of observed bids.
// Columns: floorSent,binLow,binHigh,count.
std::string bid_histogram_csv(const std::vector<std::string>& log_paths, double bin_width = 0.1);

// Plot series: per-placement floor trajectory across dated models.
// Columns: date,publisherId,siteId,placementId,Regular,Rebroadcaster.
std::string floor_series_csv(const std::vector<std::pair<std::string, std::string>>& dated_model_paths);

}  // namespace floors
