#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "floors/auction.hpp"
#include "floors/bid_fit.hpp"
#include "floors/dates.hpp"
#include "floors/keys.hpp"
#include "floors/logfmt.hpp"
#include "floors/model_csv.hpp"
#include "floors/revenue.hpp"

namespace floors {

// Per-placement exploration floors: cap from the bid history, floors drawn
// uniform on [0, cap] per request.
struct RandomizationPlan {
    struct Entry {
        PlacementKey key;
        double floor_cap = 0.0;
    };
    std::vector<Entry> entries;
    double bucket_share = 0.01;
    std::vector<std::string> warnings;

    std::optional<double> cap_for(const PlacementKey& k) const;
};

RandomizationPlan build_randomization_plan(const std::vector<AuctionLogRecord>& history,
                                           double bucket_share);

struct BidderCohort {
    std::string bidder_id;
    BidderType bidder_type = BidderType::Regular;
    std::vector<BidObservation> observations;
    long requests = 0;  // training requests this bidder was solicited on
};

struct PlacementTrainingData {
    PlacementKey key;
    std::vector<BidderCohort> bidders;
    long requests = 0;
    long passbacks = 0;
    double adx_rev = 0.0;       // mean settled passback revenue
    double max_floor_seen = 0.0;  // upper edge of the explored floor range
};

struct TrainingSet {
    CivilDate window_begin{};  // inclusive
    CivilDate window_end{};    // exclusive (the training run date)
    std::vector<PlacementTrainingData> placements;  // sorted by key
    long records_used = 0;
    long records_rejected = 0;
    long records_skipped = 0;  // well-formed but outside bucket/window

    const PlacementTrainingData* find(const PlacementKey& k) const;
};

struct IngestConfig {
    int window_days = 7;
    double max_reject_fraction = 0.01;
};

// Reads training-bucket records inside [run_date - window_days, run_date)
// and aggregates them per placement and bidder. Throws IngestError when the
// reject fraction exceeds the configured bound.
TrainingSet ingest_logs(const std::vector<std::string>& paths,
                        CivilDate run_date,
                        const IngestConfig& cfg);

// The subset of a cohort's observations the distribution fit runs on: bids
// exactly at the sent floor are the exchange's floor push, kept for
// participation but excluded from the likelihood sample.
std::vector<BidObservation> density_sample(std::span<const BidObservation> rows);

enum class PlacementStatus { Trained, FallbackTimeout, FallbackInsufficientData, FallbackError };

const char* to_string(PlacementStatus s);

struct PlacementReport {
    PlacementKey key;
    PlacementStatus status = PlacementStatus::Trained;
    std::string detail;
    double seconds = 0.0;
    long evaluations = 0;
};

struct TrainConfig {
    long min_observations = 200;
    int grid_size = 15;
    long mc_draws = 200;
    int quadrature_nodes = 128;
    double placement_budget_seconds = 30.0;
    uint64_t seed = 1;
    int parallelism = 1;
    // Floors served when a placement cannot be trained and has no prior row.
    std::optional<FloorModel> previous_model;
};

struct TrainOutcome {
    FloorModelRow row;
    PlacementReport report;
};

TrainOutcome train_placement(const PlacementTrainingData& data,
                             const TrainConfig& cfg);

struct TrainingReport {
    int trained = 0;
    int fallback_timeout = 0;
    int fallback_insufficient = 0;
    int fallback_error = 0;
    std::vector<PlacementReport> placements;

    bool all_fallback() const { return trained == 0; }
};

struct TrainResult {
    FloorModel model;
    TrainingReport report;
};

// Parallel map over placements. Output is deterministic for a given seed
// regardless of cfg.parallelism. Throws PipelineError on an empty training
// set; an all-fallback run returns normally with report.all_fallback() set.
TrainResult train_all(const TrainingSet& set, const TrainConfig& cfg);

}  // namespace floors
