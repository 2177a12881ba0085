#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floors/auction.hpp"
#include "floors/bid_fit.hpp"
#include "floors/weibull.hpp"

namespace floors {

// A bidder's fitted latent bid distribution plus its entry probability.
struct BidDistributionModel {
    FloorLinkModel link;
    ParticipationModel participation;
};

struct PlacementBidder {
    std::string bidder_id;
    BidderType type = BidderType::Regular;
    BidDistributionModel model;
};

// Everything the objective needs about one unit of inventory.
struct PlacementContext {
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;
    std::vector<PlacementBidder> bidders;
    double adx_rev = 0.0;  // expected passback revenue, CPM dollars
};

struct RevenueEstimate {
    double value = 0.0;
    double yahoox_component = 0.0;
    double adx_component = 0.0;
    double mc_std_error = 0.0;
};

struct EvalOptions {
    int quadrature_nodes = 128;
    // Upper integration bound quantile of the winner's latent distribution.
    // 1 - 1e-5 keeps the truncated-tail bias well under 1e-3 relative even
    // for heavy exponential-like shapes.
    double tail_quantile = 0.99999;
};

// Evaluates the expected-revenue objective for one placement. Participation
// vectors are drawn once per (seed, mc_draws, roster) and shared across all
// floor evaluations, so two floor vectors compared under the same evaluator
// see identical participation noise.
class RevenueEvaluator {
public:
    RevenueEvaluator(const PlacementContext& ctx, int mc_draws, std::uint64_t seed, EvalOptions opt = {});

    // Integral of b * prod_{j != i, j in participants} F_j(b | rho_j) dF_i(b | rho_i)
    // over [rho_i, B_max] by fixed-order Gauss-Legendre quadrature.
    double expected_bidder_revenue(std::size_t bidder, const std::vector<double>& floors_per_bidder,
                                   std::uint32_t participant_mask) const;

    // prod_{i in participants} F_i(rho_i | rho_i); empty set gives 1.
    double prob_all_below(const std::vector<double>& floors_per_bidder, std::uint32_t participant_mask) const;

    RevenueEstimate expected_revenue(const FloorVector& floors) const;
    RevenueEstimate expected_revenue_per_bidder(const std::vector<double>& floors_per_bidder) const;

    std::vector<double> floors_by_type(const FloorVector& floors) const;
    const PlacementContext& context() const { return *ctx_; }

private:
    const PlacementContext* ctx_;
    std::vector<double> gl_nodes_;    // on [0, 1]
    std::vector<double> gl_weights_;  // scaled for unit interval
    double tail_quantile_;
    std::vector<std::uint32_t> participation_draws_;
};

// Convenience wrappers matching the one-shot call shape.
double expected_bidder_revenue(std::size_t bidder, const FloorVector& floors,
                               const std::vector<std::size_t>& participants, const PlacementContext& ctx,
                               EvalOptions opt = {});
double prob_all_below(const FloorVector& floors, const std::vector<std::size_t>& participants,
                      const PlacementContext& ctx);
RevenueEstimate expected_revenue(const FloorVector& floors, const PlacementContext& ctx, int mc_draws,
                                 std::uint64_t seed, EvalOptions opt = {});

struct OptimizerConfig {
    double floor_cap = 1.0;  // optimization box is [0, floor_cap]^2
    int grid_size = 15;
    int mc_draws = 200;
    std::uint64_t seed = 0;
    EvalOptions eval;
    int nm_max_iterations = 120;
    double nm_f_tolerance = 1e-9;
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct OptimizeResult {
    FloorVector floors;
    RevenueEstimate revenue;
    bool timed_out = false;
    long evaluations = 0;
};

// Coarse grid scan over the box followed by Nelder-Mead refinement from the
// best cell, all under one common-random-numbers evaluator.
OptimizeResult optimize_floors(const PlacementContext& ctx, const OptimizerConfig& cfg);

}  // namespace floors
