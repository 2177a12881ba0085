#pragma once

#include <optional>
#include <span>
#include <vector>

#include "floors/weibull.hpp"

namespace floors {

// One randomized-floor exposure for a single bidder. Observed bids are
// left-truncated at the floor that was sent; absence means no response.
struct BidObservation {
    double floor_sent = 0.0;
    std::optional<double> bid;
};

struct ParticipationModel {
    double rate = 0.0;  // probability in [0, 1]
    long support_count = 0;
};

struct FitConfig {
    long min_observations = 200;
    double nll_tolerance = 1e-8;
    int max_iterations = 500;
};

// Left-truncated negative log-likelihood of the latent Weibull under the
// floor link. Only observations with bids contribute; no-bid rows belong to
// the participation model. Coefficients that push shape or scale out of
// numeric range evaluate to a large penalty rather than overflowing.
double truncated_neg_log_likelihood(const FloorLinkModel& coeffs, std::span<const BidObservation> data);

// Maximum-likelihood fit of the floor link by Nelder-Mead from a
// moment-matched start. Falls back to a floor-independent link when the
// data spans fewer than two distinct floors.
FloorLinkModel fit_bid_model(std::span<const BidObservation> data, const FitConfig& cfg = {});

// Share of requests the bidder answered with any bid, pooled over floors.
ParticipationModel estimate_participation(std::span<const BidObservation> records);

}  // namespace floors
