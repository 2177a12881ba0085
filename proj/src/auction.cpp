#include "floors/auction.hpp"

#include <cmath>
#include <stdexcept>

namespace floors {

namespace {

void check_bids(const std::vector<BidSubmission>& bids) {
    if (bids.empty()) throw std::invalid_argument("auction: bid list must be non-empty");
    for (const auto& b : bids) {
        if (b.amount && (!(std::isfinite(*b.amount)) || *b.amount < 0.0))
            throw std::invalid_argument("auction: bid amount must be finite and non-negative");
    }
}

void check_floor(double floor) {
    if (!std::isfinite(floor) || floor < 0.0)
        throw std::invalid_argument("auction: floor must be finite and non-negative");
}

}  // namespace

AuctionOutcome resolve_first_price(const std::vector<BidSubmission>& bids, const FloorVector& floors) {
    check_bids(bids);
    check_floor(floors.regular);
    check_floor(floors.rebroadcaster);

    AuctionOutcome out;
    const BidSubmission* winner = nullptr;
    for (const auto& b : bids) {
        if (!b.amount) continue;
        if (*b.amount < floors.for_type(b.bidder_type)) continue;
        if (!winner || *b.amount > *winner->amount) winner = &b;  // strict: first-in-order wins ties
    }

    for (const auto& b : bids) {
        if (&b == winner) continue;
        if (!b.amount)
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::NoBid);
        else if (*b.amount < floors.for_type(b.bidder_type))
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::BelowFloor);
        else
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::Outbid);
    }

    if (winner) {
        out.winner = winner->bidder_id;
        out.clearing_price = *winner->amount;
    }
    return out;
}

AuctionOutcome resolve_second_price(const std::vector<BidSubmission>& bids, double floor) {
    check_bids(bids);
    check_floor(floor);

    AuctionOutcome out;
    const BidSubmission* winner = nullptr;
    double second = floor;  // lone clearing bidder pays the floor
    for (const auto& b : bids) {
        if (!b.amount || *b.amount < floor) continue;
        if (!winner || *b.amount > *winner->amount) {
            if (winner) second = std::max(second, *winner->amount);
            winner = &b;
        } else {
            second = std::max(second, *b.amount);
        }
    }

    for (const auto& b : bids) {
        if (&b == winner) continue;
        if (!b.amount)
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::NoBid);
        else if (*b.amount < floor)
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::BelowFloor);
        else
            out.losing_reasons.emplace_back(b.bidder_id, LosingReason::Outbid);
    }

    if (winner) {
        out.winner = winner->bidder_id;
        out.clearing_price = second;
    }
    return out;
}

Settlement settle(const AuctionOutcome& outcome, double adx_rev) {
    if (!std::isfinite(adx_rev) || adx_rev < 0.0)
        throw std::invalid_argument("settle: adx_rev must be finite and non-negative");
    if (outcome.is_passback()) return Settlement{adx_rev, RevenueOrigin::Adx};
    return Settlement{outcome.clearing_price, RevenueOrigin::YahooX};
}

}  // namespace floors
