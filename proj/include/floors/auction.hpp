#pragma once

#include <optional>
#include <string>
#include <vector>

namespace floors {

enum class BidderType { Regular, Rebroadcaster };

inline const char* to_string(BidderType t) { return t == BidderType::Regular ? "regular" : "rebroadcaster"; }

// One floor per bidder type, in CPM dollars.
struct FloorVector {
    double regular = 0.0;
    double rebroadcaster = 0.0;

    double for_type(BidderType t) const { return t == BidderType::Regular ? regular : rebroadcaster; }
    bool operator==(const FloorVector&) const = default;
};

// A bidder's response to one bid request; amount absent means no bid.
struct BidSubmission {
    std::string bidder_id;
    BidderType bidder_type = BidderType::Regular;
    std::optional<double> amount;  // CPM dollars, >= 0 when present

    static BidSubmission no_bid(std::string id, BidderType type) { return {std::move(id), type, std::nullopt}; }
    static BidSubmission of(std::string id, BidderType type, double amount) { return {std::move(id), type, amount}; }
};

enum class LosingReason { BelowFloor, Outbid, NoBid };

struct AuctionOutcome {
    std::optional<std::string> winner;  // empty = passback
    double clearing_price = 0.0;
    std::vector<std::pair<std::string, LosingReason>> losing_reasons;

    bool is_passback() const { return !winner.has_value(); }
};

enum class RevenueOrigin { YahooX, Adx };

struct Settlement {
    double revenue = 0.0;
    RevenueOrigin origin = RevenueOrigin::YahooX;
};

// Highest bid at or above its type's floor wins and pays its bid;
// exact ties go to the earliest submission. No clearing bid means passback.
AuctionOutcome resolve_first_price(const std::vector<BidSubmission>& bids, const FloorVector& floors);

// Reference mechanism with a single scalar floor: the winner pays the
// maximum of the floor and the second-highest clearing bid.
AuctionOutcome resolve_second_price(const std::vector<BidSubmission>& bids, double floor);

// Passback monetizes via the outside exchange at its expected revenue.
Settlement settle(const AuctionOutcome& outcome, double adx_rev);

}  // namespace floors
