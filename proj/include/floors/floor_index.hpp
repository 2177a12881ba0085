#pragma once

#include <memory>
#include <string>
#include <unordered_map>

#include "floors/auction.hpp"
#include "floors/model_csv.hpp"

namespace floors {

struct FloorPair {
    double regular = 0.0;
    double rebroadcaster = 0.0;

    double for_type(BidderType t) const {
        return t == BidderType::Regular ? regular : rebroadcaster;
    }
};

enum class MatchLevel { Placement, Site, Publisher, Global };

const char* to_string(MatchLevel level);

struct FloorQuery {
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;
    BidderType bidder_type = BidderType::Regular;
};

struct FloorAnswer {
    double floor = 0.0;
    MatchLevel match_level = MatchLevel::Global;
    std::string model_version;
};

// Immutable three-level lookup structure. Unknown keys fall back to the
// median floors of the node's siblings, then to the global default, so a
// syntactically valid query always gets an answer.
class FloorIndex {
public:
    static FloorIndex from_model(const FloorModel& model, double global_default);

    FloorAnswer lookup(const FloorQuery& q) const;

    const std::string& version() const { return version_; }
    size_t row_count() const { return row_count_; }

private:
    struct SiteNode {
        std::unordered_map<std::string, FloorPair> placements;
        FloorPair fallback;  // median of this site's placements, per field
    };
    struct PublisherNode {
        std::unordered_map<std::string, SiteNode> sites;
        FloorPair fallback;  // median of this publisher's site fallbacks
    };

    std::unordered_map<std::string, PublisherNode> publishers_;
    FloorPair global_;
    std::string version_;
    size_t row_count_ = 0;
};

// Shared handle readers snapshot once per lookup; swaps are atomic pointer
// replacements, so a reader sees entirely the old or entirely the new index.
class IndexHolder {
public:
    IndexHolder() = default;

    std::shared_ptr<const FloorIndex> get() const;
    void swap(std::shared_ptr<const FloorIndex> next);

private:
    std::shared_ptr<const FloorIndex> current_;
};

}  // namespace floors
