#include "floors/floor_index.hpp"

#include <atomic>
#include <vector>

#include "floors/stats.hpp"

namespace floors {

const char* to_string(MatchLevel level) {
    switch (level) {
        case MatchLevel::Placement: return "placement";
        case MatchLevel::Site: return "site";
        case MatchLevel::Publisher: return "publisher";
        case MatchLevel::Global: return "global";
    }
    return "?";
}

FloorIndex FloorIndex::from_model(const FloorModel& model, double global_default) {
    FloorIndex idx;
    idx.version_ = model.version;
    idx.global_ = {global_default, global_default};
    idx.row_count_ = model.rows.size();

    for (const auto& row : model.rows) {
        auto& site = idx.publishers_[row.publisher_id].sites[row.site_id];
        site.placements[row.placement_id] = {row.regular, row.rebroadcaster};
    }

    for (auto& [pub_id, pub] : idx.publishers_) {
        std::vector<double> site_reg;
        std::vector<double> site_reb;
        for (auto& [site_id, site] : pub.sites) {
            std::vector<double> reg;
            std::vector<double> reb;
            reg.reserve(site.placements.size());
            reb.reserve(site.placements.size());
            for (const auto& [pl_id, pair] : site.placements) {
                reg.push_back(pair.regular);
                reb.push_back(pair.rebroadcaster);
            }
            site.fallback = {median(reg), median(reb)};
            site_reg.push_back(site.fallback.regular);
            site_reb.push_back(site.fallback.rebroadcaster);
        }
        pub.fallback = {median(site_reg), median(site_reb)};
    }
    return idx;
}

FloorAnswer FloorIndex::lookup(const FloorQuery& q) const {
    FloorAnswer ans;
    ans.model_version = version_;

    auto pub = publishers_.find(q.publisher_id);
    if (pub == publishers_.end()) {
        ans.floor = global_.for_type(q.bidder_type);
        ans.match_level = MatchLevel::Global;
        return ans;
    }
    auto site = pub->second.sites.find(q.site_id);
    if (site == pub->second.sites.end()) {
        ans.floor = pub->second.fallback.for_type(q.bidder_type);
        ans.match_level = MatchLevel::Publisher;
        return ans;
    }
    auto pl = site->second.placements.find(q.placement_id);
    if (pl == site->second.placements.end()) {
        ans.floor = site->second.fallback.for_type(q.bidder_type);
        ans.match_level = MatchLevel::Site;
        return ans;
    }
    ans.floor = pl->second.for_type(q.bidder_type);
    ans.match_level = MatchLevel::Placement;
    return ans;
}

// GCC 11 lacks std::atomic<std::shared_ptr>; the free-function overloads
// provide the same lock-free swap semantics.
std::shared_ptr<const FloorIndex> IndexHolder::get() const {
    return std::atomic_load_explicit(&current_, std::memory_order_acquire);
}

void IndexHolder::swap(std::shared_ptr<const FloorIndex> next) {
    std::atomic_store_explicit(&current_, std::move(next), std::memory_order_release);
}

}  // namespace floors
