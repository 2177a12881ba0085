#pragma once

#include <compare>
#include <string>

namespace floors {

struct PlacementKey {
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;

    auto operator<=>(const PlacementKey&) const = default;
    std::string display() const { return publisher_id + "/" + site_id + "/" + placement_id; }
};

}  // namespace floors
