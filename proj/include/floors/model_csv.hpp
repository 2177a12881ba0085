#pragma once

#include <string>
#include <vector>

#include "floors/auction.hpp"

namespace floors {

struct FloorModelRow {
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;
    double regular = 0.0;
    double rebroadcaster = 0.0;

    double for_type(BidderType t) const {
        return t == BidderType::Regular ? regular : rebroadcaster;
    }
    bool operator==(const FloorModelRow&) const = default;
};

struct FloorModel {
    std::vector<FloorModelRow> rows;
    std::string version;  // content hash of the serialized form
};

inline constexpr const char* kModelHeader = "publisherId,siteId,placementId,Regular,Rebroadcaster";

// Rounds to whole cents, then steps down one cent if rounding crossed cap.
double quantize_floor(double floor, double cap);

// Serializes rows sorted by (publisher, site, placement), two decimals,
// trailing newline. Rows are deduplicated by key; duplicate keys throw.
std::string emit_model_csv(std::vector<FloorModelRow> rows);

// FNV-1a 64 over the exact serialized bytes, as 16 lowercase hex digits.
std::string model_version_of(const std::string& csv_text);

// Parses model CSV text. Throws ModelFormatError on any structural problem:
// bad header, wrong field count, non-numeric or negative floors, duplicate
// placement keys.
FloorModel parse_model_csv(const std::string& csv_text);

FloorModel load_model_file(const std::string& path);
void write_model_file(const std::string& path, const std::string& csv_text);

}  // namespace floors
