#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "floors/auction.hpp"

namespace floors {

enum class Bucket { Dynamic, Disabled, Training };

const char* to_string(Bucket b);
std::optional<Bucket> parse_bucket(std::string_view s);
std::optional<BidderType> parse_bidder_type(std::string_view s);

enum class SettledOrigin { YahooX, Adx, None };

const char* to_string(SettledOrigin o);
std::optional<SettledOrigin> parse_settled_origin(std::string_view s);

// One bid-request/bidder pair. Settlement fields repeat across the records
// of a request; records of one request share a timestamp and are adjacent
// in the file.
struct AuctionLogRecord {
    std::string ts;  // ISO-8601 UTC, microsecond resolution
    Bucket bucket = Bucket::Training;
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;
    std::string bidder_id;
    BidderType bidder_type = BidderType::Regular;
    double floor_sent = 0.0;
    std::optional<double> bid;
    SettledOrigin settled_origin = SettledOrigin::None;
    double settled_revenue = 0.0;
};

inline constexpr const char* kLogHeader =
    "ts,bucket,publisherId,siteId,placementId,bidderId,bidderType,floorSent,bid,settledOrigin,settledRevenue";

std::string format_log_record(const AuctionLogRecord& r);

// Parses one data line; null on any malformed field. Observed bids below
// the floor they were sent are malformed by the log contract.
std::optional<AuctionLogRecord> parse_log_record(std::string_view line);

// Streams a log file, calling sink per record; returns (parsed, rejected)
// counts. Throws IngestError if the header is missing.
std::pair<long, long> read_log_file(const std::string& path,
                                    const std::function<void(const AuctionLogRecord&)>& sink);

class LogWriter {
public:
    explicit LogWriter(const std::string& path);
    ~LogWriter();
    LogWriter(const LogWriter&) = delete;
    LogWriter& operator=(const LogWriter&) = delete;

    void write(const AuctionLogRecord& r);
    void flush();

private:
    struct Impl;
    Impl* impl_;
};

}  // namespace floors
