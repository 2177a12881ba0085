#include "floors/logfmt.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "floors/errors.hpp"

namespace floors {

const char* to_string(Bucket b) {
    switch (b) {
        case Bucket::Dynamic: return "dynamic";
        case Bucket::Disabled: return "disabled";
        case Bucket::Training: return "training";
    }
    return "?";
}

std::optional<Bucket> parse_bucket(std::string_view s) {
    if (s == "dynamic") return Bucket::Dynamic;
    if (s == "disabled") return Bucket::Disabled;
    if (s == "training") return Bucket::Training;
    return std::nullopt;
}

std::optional<BidderType> parse_bidder_type(std::string_view s) {
    if (s == "regular") return BidderType::Regular;
    if (s == "rebroadcaster") return BidderType::Rebroadcaster;
    return std::nullopt;
}

const char* to_string(SettledOrigin o) {
    switch (o) {
        case SettledOrigin::YahooX: return "yahoox";
        case SettledOrigin::Adx: return "adx";
        case SettledOrigin::None: return "none";
    }
    return "?";
}

std::optional<SettledOrigin> parse_settled_origin(std::string_view s) {
    if (s == "yahoox") return SettledOrigin::YahooX;
    if (s == "adx") return SettledOrigin::Adx;
    if (s == "none") return SettledOrigin::None;
    return std::nullopt;
}

namespace {

void append_money(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    out += buf;
}

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

// Splits on commas into exactly `n` fields; false if the count differs.
bool split_fields(std::string_view line, std::string_view* out, size_t n) {
    size_t field = 0;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (field == n) return false;
            out[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    return field == n;
}

bool plausible_ts(std::string_view ts) {
    // YYYY-MM-DDTHH:MM:SS.ffffffZ
    if (ts.size() != 27) return false;
    return ts[4] == '-' && ts[7] == '-' && ts[10] == 'T' && ts[13] == ':' &&
           ts[16] == ':' && ts[19] == '.' && ts[26] == 'Z';
}

}  // namespace

std::string format_log_record(const AuctionLogRecord& r) {
    std::string out;
    out.reserve(128);
    out += r.ts;
    out += ',';
    out += to_string(r.bucket);
    out += ',';
    out += r.publisher_id;
    out += ',';
    out += r.site_id;
    out += ',';
    out += r.placement_id;
    out += ',';
    out += r.bidder_id;
    out += ',';
    out += to_string(r.bidder_type);
    out += ',';
    append_money(out, r.floor_sent);
    out += ',';
    if (r.bid) {
        append_money(out, *r.bid);
    }
    out += ',';
    out += to_string(r.settled_origin);
    out += ',';
    append_money(out, r.settled_revenue);
    return out;
}

std::optional<AuctionLogRecord> parse_log_record(std::string_view line) {
    std::string_view f[11];
    if (!split_fields(line, f, 11)) return std::nullopt;

    AuctionLogRecord r;
    if (!plausible_ts(f[0])) return std::nullopt;
    r.ts = std::string(f[0]);

    auto bucket = parse_bucket(f[1]);
    if (!bucket) return std::nullopt;
    r.bucket = *bucket;

    if (f[2].empty() || f[3].empty() || f[4].empty() || f[5].empty()) return std::nullopt;
    r.publisher_id = std::string(f[2]);
    r.site_id = std::string(f[3]);
    r.placement_id = std::string(f[4]);
    r.bidder_id = std::string(f[5]);

    auto type = parse_bidder_type(f[6]);
    if (!type) return std::nullopt;
    r.bidder_type = *type;

    if (!parse_double(f[7], r.floor_sent) || r.floor_sent < 0) return std::nullopt;

    if (f[8].empty()) {
        r.bid = std::nullopt;
    } else {
        double b;
        if (!parse_double(f[8], b)) return std::nullopt;
        // Bids at or below zero, or below the floor they saw, cannot occur
        // in a well-formed exchange log.
        if (b <= 0 || b < r.floor_sent) return std::nullopt;
        r.bid = b;
    }

    auto origin = parse_settled_origin(f[9]);
    if (!origin) return std::nullopt;
    r.settled_origin = *origin;

    if (!parse_double(f[10], r.settled_revenue) || r.settled_revenue < 0) return std::nullopt;

    return r;
}

std::pair<long, long> read_log_file(const std::string& path,
                                    const std::function<void(const AuctionLogRecord&)>& sink) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open log file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty log file: " + path);
    if (line == std::string(kLogHeader) + "\r") line.pop_back();
    if (line != kLogHeader) throw IngestError("bad log header in " + path);

    long parsed = 0;
    long rejected = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto rec = parse_log_record(line);
        if (rec) {
            ++parsed;
            sink(*rec);
        } else {
            ++rejected;
        }
    }
    return {parsed, rejected};
}

struct LogWriter::Impl {
    std::ofstream out;
    std::string buf;
};

LogWriter::LogWriter(const std::string& path) : impl_(new Impl) {
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw IngestError("cannot open log file for writing: " + path);
    }
    impl_->buf.reserve(1 << 16);
    impl_->buf += kLogHeader;
    impl_->buf += '\n';
}

LogWriter::~LogWriter() {
    flush();
    delete impl_;
}

void LogWriter::write(const AuctionLogRecord& r) {
    impl_->buf += format_log_record(r);
    impl_->buf += '\n';
    if (impl_->buf.size() > (1 << 16)) flush();
}

void LogWriter::flush() {
    if (!impl_->buf.empty()) {
        impl_->out.write(impl_->buf.data(), static_cast<std::streamsize>(impl_->buf.size()));
        impl_->buf.clear();
    }
    impl_->out.flush();
}

}  // namespace floors
