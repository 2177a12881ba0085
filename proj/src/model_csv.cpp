#include "floors/model_csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "floors/errors.hpp"
#include "floors/rng.hpp"

namespace floors {

double quantize_floor(double floor, double cap) {
    double cents = std::round(floor * 100.0);
    if (cents < 0) cents = 0;
    if (cents / 100.0 > cap) cents -= 1.0;
    if (cents < 0) cents = 0;
    return cents / 100.0;
}

std::string emit_model_csv(std::vector<FloorModelRow> rows) {
    auto key = [](const FloorModelRow& r) {
        return std::tie(r.publisher_id, r.site_id, r.placement_id);
    };
    std::sort(rows.begin(), rows.end(),
              [&](const FloorModelRow& a, const FloorModelRow& b) { return key(a) < key(b); });
    for (size_t i = 1; i < rows.size(); ++i) {
        if (key(rows[i - 1]) == key(rows[i])) {
            throw ModelFormatError("duplicate placement key: " + rows[i].publisher_id + "/" +
                                   rows[i].site_id + "/" + rows[i].placement_id);
        }
    }

    std::string out;
    out.reserve(64 * (rows.size() + 1));
    out += kModelHeader;
    out += '\n';
    char buf[32];
    for (const auto& r : rows) {
        out += r.publisher_id;
        out += ',';
        out += r.site_id;
        out += ',';
        out += r.placement_id;
        out += ',';
        std::snprintf(buf, sizeof buf, "%.2f", r.regular);
        out += buf;
        out += ',';
        std::snprintf(buf, sizeof buf, "%.2f", r.rebroadcaster);
        out += buf;
        out += '\n';
    }
    return out;
}

std::string model_version_of(const std::string& csv_text) {
    uint64_t h = fnv1a64(csv_text);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

bool parse_floor_value(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out) && out >= 0;
}

}  // namespace

FloorModel parse_model_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw ModelFormatError("empty model");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kModelHeader) throw ModelFormatError("bad model header: " + line);

    FloorModel model;
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::string_view sv = line;
        std::string_view f[5];
        size_t field = 0;
        size_t start = 0;
        bool ok = true;
        for (size_t i = 0; i <= sv.size(); ++i) {
            if (i == sv.size() || sv[i] == ',') {
                if (field == 5) {
                    ok = false;
                    break;
                }
                f[field++] = sv.substr(start, i - start);
                start = i + 1;
            }
        }
        if (!ok || field != 5) {
            throw ModelFormatError("line " + std::to_string(lineno) + ": expected 5 fields");
        }
        FloorModelRow row;
        if (f[0].empty() || f[1].empty() || f[2].empty()) {
            throw ModelFormatError("line " + std::to_string(lineno) + ": empty id field");
        }
        row.publisher_id = std::string(f[0]);
        row.site_id = std::string(f[1]);
        row.placement_id = std::string(f[2]);
        if (!parse_floor_value(f[3], row.regular) || !parse_floor_value(f[4], row.rebroadcaster)) {
            throw ModelFormatError("line " + std::to_string(lineno) + ": bad floor value");
        }
        auto k = std::make_tuple(row.publisher_id, row.site_id, row.placement_id);
        if (!seen.insert(k).second) {
            throw ModelFormatError("line " + std::to_string(lineno) + ": duplicate placement");
        }
        model.rows.push_back(std::move(row));
    }
    model.version = model_version_of(csv_text);
    return model;
}

FloorModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelFormatError("cannot open model file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_csv(ss.str());
}

void write_model_file(const std::string& path, const std::string& csv_text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ModelFormatError("cannot write model file: " + tmp);
        out.write(csv_text.data(), static_cast<std::streamsize>(csv_text.size()));
        if (!out) throw ModelFormatError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw ModelFormatError("cannot rename " + tmp + " to " + path);
    }
}

}  // namespace floors
