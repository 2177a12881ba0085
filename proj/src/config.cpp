#include "floors/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "floors/errors.hpp"

namespace floors {

namespace {

std::string trim(std::string_view s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        cfg.values_[key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

void Config::set(const std::string& key, std::string value) {
    values_[key] = std::move(value);
}

std::optional<std::string> Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto v = get(key);
    return v ? *v : fallback;
}

std::string Config::require_string(const std::string& key) const {
    auto v = get(key);
    if (!v) throw ConfigError("missing required config key: " + key);
    return *v;
}

namespace {

double to_double(const std::string& key, const std::string& s) {
    double out;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out)) {
        throw ConfigError("config key " + key + ": not a number: " + s);
    }
    return out;
}

long to_long(const std::string& key, const std::string& s) {
    long out;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("config key " + key + ": not an integer: " + s);
    }
    return out;
}

}  // namespace

double Config::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    return v ? to_double(key, *v) : fallback;
}

double Config::require_double(const std::string& key) const {
    return to_double(key, require_string(key));
}

long Config::get_long(const std::string& key, long fallback) const {
    auto v = get(key);
    return v ? to_long(key, *v) : fallback;
}

long Config::require_long(const std::string& key) const {
    return to_long(key, require_string(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    throw ConfigError("config key " + key + ": not a boolean: " + *v);
}

std::vector<std::pair<std::string, std::string>> Config::with_prefix(
    const std::string& prefix) const {
    std::vector<std::pair<std::string, std::string>> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.emplace_back(it->first.substr(prefix.size()), it->second);
    }
    return out;
}

std::string resolve_setting(const std::optional<std::string>& flag_value,
                            const char* env_name,
                            const Config& cfg,
                            const std::string& key,
                            const std::string& fallback) {
    if (flag_value) return *flag_value;
    if (env_name) {
        if (const char* env = std::getenv(env_name)) return env;
    }
    if (auto v = cfg.get(key)) return *v;
    return fallback;
}

}  // namespace floors
