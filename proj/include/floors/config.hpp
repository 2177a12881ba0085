#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace floors {

// Flat key=value configuration. Lines starting with '#' and blank lines are
// skipped; whitespace around keys and values is trimmed. Later duplicates
// win, which lets an include-style layering work with plain concatenation.
class Config {
public:
    Config() = default;

    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, std::string value);

    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;

    long get_long(const std::string& key, long fallback) const;
    long require_long(const std::string& key) const;

    bool get_bool(const std::string& key, bool fallback) const;

    // Keys with the given prefix, prefix stripped, insertion order of the
    // underlying map (lexicographic).
    std::vector<std::pair<std::string, std::string>> with_prefix(const std::string& prefix) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Resolution order used by the CLI: explicit flag, then environment
// variable, then config file entry, then fallback.
std::string resolve_setting(const std::optional<std::string>& flag_value,
                            const char* env_name,
                            const Config& cfg,
                            const std::string& key,
                            const std::string& fallback);

}  // namespace floors
