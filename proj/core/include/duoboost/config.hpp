#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace duoboost {

/// Flat key=value configuration with dotted sections, e.g. `step.mode=grid`.
/// Lines starting with '#' and blank lines are skipped; later duplicates win.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_str(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    std::string require(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

    /// Sorted `key=value` lines; the canonical form used for echo and hashing.
    std::string canonical_text() const;

    /// FNV-1a 64 over the canonical text, hex-encoded.
    std::string hash() const;

private:
    std::map<std::string, std::string> entries_;
};

} // namespace duoboost
