#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace epimem {

// Flat "key = value" text configuration. '#' starts a comment; keys are
// dotted paths such as retrieval.top_k.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text);
    static KeyValueConfig load(const std::filesystem::path& path);

    void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }
    bool has(std::string_view key) const { return values_.find(std::string(key)) != values_.end(); }

    std::optional<std::string> get(std::string_view key) const;
    std::string get_string(std::string_view key, std::string_view fallback) const;
    std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
    std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
    double get_double(std::string_view key, double fallback) const;
    bool get_bool(std::string_view key, bool fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Inclusive seed range written "a..b" (or a single integer).
struct SeedRange {
    std::uint64_t first = 1;
    std::uint64_t last = 1;

    static SeedRange parse(std::string_view text);
    std::string to_string() const;
};

// Stable 64-bit FNV-1a, rendered as 16 hex digits.
std::string stable_hash(std::string_view text);

}  // namespace epimem
