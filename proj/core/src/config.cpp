#include "epimem/config.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epimem {

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    for (const auto& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error("config line " + std::to_string(line_no) + ": empty key");
        cfg.set(std::move(key), trim(line.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str());
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
    auto it = values_.find(std::string(key));
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key, std::string_view fallback) const {
    return get(key).value_or(std::string(fallback));
}

namespace {

template <typename T>
T parse_number(std::string_view key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end) {
        throw Error("config key " + std::string(key) + ": not a number: " + value);
    }
    return out;
}

}  // namespace

std::int64_t KeyValueConfig::get_int(std::string_view key, std::int64_t fallback) const {
    auto v = get(key);
    return v ? parse_number<std::int64_t>(key, *v) : fallback;
}

std::uint64_t KeyValueConfig::get_uint(std::string_view key, std::uint64_t fallback) const {
    auto v = get(key);
    return v ? parse_number<std::uint64_t>(key, *v) : fallback;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        double out = std::stod(*v, &used);
        if (used != v->size()) throw Error("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw Error("config key " + std::string(key) + ": not a real number: " + *v);
    }
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    const std::string s = to_lower(*v);
    if (s == "true" || s == "on" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "0" || s == "no") return false;
    throw Error("config key " + std::string(key) + ": not a boolean: " + *v);
}

SeedRange SeedRange::parse(std::string_view text) {
    SeedRange r;
    const std::string s = trim(text);
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        r.first = r.last = parse_number<std::uint64_t>("seeds", s);
    } else {
        r.first = parse_number<std::uint64_t>("seeds", s.substr(0, dots));
        r.last = parse_number<std::uint64_t>("seeds", s.substr(dots + 2));
    }
    if (r.last < r.first) throw Error("empty seed range " + s);
    return r;
}

std::string SeedRange::to_string() const { return std::to_string(first) + ".." + std::to_string(last); }

std::string stable_hash(std::string_view text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace epimem
