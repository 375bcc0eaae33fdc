#include "epimem/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace epimem {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : text) {
        if (is_alnum(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::size_t token_count(std::string_view text) {
    std::size_t count = 0;
    bool in_run = false;
    for (char c : text) {
        if (is_alnum(c)) {
            if (!in_run) ++count;
            in_run = true;
        } else {
            in_run = false;
            if (!is_space(c)) ++count;
        }
    }
    return count;
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
    std::size_t count = 0;
    std::size_t end = 0;
    bool in_run = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_alnum(c)) {
            if (!in_run) {
                if (count == max_tokens) break;
                ++count;
            }
            in_run = true;
            end = i + 1;
        } else {
            in_run = false;
            if (is_space(c)) continue;
            if (count == max_tokens) break;
            ++count;
            end = i + 1;
        }
    }
    return std::string(text.substr(0, end));
}

double token_f1(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0.0;
    std::map<std::string_view, int> counts;
    for (const auto& t : a) ++counts[t];
    std::size_t overlap = 0;
    for (const auto& t : b) {
        auto it = counts.find(t);
        if (it != counts.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) return 0.0;
    const double precision = static_cast<double>(overlap) / static_cast<double>(b.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(a.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string trim(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return std::string(text.substr(b, e - b));
}

bool is_stopword(std::string_view token) {
    static constexpr std::array<std::string_view, 34> kStop = {
        "a",     "an",   "and",  "at",    "did",  "do",  "does", "for",  "happen",
        "happened", "how", "in", "is",    "it",   "many", "of",  "on",   "or",
        "step",  "steps", "the", "to",    "was",  "were", "what", "when", "where",
        "which", "who",  "why",  "agent", "times"};
    return std::find(kStop.begin(), kStop.end(), token) != kStop.end();
}

}  // namespace epimem
