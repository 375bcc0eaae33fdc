#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

std::string to_lower(std::string_view text);

// Lowercased maximal alphanumeric runs. This is the similarity tokenizer
// shared by every lexical scorer.
std::vector<std::string> word_tokens(std::string_view text);

// Evidence token accounting: maximal alphanumeric runs plus every
// non-space punctuation character, after lowercasing.
std::size_t token_count(std::string_view text);

// Longest prefix of `text` that holds at most `max_tokens` accounting tokens.
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

// Bag-of-tokens overlap F1 in [0, 1]; zero when either side is empty.
double token_f1(const std::vector<std::string>& a, const std::vector<std::string>& b);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

// Function words ignored by keyword-driven heuristics (generic answerer,
// generic compression, note keywords).
bool is_stopword(std::string_view token);

}  // namespace epimem
