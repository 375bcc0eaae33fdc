#include "epimem/text.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cctype>

using namespace epimem;

namespace {

// Reference counter written as a character-class state machine.
std::size_t reference_count(const std::string& s) {
    std::size_t n = 0;
    bool in_run = false;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            if (!in_run) ++n;
            in_run = true;
        } else {
            in_run = false;
            if (!std::isspace(c)) ++n;
        }
    }
    return n;
}

}  // namespace

TEST(TokenCount, Empty) { EXPECT_EQ(token_count(""), 0u); }

TEST(TokenCount, KeyValueLine) { EXPECT_EQ(token_count("step=9 action=collect"), 6u); }

TEST(TokenCount, MatchesReferenceCounter) {
    std::mt19937_64 rng(11);
    const std::string chars = "abcXYZ019 _=:,;()[]|.-\t";
    std::uniform_int_distribution<std::size_t> pick(0, chars.size() - 1);
    std::uniform_int_distribution<std::size_t> len(0, 60);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        for (std::size_t n = len(rng); n > 0; --n) s += chars[pick(rng)];
        ASSERT_EQ(token_count(s), reference_count(s)) << s;
    }
}

TEST(TruncateTokens, KeepsLongestPrefixWithinLimit) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        std::string s;
        for (int w = 0; w < 12; ++w) s += epimem::testing::random_word(rng) + (w % 3 ? " " : "=");
        for (std::size_t k = 0; k < 30; k += 3) {
            const std::string cut = truncate_tokens(s, k);
            ASSERT_LE(token_count(cut), k);
            ASSERT_EQ(s.rfind(cut, 0), 0u);
            if (cut.size() < s.size()) {
                // Adding the next non-space character must exceed the limit.
                std::size_t next = cut.size();
                while (next < s.size() && s[next] == ' ') ++next;
                if (next < s.size()) {
                    ASSERT_GT(token_count(s.substr(0, next + 1)), k);
                }
            }
        }
    }
}

TEST(WordTokens, LowercasesAlnumRuns) {
    EXPECT_EQ(word_tokens("Gain_Item(Wood) at step=7"),
              (std::vector<std::string>{"gain", "item", "wood", "at", "step", "7"}));
}

TEST(TokenF1, Basics) {
    EXPECT_DOUBLE_EQ(token_f1({}, {"a"}), 0.0);
    EXPECT_DOUBLE_EQ(token_f1({"a", "b"}, {"a", "b"}), 1.0);
    // overlap 1, precision 1/2, recall 1/1
    EXPECT_NEAR(token_f1({"a", "b"}, {"a"}), 2.0 / 3.0, 1e-12);
    // bag semantics: repeated tokens count once per match
    EXPECT_NEAR(token_f1({"a", "a"}, {"a"}), 2.0 / 3.0, 1e-12);
}
