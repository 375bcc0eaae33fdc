#include "epimem/config.hpp"
#include "epimem/error.hpp"

#include <gtest/gtest.h>

using namespace epimem;

TEST(KeyValueConfig, ParsesCommentsAndBlanks) {
    const auto kv = KeyValueConfig::parse("# run\nenv = textadv\n\nbudget=96\nrtk = on\n");
    EXPECT_EQ(kv.get_string("env", ""), "textadv");
    EXPECT_EQ(kv.get_int("budget", 0), 96);
    EXPECT_TRUE(kv.get_bool("rtk", false));
    EXPECT_FALSE(kv.has("method"));
    EXPECT_EQ(kv.get_string("method", "s3mem"), "s3mem");
}

TEST(KeyValueConfig, RejectsMalformedLine) { EXPECT_THROW(KeyValueConfig::parse("no equals sign"), Error); }

TEST(SeedRange, ParseAndPrint) {
    const auto r = SeedRange::parse("3..7");
    EXPECT_EQ(r.first, 3u);
    EXPECT_EQ(r.last, 7u);
    EXPECT_EQ(SeedRange::parse(r.to_string()).last, 7u);
    EXPECT_THROW(SeedRange::parse("7..3"), Error);
}

TEST(StableHash, DeterministicAndSensitive) {
    EXPECT_EQ(stable_hash("abc"), stable_hash("abc"));
    EXPECT_NE(stable_hash("abc"), stable_hash("abd"));
}
