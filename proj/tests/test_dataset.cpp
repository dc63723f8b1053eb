#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <string>

#include "passcomb/dataset.hpp"

using namespace passcomb;

namespace {

TransactionDb load(const std::string& name) {
  std::ifstream f(std::string(PASSCOMB_DATA_DIR) + "/" + name);
  if (!f) throw std::runtime_error("missing dataset " + name);
  return parse_fimi(f);
}

}  // namespace

TEST(ParseFimi, RecodesByAscendingLabel) {
  TransactionDb db = parse_fimi("1 2 3\n2 3\n");
  EXPECT_EQ(db.size(), 2u);
  EXPECT_EQ(db.item_count(), 3u);
  EXPECT_EQ(db[0], (Transaction{0, 1, 2}));
  EXPECT_EQ(db[1], (Transaction{1, 2}));
}

TEST(ParseFimi, DropsDuplicatesAndSorts) {
  TransactionDb db = parse_fimi("3 3 1\n");
  ASSERT_EQ(db.size(), 1u);
  EXPECT_EQ(db.item_count(), 2u);
  EXPECT_EQ(db[0], (Transaction{0, 1}));
  EXPECT_EQ(db.label(0), 1u);
  EXPECT_EQ(db.label(1), 3u);
}

TEST(ParseFimi, LabelsNeedNotBeContiguous) {
  TransactionDb db = parse_fimi("100 7\n7 4000000000\n");
  EXPECT_EQ(db.labels(), (std::vector<ItemLabel>{7, 100, 4000000000ULL}));
  EXPECT_EQ(db[0], (Transaction{0, 1}));
  EXPECT_EQ(db[1], (Transaction{0, 2}));
  ItemId id = 99;
  EXPECT_TRUE(db.find_id(100, id));
  EXPECT_EQ(id, 1u);
  EXPECT_FALSE(db.find_id(8, id));
}

TEST(ParseFimi, EmptyInputIsEmptyDb) {
  TransactionDb db = parse_fimi("");
  EXPECT_EQ(db.size(), 0u);
  EXPECT_EQ(db.item_count(), 0u);
}

TEST(ParseFimi, BlankLinesAndExtraWhitespaceSkipped) {
  TransactionDb db = parse_fimi("\n  5\t6  \r\n\n   \n6\n");
  EXPECT_EQ(db.size(), 2u);
  EXPECT_EQ(db[0], (Transaction{0, 1}));
  EXPECT_EQ(db[1], (Transaction{1}));
}

TEST(ParseFimi, BadTokenNamesLine) {
  try {
    parse_fimi("1 2\n3 x4\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("x4"), std::string::npos);
  }
  EXPECT_THROW(parse_fimi("-1\n"), ParseError);
  EXPECT_THROW(parse_fimi("1.5\n"), ParseError);
}

TEST(ParseFimi, RoundTripIsIdentity) {
  TransactionDb db = generate_synthetic({.n = 300, .item_count = 50, .avg_width = 6, .seed = 3});
  std::string text = to_fimi(db);
  TransactionDb back = parse_fimi(text);
  EXPECT_EQ(back, db);
  EXPECT_EQ(to_fimi(back), text);
}

TEST(Stats, EmptyAndSingle) {
  DatasetStats e = stats(TransactionDb{});
  EXPECT_EQ(e.n, 0u);
  EXPECT_EQ(e.item_count, 0u);
  EXPECT_EQ(e.avg_width, 0.0);
  DatasetStats one = stats(parse_fimi("1 2 3 4 5\n"));
  EXPECT_EQ(one.n, 1u);
  EXPECT_EQ(one.avg_width, 5.0);
}

TEST(Stats, AvgWidthIsExactMean) {
  DatasetStats s = stats(parse_fimi("1 2\n1 2 3\n4\n"));
  EXPECT_EQ(s.total_items, 6u);
  EXPECT_DOUBLE_EQ(s.avg_width, 2.0);
}

TEST(Stats, ChessShape) {
  DatasetStats s = stats(load("chess.dat"));
  EXPECT_EQ(s.n, 3196u);
  EXPECT_EQ(s.item_count, 75u);
  EXPECT_DOUBLE_EQ(s.avg_width, 37.0);
}

TEST(Stats, MushroomShape) {
  DatasetStats s = stats(load("mushroom.dat"));
  EXPECT_EQ(s.n, 8124u);
  EXPECT_EQ(s.item_count, 119u);
  EXPECT_DOUBLE_EQ(s.avg_width, 23.0);
}

TEST(MakeSplits, KnownSplitCounts) {
  SplitPlan mush = make_splits(8124, 1000);
  ASSERT_EQ(mush.count(), 9u);
  EXPECT_EQ(mush.boundaries.back().size(), 124u);
  EXPECT_EQ(make_splits(3196, 400).count(), 8u);
  EXPECT_EQ(make_splits(5, 10).count(), 1u);
  EXPECT_EQ(make_splits(0, 10).count(), 0u);
}

TEST(MakeSplits, ZeroLinesRejected) { EXPECT_THROW(make_splits(10, 0), ArgumentError); }

TEST(MakeSplits, CoverExactlyForManySizes) {
  for (std::size_t n : {0u, 1u, 7u, 100u, 1001u}) {
    for (std::size_t lps : {1u, 3u, 10u, 1000u, 5000u}) {
      SplitPlan p = make_splits(n, lps);
      EXPECT_EQ(p.count(), (n + lps - 1) / lps);
      std::size_t at = 0;
      for (std::size_t i = 0; i < p.count(); ++i) {
        const auto& r = p.boundaries[i];
        EXPECT_EQ(r.begin, at);
        if (i + 1 < p.count()) EXPECT_EQ(r.size(), lps);
        EXPECT_GT(r.size(), 0u);
        at = r.end;
      }
      EXPECT_EQ(at, n);
    }
  }
}

TEST(MakeSplits, UnionOfSplitsIsTheDb) {
  TransactionDb db = generate_synthetic({.n = 257, .item_count = 30, .avg_width = 4, .seed = 11});
  for (std::size_t lps : {1u, 16u, 100u, 257u, 999u}) {
    std::vector<Transaction> seen;
    for (const auto& r : make_splits(db, lps).boundaries)
      for (const auto& t : split_view(db, r)) seen.push_back(t);
    EXPECT_EQ(seen, db.transactions());
  }
}

TEST(Generator, Deterministic) {
  GeneratorConfig c{.n = 100, .item_count = 20, .avg_width = 5, .seed = 42};
  EXPECT_EQ(to_fimi(generate_synthetic(c)), to_fimi(generate_synthetic(c)));
  c.seed = 43;
  GeneratorConfig d{.n = 100, .item_count = 20, .avg_width = 5, .seed = 42};
  EXPECT_NE(to_fimi(generate_synthetic(c)), to_fimi(generate_synthetic(d)));
}

TEST(Generator, Minimal) {
  TransactionDb db = generate_synthetic({.n = 1, .item_count = 1, .avg_width = 1, .seed = 0});
  ASSERT_EQ(db.size(), 1u);
  EXPECT_EQ(db[0], (Transaction{0}));
  EXPECT_EQ(db.label(0), 0u);
}

TEST(Generator, C20d10kShape) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    DatasetStats s = stats(generate_synthetic({.n = 10000, .item_count = 192, .avg_width = 20, .seed = seed}));
    EXPECT_EQ(s.n, 10000u);
    EXPECT_LE(s.item_count, 192u);
    EXPECT_NEAR(s.avg_width, 20.0, 1.0);
  }
}

TEST(Generator, SkewedPopularity) {
  TransactionDb db = generate_synthetic({.n = 5000, .item_count = 50, .avg_width = 5, .seed = 9});
  std::vector<std::size_t> support(db.item_count(), 0);
  for (const auto& t : db.transactions())
    for (ItemId i : t) ++support[i];
  // Labels equal popularity rank; the head must dominate the tail.
  EXPECT_GT(support.front(), 4 * support.back());
}

TEST(Generator, RejectsBadConfig) {
  EXPECT_THROW(generate_synthetic({.n = 0, .item_count = 5, .avg_width = 2, .seed = 0}), ArgumentError);
  EXPECT_THROW(generate_synthetic({.n = 5, .item_count = 0, .avg_width = 1, .seed = 0}), ArgumentError);
  EXPECT_THROW(generate_synthetic({.n = 5, .item_count = 5, .avg_width = 0.5, .seed = 0}), ArgumentError);
  EXPECT_THROW(generate_synthetic({.n = 5, .item_count = 5, .avg_width = 6, .seed = 0}), ArgumentError);
}
