#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "passcomb/oracle.hpp"
#include "passcomb/trie.hpp"

using namespace passcomb;

namespace {

TransactionDb load(const std::string& name) {
  std::ifstream f(std::string(PASSCOMB_DATA_DIR) + "/" + name);
  if (!f) throw std::runtime_error("missing dataset " + name);
  return parse_fimi(f);
}

std::set<Itemset> as_set(const CandidateTrie& t) {
  auto v = t.itemsets();
  return {v.begin(), v.end()};
}

CandidateTrie frequent_singletons(const TransactionDb& db, Count min_count) {
  std::vector<Count> support(db.item_count(), 0);
  for (const auto& t : db.transactions())
    for (ItemId i : t) ++support[i];
  CandidateTrie trie(1);
  for (ItemId i = 0; i < db.item_count(); ++i)
    if (support[i] >= min_count) trie.append(Itemset{i});
  return trie;
}

// Random collection of distinct m-itemsets over `items` items.
std::set<Itemset> random_level(std::mt19937_64& rng, std::size_t m, std::size_t items, std::size_t count) {
  std::set<Itemset> out;
  std::vector<ItemId> pool(items);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::shuffle(pool.begin(), pool.end(), rng);
    Itemset s(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(s.begin(), s.end());
    out.insert(s);
  }
  return out;
}

}  // namespace

TEST(TrieFromItemsets, Basics) {
  CandidateTrie empty = trie_from_itemsets({}, 1);
  EXPECT_EQ(empty.size(), 0u);
  EXPECT_EQ(empty.level(), 1u);

  CandidateTrie t = trie_from_itemsets({{0, 1}, {0, 2}, {1, 2}}, 2);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.level(), 2u);
  EXPECT_TRUE(t.contains(Itemset{0, 2}));
  EXPECT_FALSE(t.contains(Itemset{0, 3}));
  EXPECT_FALSE(t.contains(Itemset{0}));

  EXPECT_EQ(trie_from_itemsets({{4, 5}, {4, 5}}, 2).size(), 1u);
}

TEST(TrieFromItemsets, RejectsBadInput) {
  EXPECT_THROW(trie_from_itemsets({{0, 1}, {2}}, 2), ArgumentError);
  EXPECT_THROW(trie_from_itemsets({{1, 0}}, 2), ArgumentError);
  EXPECT_THROW(trie_from_itemsets({{1, 1}}, 2), ArgumentError);
  EXPECT_THROW(trie_from_itemsets({}, 0), ArgumentError);
}

TEST(Trie, AppendEnforcesOrder) {
  CandidateTrie t(2);
  EXPECT_TRUE(t.append(Itemset{0, 3}));
  EXPECT_FALSE(t.append(Itemset{0, 3}));
  EXPECT_THROW(t.append(Itemset{0, 1}), ArgumentError);
  EXPECT_THROW(t.append(Itemset{1}), ArgumentError);
  EXPECT_TRUE(t.append(Itemset{1, 2}));
  EXPECT_EQ(t.size(), 2u);
}

TEST(Trie, EnumerationIsLexicographic) {
  std::mt19937_64 rng(5);
  auto level = random_level(rng, 3, 12, 80);
  std::vector<Itemset> shuffled(level.begin(), level.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  CandidateTrie t = trie_from_itemsets(shuffled, 3);
  EXPECT_EQ(t.itemsets(), std::vector<Itemset>(level.begin(), level.end()));
}

TEST(Trie, DumpFormat) {
  CandidateTrie t = trie_from_itemsets({{1, 2}, {0, 4}}, 2);
  t.add_support(Itemset{1, 2}, 7);
  std::ostringstream out;
  t.dump(out);
  EXPECT_EQ(out.str(), "0 4\t0\n1 2\t7\n");
}

TEST(AprioriGen, AllPairsOfSingletons) {
  auto [c2, g] = apriori_gen(trie_from_itemsets({{0}, {1}, {2}}, 1));
  EXPECT_EQ(c2.itemsets(), (std::vector<Itemset>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(g.joins, 3u);
  EXPECT_EQ(g.pruned, 0u);
  EXPECT_EQ(g.prune_checks, 0u);
}

TEST(AprioriGen, PrunesMissingSubset) {
  auto [c3, g] = apriori_gen(trie_from_itemsets({{1, 2}, {1, 3}}, 2));
  EXPECT_TRUE(c3.empty());
  EXPECT_EQ(c3.level(), 3u);
  EXPECT_EQ(g.joins, 1u);
  EXPECT_EQ(g.pruned, 1u);
  EXPECT_EQ(g.prune_checks, 1u);

  auto [kept, g2] = apriori_gen(trie_from_itemsets({{1, 2}, {1, 3}, {2, 3}}, 2));
  EXPECT_EQ(kept.itemsets(), (std::vector<Itemset>{{1, 2, 3}}));
  EXPECT_EQ(g2.pruned, 0u);
}

TEST(AprioriGen, ShortCircuitsOnFirstMissingSubset) {
  // {0,1,2,3} needs {1,2,3} and {0,2,3}; neither is present, one check suffices.
  auto [c4, g] = apriori_gen(trie_from_itemsets({{0, 1, 2}, {0, 1, 3}}, 3));
  EXPECT_TRUE(c4.empty());
  EXPECT_EQ(g.prune_checks, 1u);
  EXPECT_EQ(g.pruned, 1u);
}

TEST(AprioriGen, LevelZeroRejected) {
  EXPECT_THROW(apriori_gen(CandidateTrie(0)), ArgumentError);
  EXPECT_THROW(non_apriori_gen(CandidateTrie()), ArgumentError);
}

TEST(AprioriGen, EmptyInputEmptyOutput) {
  auto [c, g] = apriori_gen(CandidateTrie(4));
  EXPECT_TRUE(c.empty());
  EXPECT_EQ(c.level(), 5u);
  EXPECT_EQ(g, GenCounters{});
}

TEST(AprioriGen, ChessC2) {
  TransactionDb db = load("chess.dat");
  CandidateTrie l1 = frequent_singletons(db, threshold(0.65, db.size()));
  EXPECT_EQ(l1.size(), 29u);
  EXPECT_EQ(apriori_gen(l1).first.size(), 406u);
}

TEST(AprioriGen, MushroomC2) {
  TransactionDb db = load("mushroom.dat");
  CandidateTrie l1 = frequent_singletons(db, threshold(0.15, db.size()));
  EXPECT_EQ(l1.size(), 48u);
  EXPECT_EQ(apriori_gen(l1).first.size(), 1128u);
}

TEST(NonAprioriGen, KeepsUnprunedCandidate) {
  auto [c3, g] = non_apriori_gen(trie_from_itemsets({{1, 2}, {1, 3}}, 2));
  EXPECT_EQ(c3.itemsets(), (std::vector<Itemset>{{1, 2, 3}}));
  EXPECT_EQ(g.joins, 1u);
  EXPECT_EQ(g.prune_checks, 0u);
  EXPECT_EQ(g.pruned, 0u);
}

TEST(NonAprioriGen, EqualsAprioriWhenNothingToPrune) {
  CandidateTrie l2 = trie_from_itemsets({{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {2, 3}}, 2);
  EXPECT_EQ(as_set(apriori_gen(l2).first), as_set(non_apriori_gen(l2).first));
}

TEST(SubsetMatch, Examples) {
  CandidateTrie t = trie_from_itemsets({{1, 2}, {1, 4}, {2, 3}}, 2);
  EXPECT_EQ(subset_match(t, Itemset{1, 2, 3}), (std::vector<Itemset>{{1, 2}, {2, 3}}));
  EXPECT_TRUE(subset_match(t, Itemset{}).empty());
  EXPECT_TRUE(subset_match(t, Itemset{2}).empty());
  Count visits = 0;
  subset_match(t, Itemset{1, 2, 3, 4}, &visits);
  EXPECT_GT(visits, 0u);
}

TEST(AddSupport, CountsAndErrors) {
  CandidateTrie t = trie_from_itemsets({{1, 2}, {1, 3}}, 2);
  t.add_support(Itemset{1, 2}, 1);
  t.add_support(Itemset{1, 2}, 1);
  EXPECT_EQ(t.support_at(*t.find(Itemset{1, 2})), 2u);
  EXPECT_EQ(t.support_at(*t.find(Itemset{1, 3})), 0u);
  EXPECT_THROW(t.add_support(Itemset{1, 2}, 0), ArgumentError);
  EXPECT_THROW(t.add_support(Itemset{2, 3}, 1), ConsistencyError);
  t.clear_support();
  EXPECT_EQ(t.support_at(0), 0u);
}

TEST(AddSupport, ChessPairCountsMatchBruteForce) {
  TransactionDb db = load("chess.dat");
  CandidateTrie c2 = apriori_gen(frequent_singletons(db, threshold(0.65, db.size()))).first;
  for (const auto& t : db.transactions())
    c2.match(t, [&](std::size_t leaf) { c2.add_support_at(leaf, 1); });
  std::size_t checked = 0;
  c2.for_each([&](const Itemset& pair, Count support) {
    Count expected = 0;
    for (const auto& t : db.transactions())
      expected += std::binary_search(t.begin(), t.end(), pair[0]) && std::binary_search(t.begin(), t.end(), pair[1]);
    EXPECT_EQ(support, expected);
    ++checked;
  });
  EXPECT_EQ(checked, 406u);
}

// Randomized differential checks against the set-based oracle.
TEST(TrieProperties, MatchesSetBasedGeneration) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = 1 + seed % 4;
    const std::size_t items = 6 + seed % 7;
    auto level = random_level(rng, m, items, 5 + seed % 40);
    CandidateTrie prev = trie_from_itemsets({level.begin(), level.end()}, m);

    auto [pruned, gp] = apriori_gen(prev);
    auto [joined, gj] = non_apriori_gen(prev);
    auto oracle_pruned = oracle::set_based_gen(level, true);
    auto oracle_joined = oracle::set_based_gen(level, false);
    ASSERT_EQ(as_set(pruned), oracle_pruned) << "seed " << seed;
    ASSERT_EQ(as_set(joined), oracle_joined) << "seed " << seed;

    for (const auto& c : oracle_pruned) EXPECT_TRUE(oracle_joined.count(c));
    if (m == 1) EXPECT_EQ(as_set(pruned), as_set(joined));
    EXPECT_EQ(gp.joins, gj.joins);
    EXPECT_EQ(gp.joins, oracle_joined.size());
    EXPECT_LE(gp.pruned, gp.joins);
    EXPECT_EQ(gp.pruned, gp.joins - pruned.size());
    EXPECT_LE(gp.prune_checks, gp.joins * (m - 1));
  }
}

TEST(TrieProperties, SubsetMatchEqualsEnumeration) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    const std::size_t m = 1 + seed % 4;
    auto level = random_level(rng, m, 10, 30);
    CandidateTrie trie = trie_from_itemsets({level.begin(), level.end()}, m);
    Itemset t = *random_level(rng, 3 + seed % 7, 10, 1).begin();

    std::set<Itemset> expected;
    for (const auto& s : level)
      if (std::includes(t.begin(), t.end(), s.begin(), s.end())) expected.insert(s);
    auto got = subset_match(trie, t);
    EXPECT_EQ(std::set<Itemset>(got.begin(), got.end()), expected) << "seed " << seed;
    EXPECT_EQ(got.size(), expected.size());
  }
}
