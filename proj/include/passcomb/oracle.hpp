#pragma once

// Reference frequent-itemset mining, kept deliberately plain and separate
// from the trie: candidates are explicit sets joined pairwise, pruning tests
// every subset, and support is counted with per-transaction bit masks.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "passcomb/dataset.hpp"
#include "passcomb/engine.hpp"
#include "passcomb/strategies.hpp"
#include "passcomb/types.hpp"

namespace passcomb::oracle {

using ItemsetSet = std::set<Itemset>;

/// Next-level candidates from an explicit collection of equal-size itemsets.
/// Pairs sharing all but their last item are joined; with prune=true a
/// candidate survives only if every one of its subsets one item smaller is in
/// `prev` (all subsets are tested).
inline ItemsetSet set_based_gen(const ItemsetSet& prev, bool prune) {
  ItemsetSet out;
  if (prev.empty()) return out;
  const std::size_t m = prev.begin()->size();
  for (const auto& s : prev)
    if (s.size() != m) throw ArgumentError("set_based_gen: itemsets of mixed size");
  std::vector<Itemset> sorted(prev.begin(), prev.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    for (std::size_t j = i + 1; j < sorted.size(); ++j) {
      const Itemset& a = sorted[i];
      const Itemset& b = sorted[j];
      if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
      Itemset joined = a;
      joined.push_back(b.back());
      if (prune) {
        bool all_present = true;
        for (std::size_t drop = 0; drop < joined.size(); ++drop) {
          Itemset sub;
          for (std::size_t x = 0; x < joined.size(); ++x)
            if (x != drop) sub.push_back(joined[x]);
          all_present = (prev.count(sub) > 0) && all_present;
        }
        if (!all_present) continue;
      }
      out.insert(std::move(joined));
    }
  }
  return out;
}

/// Exact frequent itemsets, level k -> itemset -> support.
struct FrequentSets {
  std::map<std::size_t, std::map<Itemset, Count>> levels;

  std::vector<std::size_t> level_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& [k, sets] : levels)
      if (!sets.empty()) out.push_back(sets.size());
    return out;
  }
};

struct BruteForceOptions {
  std::size_t max_k = 0;  ///< 0 means no limit
  /// Upper bound on candidate-transaction containment tests.
  std::uint64_t budget = 4'000'000'000ULL;
};

/// Level-wise exact mining with an absolute support threshold.
inline FrequentSets brute_force_frequent(const TransactionDb& db, Count min_count, const BruteForceOptions& opt = {}) {
  FrequentSets result;
  const std::size_t words = (db.item_count() + 63) / 64;
  std::vector<std::vector<std::uint64_t>> masks(db.size(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t t = 0; t < db.size(); ++t)
    for (ItemId i : db[t]) masks[t][i / 64] |= std::uint64_t{1} << (i % 64);

  std::vector<Count> item_support(db.item_count(), 0);
  for (const auto& t : db.transactions())
    for (ItemId i : t) ++item_support[i];
  ItemsetSet frequent;
  for (ItemId i = 0; i < db.item_count(); ++i) {
    if (item_support[i] >= min_count) {
      result.levels[1][{i}] = item_support[i];
      frequent.insert({i});
    }
  }

  std::uint64_t work = 0;
  std::vector<std::uint64_t> want(words);
  for (std::size_t k = 2; !frequent.empty() && (opt.max_k == 0 || k <= opt.max_k); ++k) {
    ItemsetSet candidates = set_based_gen(frequent, true);
    work += static_cast<std::uint64_t>(candidates.size()) * db.size();
    if (work > opt.budget) throw BudgetError("brute_force_frequent: work budget exceeded at level " + std::to_string(k));
    ItemsetSet next;
    for (const auto& c : candidates) {
      std::fill(want.begin(), want.end(), 0);
      for (ItemId i : c) want[i / 64] |= std::uint64_t{1} << (i % 64);
      Count support = 0;
      for (const auto& m : masks) {
        bool inside = true;
        for (std::size_t w = 0; w < words && inside; ++w) inside = (m[w] & want[w]) == want[w];
        support += inside ? 1 : 0;
      }
      if (support >= min_count) {
        result.levels[k][c] = support;
        next.insert(c);
      }
    }
    frequent = std::move(next);
  }
  return result;
}

inline FrequentSets brute_force_frequent(const TransactionDb& db, double min_sup, const BruteForceOptions& opt = {},
                                         ThresholdRule rule = ThresholdRule::ceil) {
  return brute_force_frequent(db, threshold(min_sup, db.size(), rule), opt);
}

/// A level as read from a report: its size, and its itemsets when present.
struct ReportedLevel {
  std::size_t k = 0;
  std::size_t count = 0;
  std::optional<std::vector<std::pair<Itemset, Count>>> itemsets;
};

struct Verdict {
  std::vector<Itemset> missing;
  std::vector<Itemset> extra;
  std::vector<std::tuple<Itemset, Count, Count>> mismatched;  // itemset, expected, reported
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> level_counts;  // k, expected, reported

  bool ok() const { return missing.empty() && extra.empty() && mismatched.empty() && level_counts.empty(); }
};

inline Verdict verify_levels(const std::vector<ReportedLevel>& reported, const FrequentSets& truth) {
  Verdict v;
  std::map<std::size_t, const ReportedLevel*> by_k;
  for (const auto& l : reported) by_k[l.k] = &l;
  std::set<std::size_t> ks;
  for (const auto& [k, sets] : truth.levels)
    if (!sets.empty()) ks.insert(k);
  for (const auto& l : reported)
    if (l.count > 0 || (l.itemsets && !l.itemsets->empty())) ks.insert(l.k);

  static const std::map<Itemset, Count> none;
  for (std::size_t k : ks) {
    auto t = truth.levels.find(k);
    const auto& expected = t == truth.levels.end() ? none : t->second;
    auto r = by_k.find(k);
    const ReportedLevel* got = r == by_k.end() ? nullptr : r->second;
    if (got && !got->itemsets) {
      if (got->count != expected.size()) v.level_counts.emplace_back(k, expected.size(), got->count);
      continue;
    }
    std::map<Itemset, Count> seen;
    if (got)
      for (const auto& [s, c] : *got->itemsets) seen[s] = c;
    for (const auto& [s, c] : expected) {
      auto it = seen.find(s);
      if (it == seen.end())
        v.missing.push_back(s);
      else if (it->second != c)
        v.mismatched.emplace_back(s, c, it->second);
    }
    for (const auto& [s, c] : seen)
      if (!expected.count(s)) v.extra.push_back(s);
  }
  return v;
}

/// Recomputes the frequent itemsets and diffs them against a run.
inline Verdict verify_run(const RunReport& report, const TransactionDb& db, double min_sup,
                          ThresholdRule rule = ThresholdRule::ceil) {
  std::vector<ReportedLevel> reported;
  for (const auto& l : report.levels) reported.push_back({l.k, l.itemsets.size(), l.itemsets});
  FrequentSets truth = db.empty() ? FrequentSets{} : brute_force_frequent(db, min_sup, {}, rule);
  return verify_levels(reported, truth);
}

}  // namespace passcomb::oracle
