#pragma once

// Prefix-tree candidate store.
//
// A CandidateTrie houses itemsets of exactly one size (its level). Nodes live
// in one array per depth; a node's children are a contiguous, item-sorted
// range of the next depth's array. Itemsets are appended in lexicographic
// order, which every producer in this file guarantees, so the layout is
// built in a single forward pass and enumeration order is lexicographic.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "passcomb/types.hpp"

namespace passcomb {

/// Work done by one candidate generation call.
struct GenCounters {
  Count joins = 0;         ///< candidate tuples produced by the join step
  Count prune_checks = 0;  ///< (k-1)-subset membership tests
  Count pruned = 0;        ///< candidates removed by pruning

  GenCounters& operator+=(const GenCounters& o) {
    joins += o.joins;
    prune_checks += o.prune_checks;
    pruned += o.pruned;
    return *this;
  }
  friend bool operator==(const GenCounters&, const GenCounters&) = default;
};

class CandidateTrie {
public:
  struct Node {
    ItemId item = 0;
    std::uint32_t parent = 0;       // index into the previous depth (unused at depth 0)
    std::uint32_t child_begin = 0;  // range into the next depth
    std::uint32_t child_end = 0;
  };

  CandidateTrie() = default;
  explicit CandidateTrie(std::size_t level) : level_(level), layers_(level) {}

  std::size_t level() const noexcept { return level_; }

  /// Number of itemsets housed.
  std::size_t size() const noexcept { return level_ == 0 ? 0 : layers_.back().size(); }
  bool empty() const noexcept { return size() == 0; }

  std::size_t node_count() const noexcept {
    std::size_t total = 0;
    for (const auto& l : layers_) total += l.size();
    return total;
  }

  const std::vector<Node>& layer(std::size_t depth) const { return layers_.at(depth); }

  /// Appends an itemset that sorts strictly after every itemset already held.
  /// Returns false (and changes nothing) for a duplicate of the last one.
  bool append(std::span<const ItemId> items, Count support = 0) {
    if (items.size() != level_ || level_ == 0) throw ArgumentError("itemset size does not match trie level");
    std::size_t shared = 0;
    if (!empty()) {
      while (shared < level_ && last_[shared] == items[shared]) ++shared;
      if (shared == level_) return false;
      if (items[shared] < last_[shared]) throw ArgumentError("itemsets must be appended in lexicographic order");
    }
    for (std::size_t d = shared; d < level_; ++d) {
      if (d > 0 && items[d] <= items[d - 1]) throw ArgumentError("itemset is not strictly sorted");
      Node node;
      node.item = items[d];
      auto index = static_cast<std::uint32_t>(layers_[d].size());
      if (d > 0) {
        auto parent = static_cast<std::uint32_t>(layers_[d - 1].size() - 1);
        node.parent = parent;
        Node& p = layers_[d - 1][parent];
        if (p.child_begin == p.child_end) p.child_begin = index;
        p.child_end = index + 1;
      }
      layers_[d].push_back(node);
    }
    last_.assign(items.begin(), items.end());
    support_.push_back(support);
    return true;
  }

  /// Leaf index of an itemset, if present.
  std::optional<std::size_t> find(std::span<const ItemId> items) const {
    if (items.size() != level_ || level_ == 0) return std::nullopt;
    std::uint32_t begin = 0;
    auto end = static_cast<std::uint32_t>(layers_[0].size());
    std::uint32_t at = 0;
    for (std::size_t d = 0; d < level_; ++d) {
      const auto& layer = layers_[d];
      auto first = layer.begin() + begin;
      auto last = layer.begin() + end;
      auto it = std::lower_bound(first, last, items[d], [](const Node& n, ItemId v) { return n.item < v; });
      if (it == last || it->item != items[d]) return std::nullopt;
      at = static_cast<std::uint32_t>(it - layer.begin());
      begin = it->child_begin;
      end = it->child_end;
    }
    return at;
  }

  bool contains(std::span<const ItemId> items) const { return find(items).has_value(); }

  /// Reconstructs the itemset ending at a leaf.
  Itemset itemset_at(std::size_t leaf) const {
    Itemset out(level_);
    auto index = static_cast<std::uint32_t>(leaf);
    for (std::size_t d = level_; d-- > 0;) {
      const Node& n = layers_[d][index];
      out[d] = n.item;
      index = n.parent;
    }
    return out;
  }

  Count support_at(std::size_t leaf) const { return support_.at(leaf); }

  void add_support_at(std::size_t leaf, Count delta) { support_[leaf] += delta; }

  /// Adds a positive delta to an itemset's counter. An absent itemset means a
  /// mapper is counting against the wrong trie.
  void add_support(std::span<const ItemId> items, Count delta) {
    if (delta == 0) throw ArgumentError("support delta must be positive");
    auto leaf = find(items);
    if (!leaf) throw ConsistencyError("add_support: itemset not in trie");
    support_[*leaf] += delta;
  }

  void clear_support() { std::fill(support_.begin(), support_.end(), Count{0}); }

  /// Visits every itemset in lexicographic order with its support.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t leaf = 0; leaf < size(); ++leaf) fn(itemset_at(leaf), support_[leaf]);
  }

  std::vector<Itemset> itemsets() const {
    std::vector<Itemset> out;
    out.reserve(size());
    for (std::size_t leaf = 0; leaf < size(); ++leaf) out.push_back(itemset_at(leaf));
    return out;
  }

  /// Calls on_leaf(leaf_index) for every housed itemset contained in `t`.
  /// Returns the number of trie nodes matched on the way down.
  template <class OnLeaf>
  Count match(std::span<const ItemId> t, OnLeaf&& on_leaf) const {
    if (level_ == 0 || t.size() < level_ || empty()) return 0;
    Count visits = 0;
    match_rec(0, 0, static_cast<std::uint32_t>(layers_[0].size()), t, 0, visits, on_leaf);
    return visits;
  }

  /// Debug dump: one itemset per line, space separated, then a tab and the support.
  void dump(std::ostream& out) const {
    for_each([&](const Itemset& s, Count c) {
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << '\t' << c << '\n';
    });
  }

private:
  template <class OnLeaf>
  void match_rec(std::size_t depth, std::uint32_t begin, std::uint32_t end, std::span<const ItemId> t,
                 std::size_t pos, Count& visits, OnLeaf& on_leaf) const {
    const auto& layer = layers_[depth];
    const std::size_t need = level_ - depth;
    std::uint32_t i = begin;
    while (i < end && pos + need <= t.size()) {
      ItemId a = layer[i].item;
      ItemId b = t[pos];
      if (a < b) {
        ++i;
      } else if (b < a) {
        ++pos;
      } else {
        ++visits;
        if (need == 1)
          on_leaf(static_cast<std::size_t>(i));
        else
          match_rec(depth + 1, layer[i].child_begin, layer[i].child_end, t, pos + 1, visits, on_leaf);
        ++i;
        ++pos;
      }
    }
  }

  std::size_t level_ = 0;
  std::vector<std::vector<Node>> layers_;
  std::vector<Count> support_;
  Itemset last_;
};

/// Builds a trie holding exactly the given itemsets (duplicates collapse).
inline CandidateTrie trie_from_itemsets(std::vector<Itemset> itemsets, std::size_t level) {
  if (level == 0) throw ArgumentError("trie level must be at least 1");
  for (const auto& s : itemsets) {
    if (s.size() != level) throw ArgumentError("itemsets of mixed size");
    if (!is_strictly_sorted(s)) throw ArgumentError("itemset is not strictly sorted");
  }
  std::sort(itemsets.begin(), itemsets.end());
  CandidateTrie trie(level);
  for (const auto& s : itemsets) trie.append(s);
  return trie;
}

namespace detail {

// Join step over sibling leaves under every depth-(k-2) node of `prev`.
// Candidates are produced in lexicographic order.
template <class Accept>
void join_siblings(const CandidateTrie& prev, std::size_t depth, std::uint32_t begin, std::uint32_t end,
                   Itemset& prefix, CandidateTrie& out, GenCounters& counters, Accept& accept) {
  const std::size_t last_depth = prev.level() - 1;
  const auto& layer = prev.layer(depth);
  if (depth == last_depth) {
    for (std::uint32_t i = begin; i < end; ++i) {
      for (std::uint32_t j = i + 1; j < end; ++j) {
        ++counters.joins;
        prefix.push_back(layer[i].item);
        prefix.push_back(layer[j].item);
        if (accept(prefix)) out.append(prefix);
        prefix.pop_back();
        prefix.pop_back();
      }
    }
    return;
  }
  for (std::uint32_t i = begin; i < end; ++i) {
    prefix.push_back(layer[i].item);
    join_siblings(prev, depth + 1, layer[i].child_begin, layer[i].child_end, prefix, out, counters, accept);
    prefix.pop_back();
  }
}

template <class Accept>
std::pair<CandidateTrie, GenCounters> generate(const CandidateTrie& prev, Accept accept) {
  if (prev.level() == 0) throw ArgumentError("candidate generation needs a trie of level >= 1");
  CandidateTrie out(prev.level() + 1);
  GenCounters counters;
  if (prev.empty()) return {std::move(out), counters};
  Itemset prefix;
  prefix.reserve(prev.level() + 1);
  auto root_end = static_cast<std::uint32_t>(prev.layer(0).size());
  join_siblings(prev, 0, 0, root_end, prefix, out, counters, accept);
  return {std::move(out), counters};
}

}  // namespace detail

/// Join + prune. Only the k-2 subsets that drop a shared-prefix item are
/// tested; the two that drop either joined item are the join parents.
/// Testing stops at the first missing subset.
inline std::pair<CandidateTrie, GenCounters> apriori_gen(const CandidateTrie& prev) {
  GenCounters prune;
  Itemset subset;
  auto accept = [&](const Itemset& candidate) {
    const std::size_t k = candidate.size();
    for (std::size_t drop = 0; drop + 2 < k; ++drop) {
      subset.clear();
      for (std::size_t i = 0; i < k; ++i)
        if (i != drop) subset.push_back(candidate[i]);
      ++prune.prune_checks;
      if (!prev.contains(subset)) {
        ++prune.pruned;
        return false;
      }
    }
    return true;
  };
  auto [trie, counters] = detail::generate(prev, accept);
  counters.prune_checks = prune.prune_checks;
  counters.pruned = prune.pruned;
  return {std::move(trie), counters};
}

/// Join only; keeps candidates that pruning would have removed.
inline std::pair<CandidateTrie, GenCounters> non_apriori_gen(const CandidateTrie& prev) {
  return detail::generate(prev, [](const Itemset&) { return true; });
}

/// Itemsets of `trie` contained in `t`, plus the node-visit count.
inline std::vector<Itemset> subset_match(const CandidateTrie& trie, std::span<const ItemId> t,
                                         Count* node_visits = nullptr) {
  std::vector<Itemset> out;
  Count visits = trie.match(t, [&](std::size_t leaf) { out.push_back(trie.itemset_at(leaf)); });
  if (node_visits) *node_visits += visits;
  return out;
}

}  // namespace passcomb
