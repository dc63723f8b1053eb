#pragma once

// Transaction databases in FIMI format: parsing, dense recoding, input splits
// and a seeded synthetic generator.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "passcomb/types.hpp"

namespace passcomb {

using Transaction = Itemset;

/// Recoded transactions plus the id -> label dictionary.
///
/// Ids are assigned by ascending external label over the labels that occur,
/// so the dictionary is exactly the set of used labels and recoding is
/// monotone: sorting by id is sorting by label.
class TransactionDb {
public:
  TransactionDb() = default;

  /// Builds a db from label-valued rows. Duplicates within a row are dropped;
  /// empty rows are skipped.
  static TransactionDb from_labels(const std::vector<std::vector<ItemLabel>>& rows) {
    std::map<ItemLabel, ItemId> codes;
    for (const auto& row : rows)
      for (ItemLabel l : row) codes.emplace(l, 0);
    TransactionDb db;
    db.labels_.reserve(codes.size());
    for (auto& [label, id] : codes) {
      id = static_cast<ItemId>(db.labels_.size());
      db.labels_.push_back(label);
    }
    db.transactions_.reserve(rows.size());
    for (const auto& row : rows) {
      if (row.empty()) continue;
      Transaction t;
      t.reserve(row.size());
      for (ItemLabel l : row) t.push_back(codes.at(l));
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
      db.transactions_.push_back(std::move(t));
    }
    return db;
  }

  std::size_t size() const noexcept { return transactions_.size(); }
  bool empty() const noexcept { return transactions_.empty(); }
  std::size_t item_count() const noexcept { return labels_.size(); }

  const std::vector<Transaction>& transactions() const noexcept { return transactions_; }
  const Transaction& operator[](std::size_t i) const { return transactions_[i]; }

  ItemLabel label(ItemId id) const { return labels_.at(id); }
  const std::vector<ItemLabel>& labels() const noexcept { return labels_; }

  /// Inverse of label(); returns false when the label does not occur in the db.
  bool find_id(ItemLabel label, ItemId& out) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) return false;
    out = static_cast<ItemId>(it - labels_.begin());
    return true;
  }

  std::vector<ItemLabel> to_labels(const Itemset& s) const {
    std::vector<ItemLabel> out;
    out.reserve(s.size());
    for (ItemId id : s) out.push_back(label(id));
    return out;
  }

  friend bool operator==(const TransactionDb&, const TransactionDb&) = default;

private:
  std::vector<Transaction> transactions_;
  std::vector<ItemLabel> labels_;
};

struct DatasetStats {
  std::size_t n = 0;
  std::size_t item_count = 0;
  double avg_width = 0.0;
  std::size_t total_items = 0;
};

/// Reads FIMI text: one transaction per line, whitespace separated
/// non-negative decimal labels. Blank lines are skipped.
inline TransactionDb parse_fimi(std::istream& in) {
  std::vector<std::vector<ItemLabel>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<ItemLabel> row;
    std::string_view rest(line);
    while (!rest.empty()) {
      auto start = rest.find_first_not_of(" \t\r\f\v");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      auto end = rest.find_first_of(" \t\r\f\v");
      auto token = rest.substr(0, end);
      ItemLabel value = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(line_no, "not a non-negative integer item: '" + std::string(token) + "'");
      row.push_back(value);
      if (end == std::string_view::npos) break;
      rest.remove_prefix(end);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return TransactionDb::from_labels(rows);
}

inline TransactionDb parse_fimi(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_fimi(in);
}

/// Writes the db back in FIMI form, items ascending, single-space separated.
inline void write_fimi(const TransactionDb& db, std::ostream& out) {
  for (const auto& t : db.transactions()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << ' ';
      out << db.label(t[i]);
    }
    out << '\n';
  }
}

inline std::string to_fimi(const TransactionDb& db) {
  std::ostringstream out;
  write_fimi(db, out);
  return out.str();
}

inline DatasetStats stats(const TransactionDb& db) {
  DatasetStats s;
  s.n = db.size();
  s.item_count = db.item_count();
  for (const auto& t : db.transactions()) s.total_items += t.size();
  s.avg_width = s.n == 0 ? 0.0 : static_cast<double>(s.total_items) / static_cast<double>(s.n);
  return s;
}

/// Half-open transaction index range handled by one map task.
struct SplitRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const SplitRange&, const SplitRange&) = default;
};

struct SplitPlan {
  std::size_t lines_per_split = 1;
  std::vector<SplitRange> boundaries;

  std::size_t count() const noexcept { return boundaries.size(); }
};

inline SplitPlan make_splits(std::size_t n, std::size_t lines_per_split) {
  if (lines_per_split == 0) throw ArgumentError("lines_per_split must be positive");
  SplitPlan plan;
  plan.lines_per_split = lines_per_split;
  for (std::size_t b = 0; b < n; b += lines_per_split)
    plan.boundaries.push_back({b, std::min(n, b + lines_per_split)});
  return plan;
}

inline SplitPlan make_splits(const TransactionDb& db, std::size_t lines_per_split) {
  return make_splits(db.size(), lines_per_split);
}

inline std::span<const Transaction> split_view(const TransactionDb& db, const SplitRange& r) {
  return std::span<const Transaction>(db.transactions()).subspan(r.begin, r.size());
}

struct GeneratorConfig {
  std::size_t n = 10000;
  std::size_t item_count = 192;
  double avg_width = 20.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Uniform in (0, 1]; built from raw engine output so the sequence does not
// depend on the standard library's distribution implementations.
inline double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Poisson variate by counting unit-rate arrivals before `mean`.
inline std::size_t poisson(std::mt19937_64& rng, double mean) {
  std::size_t k = 0;
  double t = -std::log(unit_open(rng));
  while (t < mean) {
    ++k;
    t += -std::log(unit_open(rng));
  }
  return k;
}

}  // namespace detail

/// Synthetic market-basket data for scaling experiments.
///
/// Width is 1 + Poisson(avg_width - 1), clamped to item_count, so the mean
/// width is avg_width up to clamping. Items follow Zipf(1) popularity and are
/// sampled without replacement (exponential-key weighted sampling).
inline TransactionDb generate_synthetic(const GeneratorConfig& cfg) {
  if (cfg.n < 1) throw ArgumentError("generator needs n >= 1");
  if (cfg.item_count < 1) throw ArgumentError("generator needs item_count >= 1");
  if (!(cfg.avg_width >= 1.0) || cfg.avg_width > static_cast<double>(cfg.item_count))
    throw ArgumentError("generator needs 1 <= avg_width <= item_count");

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> weight(cfg.item_count);
  for (std::size_t i = 0; i < cfg.item_count; ++i) weight[i] = 1.0 / static_cast<double>(i + 1);

  std::vector<std::vector<ItemLabel>> rows;
  rows.reserve(cfg.n);
  std::vector<std::pair<double, ItemLabel>> keys(cfg.item_count);
  for (std::size_t r = 0; r < cfg.n; ++r) {
    std::size_t width = 1 + detail::poisson(rng, cfg.avg_width - 1.0);
    width = std::min(width, cfg.item_count);
    for (std::size_t i = 0; i < cfg.item_count; ++i)
      keys[i] = {-std::log(detail::unit_open(rng)) / weight[i], static_cast<ItemLabel>(i)};
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(width), keys.end());
    std::vector<ItemLabel> row;
    row.reserve(width);
    for (std::size_t i = 0; i < width; ++i) row.push_back(keys[i].second);
    std::sort(row.begin(), row.end());
    rows.push_back(std::move(row));
  }
  return TransactionDb::from_labels(rows);
}

}  // namespace passcomb
