#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace passcomb {

/// Dense item code in [0, item_count).
using ItemId = std::uint32_t;

/// External item label as it appears in a FIMI file.
using ItemLabel = std::uint64_t;

/// Strictly ascending sequence of item ids.
using Itemset = std::vector<ItemId>;

/// Support or pair count.
using Count = std::uint64_t;

/// Abstract time unit. Wall-clock mode uses nanoseconds; the cost model uses
/// weighted operation counts.
using Ticks = std::uint64_t;

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A must-agree invariant between map tasks, or between a mapper and its trie, was broken.
class ConsistencyError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// The oracle refused an input that exceeds its work budget.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline bool is_strictly_sorted(const Itemset& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i - 1] >= s[i]) return false;
  return true;
}

}  // namespace passcomb
