#pragma once

// In-process map/combine/reduce runner.
//
// One map task per input split, a per-split combiner, hash partitioning over
// num_reducers reducers, and a support filter in the reducer. Output and
// counters are a pure function of the inputs: tasks write into slots indexed
// by split, and every merge happens in split order after the tasks join.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "passcomb/dataset.hpp"
#include "passcomb/trie.hpp"
#include "passcomb/types.hpp"

namespace passcomb {

struct KeyValuePair {
  Itemset key;
  Count value = 0;
  friend bool operator==(const KeyValuePair&, const KeyValuePair&) = default;
};

enum class EmissionMode {
  accumulate,  ///< count in mapper-local tries, emit once per key at task close
  per_match,   ///< emit (c, 1) for every match, as a literal mapper would
};

enum class PassMode { pruned, unpruned };

inline const char* to_string(PassMode m) { return m == PassMode::pruned ? "PRUNED" : "UNPRUNED"; }

/// What one pass inside a map task generated.
struct PassInfo {
  std::size_t k = 0;
  Count candidates = 0;
  GenCounters gen;
  PassMode mode = PassMode::pruned;
};

/// Everything a map task reports besides its pairs.
struct MapContext {
  Count candidate_count = 0;
  std::size_t npass = 0;
  std::vector<PassInfo> passes;
  Count subset_node_visits = 0;
  Count matches = 0;  ///< sum over transactions of |C_t|
};

struct MapOutput {
  std::vector<KeyValuePair> pairs;
  MapContext context;
};

struct JobCounters {
  Count candidate_count = 0;
  std::size_t npass = 0;
  Count emitted_pairs = 0;  ///< pairs leaving the mappers, before combining
  Count joins = 0;
  Count prune_checks = 0;
  Count pruned = 0;
  Count subset_node_visits = 0;
  Count matches = 0;
  friend bool operator==(const JobCounters&, const JobCounters&) = default;
};

enum class ClockMode { wall, cost };

/// Ticks per unit of work for the cost model. The defaults are tenths of a
/// nanosecond measured for a single worker (see README, "Cost model").
struct CostCoefficients {
  Ticks per_emitted_pair = 1260;
  Ticks per_join = 110;
  Ticks per_prune_check = 360;
  Ticks per_node_visit = 26;
  friend bool operator==(const CostCoefficients&, const CostCoefficients&) = default;
};

struct TimeSource {
  ClockMode mode = ClockMode::cost;
  CostCoefficients coeffs;
  /// How many ticks make one second-equivalent; used to interpret planner
  /// time limits given in seconds.
  double ticks_per_second = 1e10;

  static TimeSource wall_clock() { return TimeSource{ClockMode::wall, {}, 1e9}; }
  static TimeSource cost_model(CostCoefficients c = {}, double ticks_per_second = 1e10) {
    return TimeSource{ClockMode::cost, c, ticks_per_second};
  }

  Ticks cost_of(const JobCounters& c) const {
    return coeffs.per_emitted_pair * c.emitted_pairs + coeffs.per_join * c.joins +
           coeffs.per_prune_check * c.prune_checks + coeffs.per_node_visit * c.subset_node_visits;
  }

  Ticks from_seconds(double seconds) const { return static_cast<Ticks>(std::llround(seconds * ticks_per_second)); }
  double to_seconds(Ticks t) const { return static_cast<double>(t) / ticks_per_second; }
};

struct JobSpec {
  Count reducer_min_count = 1;
  std::size_t num_reducers = 1;
  EmissionMode emission = EmissionMode::accumulate;
  std::size_t workers = 1;
};

struct JobResult {
  std::vector<KeyValuePair> reduced;  ///< sorted by key
  JobCounters counters;
  std::vector<PassInfo> passes;  ///< per-task pass list; gen counters summed over tasks
  Ticks elapsed = 0;
  std::size_t map_tasks = 0;
};

enum class ThresholdRule { ceil, floor_plus_one };

/// Absolute support count for a relative min_sup over n transactions.
/// Products within 1e-9 of an integer are snapped before rounding, so
/// 0.2 * 50 gives 10 rather than 11.
inline Count threshold(double min_sup, std::size_t n, ThresholdRule rule = ThresholdRule::ceil) {
  if (!(min_sup > 0.0) || min_sup > 1.0) throw ArgumentError("min_sup must be in (0, 1]");
  if (n == 0) throw ArgumentError("threshold needs at least one transaction");
  double x = min_sup * static_cast<double>(n);
  double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) x = nearest;
  double count = rule == ThresholdRule::ceil ? std::ceil(x) : std::floor(x) + 1.0;
  return static_cast<Count>(std::max(1.0, count));
}

/// Deterministic FNV-1a hash over item ids, used for reducer partitioning.
inline std::uint64_t key_hash(const Itemset& key) {
  std::uint64_t h = 1469598103934665603ULL;
  for (ItemId id : key) {
    for (int b = 0; b < 4; ++b) {
      h ^= (id >> (8 * b)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The exception
/// from the lowest failing index, if any, is rethrown after all threads join.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (std::size_t i = next++; i < count; i = next++) {
            try {
              fn(i);
            } catch (...) {
              errors[i] = std::current_exception();
            }
          }
        });
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Sums values per key. Output is sorted by key.
inline std::vector<KeyValuePair> combine(std::vector<KeyValuePair> pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const KeyValuePair& a, const KeyValuePair& b) { return a.key < b.key; });
  std::vector<KeyValuePair> out;
  for (auto& p : pairs) {
    if (!out.empty() && out.back().key == p.key)
      out.back().value += p.value;
    else
      out.push_back(std::move(p));
  }
  return out;
}

/// Mapper: MapOutput(std::span<const Transaction> split, EmissionMode).
template <class Mapper>
JobResult run_job(const JobSpec& spec, const TransactionDb& db, const SplitPlan& splits, Mapper&& mapper,
                  const TimeSource& time) {
  if (spec.num_reducers == 0) throw ArgumentError("num_reducers must be at least 1");
  std::size_t covered = 0;
  for (const auto& r : splits.boundaries) {
    if (r.begin != covered || r.end < r.begin) throw ArgumentError("splits must be ordered and contiguous");
    covered = r.end;
  }
  if (covered != db.size()) throw ArgumentError("splits do not cover the database");

  auto started = std::chrono::steady_clock::now();
  const std::size_t tasks = splits.count();

  // Map + combine, one slot per split. Each combined output is already
  // partitioned so reducers read only their own buckets.
  std::vector<MapContext> contexts(tasks);
  std::vector<Count> emitted(tasks, 0);
  std::vector<std::vector<std::vector<KeyValuePair>>> buckets(tasks);
  parallel_for(tasks, spec.workers, [&](std::size_t i) {
    MapOutput out = mapper(split_view(db, splits.boundaries[i]), spec.emission);
    emitted[i] = out.pairs.size();
    contexts[i] = std::move(out.context);
    auto combined = combine(std::move(out.pairs));
    auto& mine = buckets[i];
    mine.assign(spec.num_reducers, {});
    for (auto& p : combined) mine[key_hash(p.key) % spec.num_reducers].push_back(std::move(p));
  });

  JobResult result;
  result.map_tasks = tasks;
  auto& c = result.counters;
  for (std::size_t i = 0; i < tasks; ++i) {
    const auto& ctx = contexts[i];
    if (i == 0) {
      c.candidate_count = ctx.candidate_count;
      c.npass = ctx.npass;
      result.passes = ctx.passes;
      for (auto& p : result.passes) p.gen = {};
    } else {
      if (ctx.candidate_count != c.candidate_count || ctx.npass != c.npass ||
          ctx.passes.size() != result.passes.size())
        throw ConsistencyError("map tasks disagree on candidateCount/npass");
      for (std::size_t p = 0; p < ctx.passes.size(); ++p)
        if (ctx.passes[p].candidates != result.passes[p].candidates || ctx.passes[p].mode != result.passes[p].mode ||
            ctx.passes[p].k != result.passes[p].k)
          throw ConsistencyError("map tasks disagree on per-level candidates");
    }
    for (std::size_t p = 0; p < ctx.passes.size(); ++p) {
      result.passes[p].gen += ctx.passes[p].gen;
      c.joins += ctx.passes[p].gen.joins;
      c.prune_checks += ctx.passes[p].gen.prune_checks;
      c.pruned += ctx.passes[p].gen.pruned;
    }
    c.subset_node_visits += ctx.subset_node_visits;
    c.matches += ctx.matches;
    c.emitted_pairs += emitted[i];
  }

  // Reduce, one slot per partition, then merge into one sorted list.
  std::vector<std::vector<KeyValuePair>> reduced(spec.num_reducers);
  parallel_for(spec.num_reducers, spec.workers, [&](std::size_t r) {
    std::vector<KeyValuePair> input;
    for (std::size_t i = 0; i < tasks; ++i)
      for (auto& p : buckets[i][r]) input.push_back(std::move(p));
    auto summed = combine(std::move(input));
    for (auto& p : summed)
      if (p.value >= spec.reducer_min_count) reduced[r].push_back(std::move(p));
  });
  for (auto& part : reduced)
    for (auto& p : part) result.reduced.push_back(std::move(p));
  std::sort(result.reduced.begin(), result.reduced.end(),
            [](const KeyValuePair& a, const KeyValuePair& b) { return a.key < b.key; });

  if (time.mode == ClockMode::cost) {
    result.elapsed = time.cost_of(c);
  } else {
    auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started);
    result.elapsed = static_cast<Ticks>(ns.count());
  }
  return result;
}

}  // namespace passcomb
