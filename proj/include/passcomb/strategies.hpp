#pragma once

// Apriori drivers that differ only in how passes are grouped into
// map/reduce phases:
//
//   SPC    one pass per phase
//   FPC    fixed number of passes per phase from fpc_start on
//   DPC    passes added while candidates <= alpha * |L|, alpha from the
//          previous phase's time against a single limit
//   VFPC   2 passes per phase while the candidate total grows, +3 once it drops
//   ETDPC  like DPC, alpha from the ratio of the two latest phase times
//
// VFPC and ETDPC have optimized forms whose later passes inside a phase use
// join-only generation. Every variant yields the same frequent itemsets.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "passcomb/dataset.hpp"
#include "passcomb/engine.hpp"
#include "passcomb/trie.hpp"
#include "passcomb/types.hpp"

namespace passcomb {

enum class Algorithm { spc, fpc, dpc, vfpc, etdpc };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::spc: return "spc";
    case Algorithm::fpc: return "fpc";
    case Algorithm::dpc: return "dpc";
    case Algorithm::vfpc: return "vfpc";
    case Algorithm::etdpc: return "etdpc";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "spc") return Algorithm::spc;
  if (s == "fpc") return Algorithm::fpc;
  if (s == "dpc") return Algorithm::dpc;
  if (s == "vfpc") return Algorithm::vfpc;
  if (s == "etdpc") return Algorithm::etdpc;
  throw ArgumentError("unknown algorithm '" + s + "'");
}

struct StrategyConfig {
  Algorithm algorithm = Algorithm::spc;
  bool optimized = false;
  std::size_t fpc_width = 3;
  std::size_t fpc_start = 3;
  double dpc_alpha_high = 2.0;
  double dpc_beta = 60.0;     // seconds
  double etdpc_beta1 = 40.0;  // seconds
  double etdpc_beta2 = 60.0;  // seconds

  void validate() const {
    if (optimized && algorithm != Algorithm::vfpc && algorithm != Algorithm::etdpc)
      throw ArgumentError("Optimized variants apply to VFPC/ETDPC");
    if (fpc_width < 1) throw ArgumentError("fpc_width must be at least 1");
    if (fpc_start < 2) throw ArgumentError("fpc_start must be at least 2");
    if (!(dpc_alpha_high >= 1.0)) throw ArgumentError("alpha_high must be at least 1");
    if (!(dpc_beta >= 0.0)) throw ArgumentError("beta must be non-negative");
    if (!(etdpc_beta1 > 0.0 && etdpc_beta1 < etdpc_beta2)) throw ArgumentError("need 0 < beta1 < beta2");
  }

  std::string name() const {
    std::string base = to_string(algorithm);
    return optimized ? "optimized-" + base : base;
  }
};

/// Engine-level settings shared by every strategy.
struct RunOptions {
  std::size_t lines_per_split = 1000;
  std::size_t num_reducers = 1;
  std::size_t workers = 1;
  EmissionMode emission = EmissionMode::accumulate;
  TimeSource time = TimeSource::cost_model();
  ThresholdRule threshold_rule = ThresholdRule::ceil;
  /// Regenerate candidates for every transaction instead of once per task.
  /// Output is unchanged; generation counters grow accordingly.
  bool generate_per_transaction = false;
};

/// When a phase stops adding passes.
struct StopRule {
  enum class Kind { fixed, threshold } kind = Kind::fixed;
  std::size_t npass = 1;
  double ct = 0.0;

  static StopRule fixed(std::size_t n) { return {Kind::fixed, n, 0.0}; }
  static StopRule threshold(double ct) { return {Kind::threshold, 0, ct}; }
};

struct PhaseReport {
  std::size_t first_pass = 1;
  std::size_t npass = 1;
  std::vector<PassInfo> passes;
  Count candidate_count = 0;
  JobCounters counters;
  Ticks elapsed = 0;
  std::size_t map_tasks = 0;

  std::vector<Count> per_level_candidates() const {
    std::vector<Count> out;
    for (const auto& p : passes) out.push_back(p.candidates);
    return out;
  }
  std::vector<PassMode> modes() const {
    std::vector<PassMode> out;
    for (const auto& p : passes) out.push_back(p.mode);
    return out;
  }
  std::size_t last_pass() const { return first_pass + npass - 1; }
};

struct LevelResult {
  std::size_t k = 0;
  std::vector<std::pair<Itemset, Count>> itemsets;
  friend bool operator==(const LevelResult&, const LevelResult&) = default;
};

struct RunReport {
  std::vector<PhaseReport> phases;
  std::vector<LevelResult> levels;  // non-empty levels, k ascending
  Count threshold = 0;
  Ticks total = 0;   // sum of phase elapsed
  Ticks actual = 0;  // end to end

  std::vector<std::size_t> level_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& l : levels) out.push_back(l.itemsets.size());
    return out;
  }
  const LevelResult* level(std::size_t k) const {
    for (const auto& l : levels)
      if (l.k == k) return &l;
    return nullptr;
  }
  std::size_t frequent_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.itemsets.size();
    return n;
  }
};

// -- planners ---------------------------------------------------------------

/// ct = alpha * |L| for the highest completed level.
inline double candidate_threshold(double alpha, std::size_t longest_level_count) {
  return alpha * static_cast<double>(longest_level_count);
}

inline double dpc_next_alpha(Ticks et_prev, Ticks beta, double alpha_high) {
  return et_prev < beta ? alpha_high : 1.0;
}

inline double etdpc_next_alpha(Ticks et, Ticks et_prev, Ticks beta1, Ticks beta2) {
  if (et_prev < et) {
    if (et <= beta1) return 3.0;
    if (et < beta2) return 2.0;
    return 1.0;
  }
  // 2 * ETprev >= 3 * ET is ETprev >= 1.5 * ET without rounding.
  return 2 * static_cast<long double>(et_prev) >= 3 * static_cast<long double>(et) ? 3.0 : 2.0;
}

inline std::size_t vfpc_next_npass(Count num_cands_k, Count num_cands_k_prev, std::size_t npass) {
  return num_cands_k < num_cands_k_prev ? npass + 3 : 2;
}

// -- phase mapper -----------------------------------------------------------

/// Candidate levels of one phase, as generated inside a map task.
struct PhaseCandidates {
  std::vector<CandidateTrie> levels;
  std::vector<PassInfo> passes;
  Count candidate_count = 0;
};

/// Generates the candidate levels of a phase starting at pass k from the
/// broadcast L_{k-1}. Pass 1 always uses apriori_gen; later passes generate
/// from the previous level's candidates with apriori_gen, or join-only when
/// optimized. Stops after the first empty level.
inline PhaseCandidates generate_phase(const CandidateTrie& broadcast, std::size_t k, const StopRule& rule,
                                      bool optimized) {
  PhaseCandidates out;
  for (std::size_t pass = 0;; ++pass) {
    if (rule.kind == StopRule::Kind::fixed && pass >= std::max<std::size_t>(rule.npass, 1)) break;
    if (rule.kind == StopRule::Kind::threshold && pass > 0 &&
        !(static_cast<double>(out.candidate_count) <= rule.ct))
      break;
    const CandidateTrie& source = pass == 0 ? broadcast : out.levels.back();
    const bool prune = pass == 0 || !optimized;
    auto [trie, gen] = prune ? apriori_gen(source) : non_apriori_gen(source);
    PassInfo info{k + pass, trie.size(), gen, prune ? PassMode::pruned : PassMode::unpruned};
    out.candidate_count += trie.size();
    out.passes.push_back(info);
    bool exhausted = trie.empty();
    out.levels.push_back(std::move(trie));
    if (exhausted) break;
  }
  return out;
}

/// One map task of a Job2 phase: generate, count against the split, emit.
inline MapOutput multi_pass_mapper(std::span<const Transaction> split, const CandidateTrie& broadcast, std::size_t k,
                                   const StopRule& rule, bool optimized, EmissionMode emission,
                                   bool generate_per_transaction = false) {
  PhaseCandidates phase = generate_phase(broadcast, k, rule, optimized);
  if (generate_per_transaction) {
    for (std::size_t t = 1; t < split.size(); ++t) {
      PhaseCandidates again = generate_phase(broadcast, k, rule, optimized);
      for (std::size_t p = 0; p < phase.passes.size(); ++p) phase.passes[p].gen += again.passes[p].gen;
    }
  }

  MapOutput out;
  auto& ctx = out.context;
  ctx.candidate_count = phase.candidate_count;
  ctx.npass = phase.passes.size();
  ctx.passes = phase.passes;

  for (const auto& t : split) {
    for (auto& level : phase.levels) {
      ctx.subset_node_visits += level.match(t, [&](std::size_t leaf) {
        ++ctx.matches;
        if (emission == EmissionMode::per_match)
          out.pairs.push_back({level.itemset_at(leaf), 1});
        else
          level.add_support_at(leaf, 1);
      });
    }
  }
  if (emission == EmissionMode::accumulate) {
    for (const auto& level : phase.levels)
      for (std::size_t leaf = 0; leaf < level.size(); ++leaf)
        if (Count c = level.support_at(leaf)) out.pairs.push_back({level.itemset_at(leaf), c});
  }
  return out;
}

/// Map task of Job1: (item, 1) per item occurrence.
inline MapOutput one_itemset_mapper(std::span<const Transaction> split, std::size_t item_count,
                                    EmissionMode emission) {
  MapOutput out;
  out.context.npass = 1;
  out.context.passes.push_back(PassInfo{1, 0, {}, PassMode::pruned});
  std::vector<Count> counts(emission == EmissionMode::accumulate ? item_count : 0, 0);
  for (const auto& t : split) {
    for (ItemId item : t) {
      ++out.context.matches;
      if (emission == EmissionMode::per_match)
        out.pairs.push_back({{item}, 1});
      else
        ++counts[item];
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) out.pairs.push_back({{static_cast<ItemId>(i)}, counts[i]});
  return out;
}

/// Groups reduced pairs by itemset size; only non-empty levels are returned.
inline std::vector<LevelResult> split_levels(const std::vector<KeyValuePair>& reduced) {
  std::map<std::size_t, LevelResult> by_k;
  for (const auto& p : reduced) {
    auto& level = by_k[p.key.size()];
    level.k = p.key.size();
    level.itemsets.emplace_back(p.key, p.value);
  }
  std::vector<LevelResult> out;
  for (auto& [k, level] : by_k) {
    std::sort(level.itemsets.begin(), level.itemsets.end());
    out.push_back(std::move(level));
  }
  return out;
}

inline CandidateTrie trie_from_level(const LevelResult& level) {
  CandidateTrie trie(level.k);
  for (const auto& [items, support] : level.itemsets) trie.append(items, support);
  return trie;
}

// -- drivers ----------------------------------------------------------------

namespace detail {

// Shared driver state: the db, the split plan, accumulated levels and phases.
class Driver {
public:
  Driver(const TransactionDb& db, double min_sup, const RunOptions& options)
      : db_(db), options_(options), splits_(make_splits(db, std::max<std::size_t>(options.lines_per_split, 1))) {
    report_.threshold = db.empty() ? 1 : threshold(min_sup, db.size(), options.threshold_rule);
    started_ = std::chrono::steady_clock::now();
  }

  JobSpec spec() const {
    return JobSpec{report_.threshold, options_.num_reducers, options_.emission, options_.workers};
  }

  const PhaseReport& job1() {
    auto result = run_job(spec(), db_, splits_,
                          [&](std::span<const Transaction> split, EmissionMode mode) {
                            return one_itemset_mapper(split, db_.item_count(), mode);
                          },
                          options_.time);
    return record(1, std::move(result));
  }

  const PhaseReport& job2(std::size_t k, const StopRule& rule, bool optimized) {
    const LevelResult* prev = report_.level(k - 1);
    CandidateTrie broadcast = prev ? trie_from_level(*prev) : CandidateTrie(k - 1);
    auto result = run_job(spec(), db_, splits_,
                          [&](std::span<const Transaction> split, EmissionMode mode) {
                            return multi_pass_mapper(split, broadcast, k, rule, optimized, mode,
                                                     options_.generate_per_transaction);
                          },
                          options_.time);
    return record(k, std::move(result));
  }

  /// |L_{k}|, zero when the level is empty.
  std::size_t level_count(std::size_t k) const {
    const LevelResult* l = report_.level(k);
    return l ? l->itemsets.size() : 0;
  }

  Ticks ticks(double seconds) const { return options_.time.from_seconds(seconds); }

  RunReport finish() {
    Ticks total = 0;
    for (const auto& p : report_.phases) total += p.elapsed;
    report_.total = total;
    if (options_.time.mode == ClockMode::cost) {
      report_.actual = total;
    } else {
      auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - started_);
      report_.actual = static_cast<Ticks>(ns.count());
    }
    return std::move(report_);
  }

private:
  const PhaseReport& record(std::size_t first_pass, JobResult result) {
    PhaseReport phase;
    phase.first_pass = first_pass;
    phase.npass = result.counters.npass;
    phase.passes = std::move(result.passes);
    phase.candidate_count = result.counters.candidate_count;
    phase.counters = result.counters;
    phase.elapsed = result.elapsed;
    phase.map_tasks = result.map_tasks;
    // Zero map tasks (empty db) still executes the phase's first pass.
    if (phase.npass == 0) {
      phase.npass = 1;
      phase.passes.push_back(PassInfo{first_pass, 0, {}, PassMode::pruned});
    }
    for (auto& level : split_levels(result.reduced)) report_.levels.push_back(std::move(level));
    std::sort(report_.levels.begin(), report_.levels.end(),
              [](const LevelResult& a, const LevelResult& b) { return a.k < b.k; });
    report_.phases.push_back(std::move(phase));
    return report_.phases.back();
  }

  const TransactionDb& db_;
  RunOptions options_;
  SplitPlan splits_;
  RunReport report_;
  std::chrono::steady_clock::time_point started_;
};

}  // namespace detail

/// Job1 alone: the frequent 1-itemsets and the phase that found them.
inline std::pair<LevelResult, PhaseReport> one_itemset_phase(const TransactionDb& db, double min_sup,
                                                             const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  PhaseReport phase = driver.job1();
  RunReport run = driver.finish();
  const LevelResult* l1 = run.level(1);
  return {l1 ? *l1 : LevelResult{1, {}}, phase};
}

inline RunReport spc_run(const TransactionDb& db, double min_sup, const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  driver.job1();
  for (std::size_t k = 2; driver.level_count(k - 1) > 0;) k += driver.job2(k, StopRule::fixed(1), false).npass;
  return driver.finish();
}

inline RunReport fpc_run(const TransactionDb& db, double min_sup, const StrategyConfig& config,
                         const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  driver.job1();
  for (std::size_t k = 2; driver.level_count(k - 1) > 0;) {
    std::size_t npass = k < config.fpc_start ? 1 : config.fpc_width;
    k += driver.job2(k, StopRule::fixed(npass), false).npass;
  }
  return driver.finish();
}

inline RunReport vfpc_run(const TransactionDb& db, double min_sup, bool optimized, const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  driver.job1();
  std::size_t npass = 2;
  Count num_cands_prev = 0;
  for (std::size_t k = 2; driver.level_count(k - 1) > 0;) {
    const PhaseReport& phase = driver.job2(k, StopRule::fixed(npass), optimized);
    Count num_cands = phase.candidate_count;
    k += phase.npass;
    npass = vfpc_next_npass(num_cands, num_cands_prev, npass);
    num_cands_prev = num_cands;
  }
  return driver.finish();
}

inline RunReport etdpc_run(const TransactionDb& db, double min_sup, bool optimized, const StrategyConfig& config,
                           const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  Ticks et_prev = driver.job1().elapsed;
  const Ticks beta1 = driver.ticks(config.etdpc_beta1);
  const Ticks beta2 = driver.ticks(config.etdpc_beta2);
  double alpha = 1.0;
  for (std::size_t k = 2; driver.level_count(k - 1) > 0;) {
    double ct = candidate_threshold(alpha, driver.level_count(k - 1));
    const PhaseReport& phase = driver.job2(k, StopRule::threshold(ct), optimized);
    Ticks et = phase.elapsed;
    k += phase.npass;
    alpha = etdpc_next_alpha(et, et_prev, beta1, beta2);
    et_prev = et;
  }
  return driver.finish();
}

inline RunReport dpc_run(const TransactionDb& db, double min_sup, const StrategyConfig& config,
                         const RunOptions& options = {}) {
  detail::Driver driver(db, min_sup, options);
  driver.job1();
  const Ticks beta = driver.ticks(config.dpc_beta);
  double alpha = 1.0;
  for (std::size_t k = 2; driver.level_count(k - 1) > 0;) {
    double ct = candidate_threshold(alpha, driver.level_count(k - 1));
    const PhaseReport& phase = driver.job2(k, StopRule::threshold(ct), false);
    k += phase.npass;
    alpha = dpc_next_alpha(phase.elapsed, beta, config.dpc_alpha_high);
  }
  return driver.finish();
}

inline RunReport run_strategy(const TransactionDb& db, double min_sup, const StrategyConfig& config,
                              const RunOptions& options = {}) {
  config.validate();
  switch (config.algorithm) {
    case Algorithm::spc: return spc_run(db, min_sup, options);
    case Algorithm::fpc: return fpc_run(db, min_sup, config, options);
    case Algorithm::dpc: return dpc_run(db, min_sup, config, options);
    case Algorithm::vfpc: return vfpc_run(db, min_sup, config.optimized, options);
    case Algorithm::etdpc: return etdpc_run(db, min_sup, config.optimized, config, options);
  }
  throw ArgumentError("unknown algorithm");
}

/// The seven variants in the order they are usually tabulated.
inline std::vector<StrategyConfig> all_strategies(double dpc_alpha_high = 2.0) {
  std::vector<StrategyConfig> out;
  auto add = [&](Algorithm a, bool optimized) {
    StrategyConfig c;
    c.algorithm = a;
    c.optimized = optimized;
    c.dpc_alpha_high = dpc_alpha_high;
    out.push_back(c);
  };
  add(Algorithm::spc, false);
  add(Algorithm::fpc, false);
  add(Algorithm::dpc, false);
  add(Algorithm::vfpc, false);
  add(Algorithm::etdpc, false);
  add(Algorithm::vfpc, true);
  add(Algorithm::etdpc, true);
  return out;
}

}  // namespace passcomb
