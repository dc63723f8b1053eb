#pragma once

// Run reports: a JSON document (canonical), a CSV projection, and the
// comparison / cost tables built from several reports.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "passcomb/dataset.hpp"
#include "passcomb/engine.hpp"
#include "passcomb/strategies.hpp"
#include "passcomb/types.hpp"

namespace passcomb {

using json = nlohmann::ordered_json;

struct DatasetInfo {
  std::string source;
  std::size_t n = 0;
  std::size_t item_count = 0;
  double avg_width = 0.0;
  friend bool operator==(const DatasetInfo&, const DatasetInfo&) = default;
};

/// One frequent level as stored in a report; itemsets are in external labels
/// and only present when requested.
struct ReportLevel {
  std::size_t k = 0;
  std::size_t count = 0;
  std::optional<std::vector<std::pair<std::vector<ItemLabel>, Count>>> itemsets;
};

struct ReportDoc {
  DatasetInfo dataset;
  StrategyConfig strategy;
  double min_sup = 0.0;
  RunOptions options;
  Count threshold = 0;
  std::vector<PhaseReport> phases;
  std::vector<ReportLevel> levels;
  Ticks total = 0;
  Ticks actual = 0;

  std::size_t frequent_count() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.count;
    return n;
  }
  Count candidate_total() const {
    Count n = 0;
    for (const auto& p : phases) n += p.candidate_count;
    return n;
  }
  std::vector<std::size_t> level_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& l : levels) out.push_back(l.count);
    return out;
  }
};

inline ReportDoc make_report(const TransactionDb& db, std::string source, double min_sup, const StrategyConfig& config,
                             const RunOptions& options, const RunReport& run, bool emit_itemsets) {
  ReportDoc doc;
  DatasetStats s = stats(db);
  doc.dataset = {std::move(source), s.n, s.item_count, s.avg_width};
  doc.strategy = config;
  doc.min_sup = min_sup;
  doc.options = options;
  doc.threshold = run.threshold;
  doc.phases = run.phases;
  doc.total = run.total;
  doc.actual = run.actual;
  for (const auto& l : run.levels) {
    ReportLevel level{l.k, l.itemsets.size(), std::nullopt};
    if (emit_itemsets) {
      level.itemsets.emplace();
      level.itemsets->reserve(l.itemsets.size());
      for (const auto& [items, support] : l.itemsets) level.itemsets->emplace_back(db.to_labels(items), support);
    }
    doc.levels.push_back(std::move(level));
  }
  return doc;
}

// -- JSON -------------------------------------------------------------------

inline const char* to_string(ClockMode m) { return m == ClockMode::wall ? "wall" : "cost"; }
inline const char* to_string(EmissionMode m) { return m == EmissionMode::accumulate ? "accumulate" : "per_match"; }
inline const char* to_string(ThresholdRule r) { return r == ThresholdRule::ceil ? "ceil" : "floor_plus_one"; }

inline ClockMode parse_clock_mode(const std::string& s) {
  if (s == "wall") return ClockMode::wall;
  if (s == "cost") return ClockMode::cost;
  throw ArgumentError("unknown time mode '" + s + "'");
}
inline EmissionMode parse_emission_mode(const std::string& s) {
  if (s == "accumulate") return EmissionMode::accumulate;
  if (s == "per_match") return EmissionMode::per_match;
  throw ArgumentError("unknown emission mode '" + s + "'");
}
inline ThresholdRule parse_threshold_rule(const std::string& s) {
  if (s == "ceil") return ThresholdRule::ceil;
  if (s == "floor_plus_one") return ThresholdRule::floor_plus_one;
  throw ArgumentError("unknown threshold rule '" + s + "'");
}
inline PassMode parse_pass_mode(const std::string& s) {
  if (s == "PRUNED") return PassMode::pruned;
  if (s == "UNPRUNED") return PassMode::unpruned;
  throw ArgumentError("unknown pass mode '" + s + "'");
}

inline json counters_to_json(const JobCounters& c) {
  return json{{"candidate_count", c.candidate_count}, {"npass", c.npass},
              {"emitted_pairs", c.emitted_pairs},     {"joins", c.joins},
              {"prune_checks", c.prune_checks},       {"pruned", c.pruned},
              {"subset_node_visits", c.subset_node_visits}, {"matches", c.matches}};
}

inline JobCounters counters_from_json(const json& j) {
  JobCounters c;
  c.candidate_count = j.at("candidate_count").get<Count>();
  c.npass = j.at("npass").get<std::size_t>();
  c.emitted_pairs = j.at("emitted_pairs").get<Count>();
  c.joins = j.at("joins").get<Count>();
  c.prune_checks = j.at("prune_checks").get<Count>();
  c.pruned = j.at("pruned").get<Count>();
  c.subset_node_visits = j.at("subset_node_visits").get<Count>();
  c.matches = j.at("matches").get<Count>();
  return c;
}

inline json to_json(const ReportDoc& doc) {
  const auto& o = doc.options;
  const auto& s = doc.strategy;
  json j;
  j["format"] = "passcomb-run/1";
  j["dataset"] = {{"source", doc.dataset.source},
                  {"n", doc.dataset.n},
                  {"item_count", doc.dataset.item_count},
                  {"avg_width", doc.dataset.avg_width}};
  j["config"] = {{"algorithm", to_string(s.algorithm)},
                 {"optimized", s.optimized},
                 {"min_sup", doc.min_sup},
                 {"threshold_rule", to_string(o.threshold_rule)},
                 {"lines_per_split", o.lines_per_split},
                 {"num_reducers", o.num_reducers},
                 {"workers", o.workers},
                 {"emission", to_string(o.emission)},
                 {"generate_per_transaction", o.generate_per_transaction},
                 {"time",
                  {{"mode", to_string(o.time.mode)},
                   {"coeffs",
                    {o.time.coeffs.per_emitted_pair, o.time.coeffs.per_join, o.time.coeffs.per_prune_check,
                     o.time.coeffs.per_node_visit}},
                   {"ticks_per_second", o.time.ticks_per_second}}},
                 {"fpc_width", s.fpc_width},
                 {"fpc_start", s.fpc_start},
                 {"alpha_high", s.dpc_alpha_high},
                 {"beta", s.dpc_beta},
                 {"beta1", s.etdpc_beta1},
                 {"beta2", s.etdpc_beta2}};
  j["threshold"] = doc.threshold;

  json phases = json::array();
  for (const auto& p : doc.phases) {
    json modes = json::array();
    json per_level = json::array();
    json passes = json::array();
    for (const auto& pass : p.passes) {
      modes.push_back(to_string(pass.mode));
      per_level.push_back(pass.candidates);
      passes.push_back({{"k", pass.k},
                        {"candidates", pass.candidates},
                        {"mode", to_string(pass.mode)},
                        {"joins", pass.gen.joins},
                        {"prune_checks", pass.gen.prune_checks},
                        {"pruned", pass.gen.pruned}});
    }
    phases.push_back({{"first_pass", p.first_pass},
                      {"npass", p.npass},
                      {"modes", modes},
                      {"per_level_candidates", per_level},
                      {"candidate_count", p.candidate_count},
                      {"passes", passes},
                      {"counters", counters_to_json(p.counters)},
                      {"elapsed_ticks", p.elapsed},
                      {"map_tasks", p.map_tasks}});
  }
  j["phases"] = std::move(phases);

  json levels = json::array();
  for (const auto& l : doc.levels) {
    json level = {{"k", l.k}, {"count", l.count}};
    if (l.itemsets) {
      json sets = json::array();
      for (const auto& [items, support] : *l.itemsets) sets.push_back({{"items", items}, {"support", support}});
      level["itemsets"] = std::move(sets);
    }
    levels.push_back(std::move(level));
  }
  j["levels"] = std::move(levels);

  j["totals"] = {{"phases", doc.phases.size()},
                 {"candidates", doc.candidate_total()},
                 {"frequent_itemsets", doc.frequent_count()},
                 {"total_ticks", doc.total},
                 {"actual_ticks", doc.actual}};
  return j;
}

/// Inverse of to_json. Throws json::exception on missing or mistyped fields
/// and ArgumentError on inconsistent ones.
inline ReportDoc report_from_json(const json& j) {
  if (j.at("format").get<std::string>() != "passcomb-run/1") throw ArgumentError("unknown report format");
  ReportDoc doc;
  const auto& d = j.at("dataset");
  doc.dataset = {d.at("source").get<std::string>(), d.at("n").get<std::size_t>(),
                 d.at("item_count").get<std::size_t>(), d.at("avg_width").get<double>()};

  const auto& c = j.at("config");
  auto& s = doc.strategy;
  s.algorithm = parse_algorithm(c.at("algorithm").get<std::string>());
  s.optimized = c.at("optimized").get<bool>();
  s.fpc_width = c.at("fpc_width").get<std::size_t>();
  s.fpc_start = c.at("fpc_start").get<std::size_t>();
  s.dpc_alpha_high = c.at("alpha_high").get<double>();
  s.dpc_beta = c.at("beta").get<double>();
  s.etdpc_beta1 = c.at("beta1").get<double>();
  s.etdpc_beta2 = c.at("beta2").get<double>();
  doc.min_sup = c.at("min_sup").get<double>();
  auto& o = doc.options;
  o.threshold_rule = parse_threshold_rule(c.at("threshold_rule").get<std::string>());
  o.lines_per_split = c.at("lines_per_split").get<std::size_t>();
  o.num_reducers = c.at("num_reducers").get<std::size_t>();
  o.workers = c.at("workers").get<std::size_t>();
  o.emission = parse_emission_mode(c.at("emission").get<std::string>());
  o.generate_per_transaction = c.at("generate_per_transaction").get<bool>();
  const auto& t = c.at("time");
  o.time.mode = parse_clock_mode(t.at("mode").get<std::string>());
  const auto& coeffs = t.at("coeffs");
  if (!coeffs.is_array() || coeffs.size() != 4) throw ArgumentError("time.coeffs must hold four numbers");
  o.time.coeffs = {coeffs[0].get<Ticks>(), coeffs[1].get<Ticks>(), coeffs[2].get<Ticks>(), coeffs[3].get<Ticks>()};
  o.time.ticks_per_second = t.at("ticks_per_second").get<double>();
  doc.threshold = j.at("threshold").get<Count>();

  for (const auto& pj : j.at("phases")) {
    PhaseReport p;
    p.first_pass = pj.at("first_pass").get<std::size_t>();
    p.npass = pj.at("npass").get<std::size_t>();
    p.candidate_count = pj.at("candidate_count").get<Count>();
    for (const auto& q : pj.at("passes")) {
      PassInfo pass;
      pass.k = q.at("k").get<std::size_t>();
      pass.candidates = q.at("candidates").get<Count>();
      pass.mode = parse_pass_mode(q.at("mode").get<std::string>());
      pass.gen = {q.at("joins").get<Count>(), q.at("prune_checks").get<Count>(), q.at("pruned").get<Count>()};
      p.passes.push_back(pass);
    }
    if (pj.at("modes").size() != p.passes.size() || pj.at("per_level_candidates").size() != p.passes.size())
      throw ArgumentError("phase pass lists disagree");
    p.counters = counters_from_json(pj.at("counters"));
    p.elapsed = pj.at("elapsed_ticks").get<Ticks>();
    p.map_tasks = pj.at("map_tasks").get<std::size_t>();
    doc.phases.push_back(std::move(p));
  }

  for (const auto& lj : j.at("levels")) {
    ReportLevel l;
    l.k = lj.at("k").get<std::size_t>();
    l.count = lj.at("count").get<std::size_t>();
    if (lj.contains("itemsets")) {
      l.itemsets.emplace();
      for (const auto& e : lj.at("itemsets"))
        l.itemsets->emplace_back(e.at("items").get<std::vector<ItemLabel>>(), e.at("support").get<Count>());
      if (l.itemsets->size() != l.count) throw ArgumentError("level count disagrees with its itemsets");
    }
    doc.levels.push_back(std::move(l));
  }

  const auto& totals = j.at("totals");
  doc.total = totals.at("total_ticks").get<Ticks>();
  doc.actual = totals.at("actual_ticks").get<Ticks>();
  return doc;
}

inline std::string dump_report(const ReportDoc& doc) { return to_json(doc).dump(2) + "\n"; }

inline ReportDoc parse_report(const std::string& text) { return report_from_json(json::parse(text)); }

// -- CSV --------------------------------------------------------------------

namespace detail {

template <class T>
std::string join(const std::vector<T>& values, char sep) {
  std::ostringstream out;
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? std::string(1, sep) : "") << values[i];
  return out.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

/// Flat projection of one report: a row per phase, then a row per level.
/// List-valued cells use '|' as separator.
inline void write_report_csv(const ReportDoc& doc, std::ostream& out) {
  out << "record,algorithm,k,npass,modes,per_level_candidates,count,emitted_pairs,joins,prune_checks,pruned,"
         "subset_node_visits,matches,elapsed_ticks,map_tasks\n";
  const std::string name = doc.strategy.name();
  for (const auto& p : doc.phases) {
    std::vector<std::string> modes;
    for (PassMode m : p.modes()) modes.emplace_back(to_string(m));
    const auto& c = p.counters;
    out << "phase," << name << ',' << p.first_pass << ',' << p.npass << ',' << detail::join(modes, '|') << ','
        << detail::join(p.per_level_candidates(), '|') << ',' << p.candidate_count << ',' << c.emitted_pairs << ','
        << c.joins << ',' << c.prune_checks << ',' << c.pruned << ',' << c.subset_node_visits << ',' << c.matches
        << ',' << p.elapsed << ',' << p.map_tasks << '\n';
  }
  for (const auto& l : doc.levels) out << "level," << name << ',' << l.k << ",,,," << l.count << ",,,,,,,,\n";
}

// -- comparison tables ------------------------------------------------------

/// Row of a comparison table: one report's phases placed by first pass.
struct ComparisonRow {
  std::string algorithm;
  std::size_t phases = 0;
  std::map<std::size_t, Ticks> elapsed_by_pass;
  std::map<std::size_t, Count> candidates_by_pass;
  Ticks total = 0;
  Ticks actual = 0;
  double ticks_per_second = 1.0;
};

inline ComparisonRow comparison_row(const ReportDoc& doc) {
  ComparisonRow row;
  row.algorithm = doc.strategy.name();
  row.phases = doc.phases.size();
  for (const auto& p : doc.phases) {
    row.elapsed_by_pass[p.first_pass] = p.elapsed;
    if (p.first_pass > 1) row.candidates_by_pass[p.first_pass] = p.candidate_count;
  }
  row.total = doc.total;
  row.actual = doc.actual;
  row.ticks_per_second = doc.options.time.ticks_per_second;
  return row;
}

/// Reports disagree on what was mined.
inline bool mixed_inputs(const std::vector<ReportDoc>& docs) {
  for (const auto& d : docs)
    if (!(d.dataset == docs.front().dataset) || d.min_sup != docs.front().min_sup) return true;
  return false;
}

inline std::string format_seconds(Ticks t, double ticks_per_second) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(3) << static_cast<double>(t) / ticks_per_second;
  return out.str();
}

inline void write_comparison_table(const std::vector<ReportDoc>& docs, std::ostream& out) {
  if (docs.empty()) return;
  if (mixed_inputs(docs))
    out << "WARNING: reports come from different datasets or min_sup values; rows are not comparable\n";
  const auto& first = docs.front();
  out << "dataset " << first.dataset.source << "  n=" << first.dataset.n << "  min_sup=" << first.min_sup
      << "  threshold=" << first.threshold << "\n\n";

  std::vector<ComparisonRow> rows;
  std::size_t max_pass = 1;
  for (const auto& d : docs) {
    rows.push_back(comparison_row(d));
    for (const auto& p : d.phases) max_pass = std::max(max_pass, p.last_pass());
  }
  std::size_t name_width = std::string("Algorithm (phases)").size();
  for (const auto& r : rows)
    name_width = std::max(name_width, r.algorithm.size() + 3 + std::to_string(r.phases).size());

  auto label = [](const ComparisonRow& r) { return r.algorithm + " (" + std::to_string(r.phases) + ")"; };
  const int cw = 10;

  out << "Elapsed seconds per phase, by first pass\n";
  out << std::left << std::setw(static_cast<int>(name_width)) << "Algorithm (phases)" << std::right;
  for (std::size_t k = 1; k <= max_pass; ++k) out << std::setw(cw) << ("P" + std::to_string(k));
  out << std::setw(cw) << "Total" << std::setw(cw) << "Actual" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << label(r) << std::right;
    for (std::size_t k = 1; k <= max_pass; ++k) {
      auto it = r.elapsed_by_pass.find(k);
      out << std::setw(cw) << (it == r.elapsed_by_pass.end() ? "" : format_seconds(it->second, r.ticks_per_second));
    }
    out << std::setw(cw) << format_seconds(r.total, r.ticks_per_second) << std::setw(cw)
        << format_seconds(r.actual, r.ticks_per_second) << '\n';
  }

  out << "\nCandidates per phase, by first pass\n";
  out << std::left << std::setw(static_cast<int>(name_width)) << "Algorithm" << std::right;
  for (std::size_t k = 2; k <= max_pass; ++k) out << std::setw(cw) << ("P" + std::to_string(k));
  out << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.algorithm << std::right;
    for (std::size_t k = 2; k <= max_pass; ++k) {
      auto it = r.candidates_by_pass.find(k);
      out << std::setw(cw) << (it == r.candidates_by_pass.end() ? "" : std::to_string(it->second));
    }
    out << '\n';
  }
}

/// Long-form CSV of the comparison: one row per phase, with run totals
/// repeated so every row stands alone.
inline void write_comparison_csv(const std::vector<ReportDoc>& docs, std::ostream& out) {
  out << "algorithm,phases,first_pass,npass,candidate_count,elapsed_ticks,total_ticks,actual_ticks,ticks_per_second\n";
  for (const auto& d : docs) {
    for (const auto& p : d.phases) {
      out << d.strategy.name() << ',' << d.phases.size() << ',' << p.first_pass << ',' << p.npass << ','
          << p.candidate_count << ',' << p.elapsed << ',' << d.total << ',' << d.actual << ','
          << json(d.options.time.ticks_per_second).dump() << '\n';
    }
  }
}

struct ComparisonCsvRow {
  std::string algorithm;
  std::size_t phases = 0;
  std::size_t first_pass = 0;
  std::size_t npass = 0;
  Count candidate_count = 0;
  Ticks elapsed = 0;
  Ticks total = 0;
  Ticks actual = 0;
  double ticks_per_second = 0.0;
};

inline std::vector<ComparisonCsvRow> parse_comparison_csv(const std::string& text) {
  std::vector<ComparisonCsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    if (++line_no == 1) continue;
    auto f = detail::split(line, ',');
    if (f.size() != 9) throw ParseError(line_no, "expected 9 fields");
    try {
      rows.push_back({f[0], std::stoull(f[1]), std::stoull(f[2]), std::stoull(f[3]), std::stoull(f[4]),
                      std::stoull(f[5]), std::stoull(f[6]), std::stoull(f[7]), std::stod(f[8])});
    } catch (const std::logic_error&) {
      throw ParseError(line_no, "malformed number");
    }
  }
  return rows;
}

// -- cost breakdown ---------------------------------------------------------

struct CostSummary {
  std::string algorithm;
  bool optimized = false;
  Algorithm base = Algorithm::spc;
  JobCounters totals;
  Count candidates = 0;
  std::size_t unpruned_passes = 0;
  /// UNPRUNED passes whose prune_checks is not zero. Always 0 for a sound run.
  std::size_t unpruned_with_checks = 0;
};

inline CostSummary cost_summary(const ReportDoc& doc) {
  CostSummary s;
  s.algorithm = doc.strategy.name();
  s.optimized = doc.strategy.optimized;
  s.base = doc.strategy.algorithm;
  for (const auto& p : doc.phases) {
    const auto& c = p.counters;
    s.totals.emitted_pairs += c.emitted_pairs;
    s.totals.joins += c.joins;
    s.totals.prune_checks += c.prune_checks;
    s.totals.pruned += c.pruned;
    s.totals.subset_node_visits += c.subset_node_visits;
    s.totals.matches += c.matches;
    s.candidates += p.candidate_count;
    for (const auto& pass : p.passes) {
      if (pass.mode != PassMode::unpruned) continue;
      ++s.unpruned_passes;
      if (pass.gen.prune_checks != 0) ++s.unpruned_with_checks;
    }
  }
  return s;
}

inline std::string signed_delta(Count a, Count b) {
  if (a >= b) return "+" + std::to_string(a - b);
  return "-" + std::to_string(b - a);
}

inline void write_cost_breakdown(const std::vector<ReportDoc>& docs, std::ostream& out) {
  const int w = 14;
  out << std::left << std::setw(22) << "algorithm" << std::right << std::setw(6) << "pass" << std::setw(10) << "mode"
      << std::setw(w) << "candidates" << std::setw(w) << "joins" << std::setw(w) << "prune_checks" << std::setw(w)
      << "pruned" << std::setw(w) << "visits" << std::setw(w) << "emitted" << '\n';
  for (const auto& d : docs) {
    for (const auto& p : d.phases) {
      // One line per pass for the generation counters; visits and emitted
      // pairs are per phase and shown on its first line.
      for (std::size_t i = 0; i < p.passes.size(); ++i) {
        const auto& pass = p.passes[i];
        out << std::left << std::setw(22) << d.strategy.name() << std::right << std::setw(6) << pass.k
            << std::setw(10) << to_string(pass.mode) << std::setw(w) << pass.candidates << std::setw(w)
            << pass.gen.joins << std::setw(w) << pass.gen.prune_checks << std::setw(w) << pass.gen.pruned;
        if (i == 0)
          out << std::setw(w) << p.counters.subset_node_visits << std::setw(w) << p.counters.emitted_pairs;
        out << '\n';
      }
    }
  }

  std::vector<CostSummary> sums;
  for (const auto& d : docs) sums.push_back(cost_summary(d));
  if (sums.empty()) return;

  out << "\ntotals\n";
  for (const auto& s : sums) {
    out << "  " << s.algorithm << ": candidates=" << s.candidates << " joins=" << s.totals.joins
        << " prune_checks=" << s.totals.prune_checks << " pruned=" << s.totals.pruned
        << " visits=" << s.totals.subset_node_visits << " emitted=" << s.totals.emitted_pairs
        << " unpruned_passes=" << s.unpruned_passes << '\n';
    if (s.optimized) {
      if (s.unpruned_with_checks == 0)
        out << "    prune_checks = 0 in all " << s.unpruned_passes << " UNPRUNED (non-first) passes\n";
      else
        out << "    !! " << s.unpruned_with_checks << " UNPRUNED passes report prune checks\n";
    }
  }

  bool header = false;
  for (const auto& opt : sums) {
    if (!opt.optimized) continue;
    for (const auto& plain : sums) {
      if (plain.optimized || plain.base != opt.base) continue;
      if (!header) {
        out << "\noptimized vs plain\n";
        header = true;
      }
      out << "  " << opt.algorithm << " - " << plain.algorithm
          << ": candidates " << signed_delta(opt.candidates, plain.candidates) << ", joins "
          << signed_delta(opt.totals.joins, plain.totals.joins) << ", prune_checks "
          << signed_delta(opt.totals.prune_checks, plain.totals.prune_checks) << ", visits "
          << signed_delta(opt.totals.subset_node_visits, plain.totals.subset_node_visits) << ", emitted "
          << signed_delta(opt.totals.emitted_pairs, plain.totals.emitted_pairs) << '\n';
    }
  }
}

}  // namespace passcomb
