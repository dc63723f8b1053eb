#pragma once

// Command-line front end: run, verify, report, cost, generate.
//
// Exit codes: 0 ok, 1 verification found differences, 2 usage error,
// 3 I/O or unreadable input, 4 internal consistency failure.

#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "passcomb/dataset.hpp"
#include "passcomb/engine.hpp"
#include "passcomb/oracle.hpp"
#include "passcomb/report.hpp"
#include "passcomb/strategies.hpp"

namespace passcomb::cli {

enum ExitCode : int { ok = 0, differences = 1, usage = 2, io = 3, consistency = 4 };

/// Usage problem detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be read or written, or its contents could not be parsed.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<T> out;
  for (const auto& field : passcomb::detail::split(text, ',')) {
    std::istringstream in(field);
    T value{};
    if (!(in >> value) || !in.eof()) throw UsageError(std::string(flag) + ": bad value '" + field + "'");
    out.push_back(value);
  }
  if (out.size() != expected)
    throw UsageError(std::string(flag) + " expects " + std::to_string(expected) + " comma-separated values");
  return out;
}

struct InputFlags {
  std::string input;
  std::string generate;

  void add(CLI::App* cmd) {
    auto* in = cmd->add_option("--input", input, "FIMI transaction file");
    auto* gen = cmd->add_option("--generate", generate, "synthetic data: n,items,width,seed");
    in->excludes(gen);
  }

  std::pair<TransactionDb, std::string> load() const {
    if (!generate.empty()) {
      auto v = parse_list<double>(generate, 4, "--generate");
      GeneratorConfig g;
      g.n = static_cast<std::size_t>(v[0]);
      g.item_count = static_cast<std::size_t>(v[1]);
      g.avg_width = v[2];
      g.seed = static_cast<std::uint64_t>(v[3]);
      try {
        return {generate_synthetic(g), "generate:" + generate};
      } catch (const ArgumentError& e) {
        throw UsageError(std::string("--generate: ") + e.what());
      }
    }
    if (input.empty()) throw UsageError("an input is required: --input <path> or --generate n,items,width,seed");
    std::ifstream f(input);
    if (!f) throw IoError("cannot open input '" + input + "'");
    try {
      return {parse_fimi(f), input};
    } catch (const ParseError& e) {
      throw IoError(input + ": " + e.what());
    }
  }
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

inline ReportDoc load_report(const std::string& path) {
  std::string text = read_file(path);
  try {
    return parse_report(text);
  } catch (const std::exception& e) {
    throw IoError("unreadable report '" + path + "': " + e.what());
  }
}

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write '" + path + "'");
}

inline std::string format_itemset(const std::vector<ItemLabel>& labels) {
  std::string s = "{";
  for (std::size_t i = 0; i < labels.size(); ++i) s += (i ? " " : "") + std::to_string(labels[i]);
  return s + "}";
}

}  // namespace detail

struct RunFlags {
  detail::InputFlags input;
  double min_sup = 0.0;
  std::string algo = "spc";
  bool optimized = false;
  std::size_t lines_per_split = 1000;
  std::size_t workers = 1;
  std::size_t num_reducers = 1;
  std::string time = "wall";
  std::string cost_coeffs;
  double ticks_per_second = 0.0;
  std::string threshold_rule = "ceil";
  std::string emission = "accumulate";
  bool per_transaction_gen = false;
  StrategyConfig strategy;
  std::string out_format = "json";
  std::string out_file;
  bool emit_itemsets = false;
};

inline void add_run_flags(CLI::App* cmd, RunFlags& f) {
  f.input.add(cmd);
  cmd->add_option("--min-sup", f.min_sup, "relative minimum support in (0, 1]")->required();
  cmd->add_option("--algo", f.algo, "spc|fpc|dpc|vfpc|etdpc")
      ->check(CLI::IsMember({"spc", "fpc", "dpc", "vfpc", "etdpc"}));
  cmd->add_flag("--optimized", f.optimized, "skip pruning in later passes of a phase (vfpc, etdpc)");
  cmd->add_option("--lines-per-split", f.lines_per_split, "transactions per map task")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", f.workers, "parallel map/reduce workers")->check(CLI::PositiveNumber);
  cmd->add_option("--num-reducers", f.num_reducers, "reduce partitions")->check(CLI::PositiveNumber);
  cmd->add_option("--time", f.time, "wall|cost")->check(CLI::IsMember({"wall", "cost"}));
  cmd->add_option("--cost-coeffs", f.cost_coeffs, "ticks per emitted pair, join, prune check, node visit: a,b,c,d");
  cmd->add_option("--ticks-per-second", f.ticks_per_second, "cost-model ticks per second-equivalent")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threshold-rule", f.threshold_rule, "ceil|floor_plus_one")
      ->check(CLI::IsMember({"ceil", "floor_plus_one"}));
  cmd->add_option("--emission", f.emission, "accumulate|per_match")
      ->check(CLI::IsMember({"accumulate", "per_match"}));
  cmd->add_flag("--per-transaction-gen", f.per_transaction_gen, "regenerate candidates for every transaction");
  cmd->add_option("--fpc-width", f.strategy.fpc_width, "FPC passes per combined phase");
  cmd->add_option("--fpc-start", f.strategy.fpc_start, "FPC first combined pass");
  cmd->add_option("--alpha-high", f.strategy.dpc_alpha_high, "DPC alpha when the previous phase was fast");
  cmd->add_option("--beta", f.strategy.dpc_beta, "DPC time limit, seconds");
  cmd->add_option("--beta1", f.strategy.etdpc_beta1, "ETDPC lower time limit, seconds");
  cmd->add_option("--beta2", f.strategy.etdpc_beta2, "ETDPC upper time limit, seconds");
  cmd->add_option("--out", f.out_format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out-file", f.out_file, "write the report here instead of stdout");
  cmd->add_flag("--emit-itemsets", f.emit_itemsets, "include every frequent itemset in the report");
}

inline std::pair<StrategyConfig, RunOptions> resolve(const RunFlags& f) {
  StrategyConfig config = f.strategy;
  config.optimized = f.optimized;
  try {
    config.algorithm = parse_algorithm(f.algo);
    config.validate();
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (!(f.min_sup > 0.0 && f.min_sup <= 1.0)) throw UsageError("--min-sup must be in (0, 1]");

  RunOptions options;
  options.lines_per_split = f.lines_per_split;
  options.workers = f.workers;
  options.num_reducers = f.num_reducers;
  options.threshold_rule = parse_threshold_rule(f.threshold_rule);
  options.emission = parse_emission_mode(f.emission);
  options.generate_per_transaction = f.per_transaction_gen;
  if (f.time == "wall") {
    if (!f.cost_coeffs.empty() || f.ticks_per_second > 0.0)
      throw UsageError("--cost-coeffs and --ticks-per-second need --time cost");
    options.time = TimeSource::wall_clock();
  } else {
    TimeSource t = TimeSource::cost_model();
    if (!f.cost_coeffs.empty()) {
      auto v = detail::parse_list<Ticks>(f.cost_coeffs, 4, "--cost-coeffs");
      t.coeffs = {v[0], v[1], v[2], v[3]};
    }
    if (f.ticks_per_second > 0.0) t.ticks_per_second = f.ticks_per_second;
    options.time = t;
  }
  return {config, options};
}

inline int cmd_run(const RunFlags& f, std::ostream& out) {
  auto [config, options] = resolve(f);
  auto [db, source] = f.input.load();
  RunReport run = run_strategy(db, f.min_sup, config, options);
  ReportDoc doc = make_report(db, source, f.min_sup, config, options, run, f.emit_itemsets);
  std::string text;
  if (f.out_format == "json") {
    text = dump_report(doc);
  } else {
    std::ostringstream s;
    write_report_csv(doc, s);
    text = s.str();
  }
  detail::write_output(text, f.out_file, out);
  return ok;
}

struct VerifyFlags {
  detail::InputFlags input;
  double min_sup = 0.0;
  std::string report;
  std::string threshold_rule;
};

inline int cmd_verify(const VerifyFlags& f, std::ostream& out) {
  if (!(f.min_sup > 0.0 && f.min_sup <= 1.0)) throw UsageError("--min-sup must be in (0, 1]");
  ReportDoc doc = detail::load_report(f.report);
  auto [db, source] = f.input.load();
  ThresholdRule rule = f.threshold_rule.empty() ? doc.options.threshold_rule : parse_threshold_rule(f.threshold_rule);

  // Reported labels go back to ids; a label the db lacks cannot be frequent.
  std::vector<oracle::ReportedLevel> reported;
  std::vector<std::vector<ItemLabel>> unknown;
  for (const auto& l : doc.levels) {
    oracle::ReportedLevel r{l.k, l.count, std::nullopt};
    if (l.itemsets) {
      r.itemsets.emplace();
      for (const auto& [labels, support] : *l.itemsets) {
        Itemset ids;
        bool known = true;
        for (ItemLabel label : labels) {
          ItemId id = 0;
          known = known && db.find_id(label, id);
          ids.push_back(id);
        }
        if (known)
          r.itemsets->emplace_back(std::move(ids), support);
        else
          unknown.push_back(labels);
      }
    }
    reported.push_back(std::move(r));
  }

  oracle::FrequentSets truth = db.empty() ? oracle::FrequentSets{} : oracle::brute_force_frequent(db, f.min_sup, {}, rule);
  oracle::Verdict v = oracle::verify_levels(reported, truth);

  if (v.ok() && unknown.empty()) {
    out << "OK: " << doc.frequent_count() << " frequent itemsets in " << doc.levels.size()
        << " levels match the reference\n";
    return ok;
  }
  for (const auto& s : v.missing) out << "missing " << detail::format_itemset(db.to_labels(s)) << '\n';
  for (const auto& s : v.extra) out << "extra " << detail::format_itemset(db.to_labels(s)) << '\n';
  for (const auto& s : unknown) out << "extra " << detail::format_itemset(s) << " (label not in input)\n";
  for (const auto& [s, expected, got] : v.mismatched)
    out << "support " << detail::format_itemset(db.to_labels(s)) << " expected " << expected << " reported " << got
        << '\n';
  for (const auto& [k, expected, got] : v.level_counts)
    out << "level " << k << " count expected " << expected << " reported " << got << '\n';
  out << "DIFF: " << v.missing.size() << " missing, " << v.extra.size() + unknown.size() << " extra, "
      << v.mismatched.size() << " support mismatches, " << v.level_counts.size() << " level count mismatches\n";
  return differences;
}

struct ReportFlags {
  std::vector<std::string> inputs;
  std::string format = "table";
  std::string out_file;
};

inline int cmd_report(const ReportFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<ReportDoc> docs;
  for (const auto& p : f.inputs) docs.push_back(detail::load_report(p));
  if (mixed_inputs(docs)) err << "warning: reports come from different datasets or min_sup values\n";
  std::ostringstream s;
  if (f.format == "csv")
    write_comparison_csv(docs, s);
  else
    write_comparison_table(docs, s);
  detail::write_output(s.str(), f.out_file, out);
  return ok;
}

inline int cmd_cost(const std::vector<std::string>& inputs, std::ostream& out) {
  std::vector<ReportDoc> docs;
  for (const auto& p : inputs) docs.push_back(detail::load_report(p));
  write_cost_breakdown(docs, out);
  return ok;
}

struct GenerateFlags {
  GeneratorConfig config;
  std::string out_file;
};

inline int cmd_generate(const GenerateFlags& f, std::ostream& out) {
  TransactionDb db;
  try {
    db = generate_synthetic(f.config);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  detail::write_output(to_fimi(db), f.out_file, out);
  return ok;
}

/// Entry point shared by the executable and the tests. args excludes argv[0].
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Apriori with MapReduce pass-combining strategies", "passcomb"};
  app.require_subcommand(1);

  RunFlags run_flags;
  add_run_flags(app.add_subcommand("run", "mine frequent itemsets and write a run report"), run_flags);

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "check a run report against the reference miner");
  verify_flags.input.add(verify);
  verify->add_option("--min-sup", verify_flags.min_sup, "relative minimum support")->required();
  verify->add_option("--report", verify_flags.report, "run report (JSON)")->required();
  verify->add_option("--threshold-rule", verify_flags.threshold_rule, "override the report's rule")
      ->check(CLI::IsMember({"ceil", "floor_plus_one"}));

  ReportFlags report_flags;
  auto* report = app.add_subcommand("report", "compare run reports phase by phase");
  report->add_option("--inputs", report_flags.inputs, "run reports (JSON)")->required();
  report->add_option("--format", report_flags.format, "table|csv")->check(CLI::IsMember({"table", "csv"}));
  report->add_option("--out-file", report_flags.out_file, "write here instead of stdout");

  std::vector<std::string> cost_inputs;
  auto* cost = app.add_subcommand("cost", "candidate generation and counting work per pass");
  cost->add_option("--inputs", cost_inputs, "run reports (JSON)")->required();

  GenerateFlags gen_flags;
  auto* gen = app.add_subcommand("generate", "write a synthetic FIMI dataset");
  gen->add_option("--n", gen_flags.config.n, "transactions");
  gen->add_option("--items", gen_flags.config.item_count, "distinct items");
  gen->add_option("--width", gen_flags.config.avg_width, "mean transaction width");
  gen->add_option("--seed", gen_flags.config.seed, "RNG seed");
  gen->add_option("--out-file", gen_flags.out_file, "write here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // --help
    err << "error: " << e.what() << '\n';
    return usage;
  }

  try {
    if (app.got_subcommand("run")) return cmd_run(run_flags, out);
    if (app.got_subcommand("verify")) return cmd_verify(verify_flags, out);
    if (app.got_subcommand("report")) return cmd_report(report_flags, out, err);
    if (app.got_subcommand("cost")) return cmd_cost(cost_inputs, out);
    if (app.got_subcommand("generate")) return cmd_generate(gen_flags, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return io;
  } catch (const ConsistencyError& e) {
    err << "internal consistency failure: " << e.what() << '\n';
    return consistency;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}

}  // namespace passcomb::cli
