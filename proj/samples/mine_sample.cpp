// Mines a small synthetic dataset with every strategy and prints how each
// one grouped its passes into phases.
//
//   mine_sample [min_sup]

#include <cstdlib>
#include <iostream>

#include "passcomb/passcomb.hpp"

int main(int argc, char** argv) {
  using namespace passcomb;
  double min_sup = argc > 1 ? std::atof(argv[1]) : 0.1;

  TransactionDb db = generate_synthetic({.n = 2000, .item_count = 40, .avg_width = 8.0, .seed = 7});
  DatasetStats s = stats(db);
  std::cout << "n=" << s.n << " items=" << s.item_count << " avg_width=" << s.avg_width
            << " threshold=" << threshold(min_sup, db.size()) << "\n\n";

  RunOptions options;
  options.lines_per_split = 250;
  options.workers = 4;

  for (const StrategyConfig& config : all_strategies()) {
    RunReport run = run_strategy(db, min_sup, config, options);
    std::cout << config.name() << ": " << run.frequent_count() << " frequent itemsets, " << run.phases.size()
              << " phases, cost " << run.total << "\n  ";
    for (const auto& phase : run.phases) {
      std::cout << '[' << phase.first_pass;
      if (phase.npass > 1) std::cout << '-' << phase.last_pass();
      std::cout << "] ";
    }
    std::cout << '\n';
  }
}
