// Wall time of the window dynamic program as the window length k grows.
// Overrides below the derived window make the search inexact; the numbers
// only show the trend.

#include <chrono>
#include <iomanip>
#include <iostream>

#include "mdsr/solvers.hpp"

using namespace mdsr;

namespace {

// Chain where agents 2t and 2t+1 are incomparable (kappa = 1).
Poset paired_chain(std::size_t n) {
  std::vector<Poset::Pair> pairs;
  for (AgentId u = 0; u < n; ++u)
    for (AgentId v = u + 1; v < n; ++v)
      if (u / 2 != v / 2) pairs.emplace_back(u, v);
  return Poset::from_pairs(n, pairs);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 60;
  const int reps = argc > 2 ? std::stoi(argv[2]) : 3;
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= n; ++i) names.push_back("a" + std::to_string(i));
  Instance inst(3, names, MasterPoset{paired_chain(n), std::nullopt});

  std::cout << "n=" << n << " d=3 kappa=" << inst.lpo()->kappa << " derived k=" << dp_window(inst.lpo()->kappa, 3)
            << "\n";
  std::cout << std::setw(4) << "k" << std::setw(10) << "windows" << std::setw(12) << "states" << std::setw(12) << "ms"
            << std::setw(8) << "found\n";
  for (std::size_t k = 4; k <= 15; ++k) {
    DpOptions opt;
    opt.window = k;
    opt.max_gap = 2;
    double best = 1e300;
    DpResult r;
    for (int rep = 0; rep < reps; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      r = fpt_dp_search(inst, opt);
      best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    std::cout << std::setw(4) << k << std::setw(10) << r.stats.windows << std::setw(12) << r.stats.states
              << std::setw(12) << std::fixed << std::setprecision(3) << best << std::setw(7)
              << (r.matching ? "yes" : "no") << "\n";
  }
}
