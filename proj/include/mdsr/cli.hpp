#pragma once

#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdsr/io.hpp"
#include "mdsr/reductions.hpp"
#include "mdsr/solvers.hpp"
#include "mdsr/stability.hpp"
#include "mdsr/strict_order.hpp"

namespace mdsr::cli {

/// Exit codes of the command-line tool.
enum Exit : int { kOk = 0, kUsage = 1, kValidation = 2, kGuard = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text)) throw UsageError("cannot write " + path);
}

inline std::string source_name(const Instance& inst) {
  if (std::holds_alternative<ExplicitLists>(inst.source())) return "explicit";
  if (std::holds_alternative<MasterListSets>(inst.source())) return "master_list_sets";
  return "master_poset";
}

/// Two-dimensional random poset: the intersection of a random order with a
/// copy perturbed by adjacent swaps.
inline Poset random_poset(std::mt19937_64& rng, std::size_t n, std::size_t swaps) {
  std::vector<AgentId> first(n);
  std::iota(first.begin(), first.end(), 0);
  std::shuffle(first.begin(), first.end(), rng);
  std::vector<AgentId> second = first;
  for (std::size_t s = 0; n >= 2 && s < swaps; ++s) {
    std::size_t i = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
    std::swap(second[i], second[i + 1]);
  }
  std::vector<std::size_t> p1(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) p1[first[i]] = p2[second[i]] = i;
  std::vector<Poset::Pair> pairs;
  for (AgentId u = 0; u < n; ++u)
    for (AgentId v = 0; v < n; ++v)
      if (p1[u] < p1[v] && p2[u] < p2[v]) pairs.emplace_back(u, v);
  return Poset::from_pairs(n, pairs);
}

inline std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

struct SolveArgs {
  std::string input, algo = "auto", witness;
  bool json = false;
  BruteForceLimits brute;
  StabilityLimits stability;
  DpOptions dp;
  std::size_t dp_window = 0, dp_gap = 0;
};

inline int do_solve(const SolveArgs& a, std::ostream& out) {
  Instance inst = io::parse_instance(read_file(a.input));
  DpOptions dp = a.dp;
  if (a.dp_window) dp.window = a.dp_window;
  if (a.dp_gap) dp.max_gap = a.dp_gap;

  Algorithm algo = choose_algorithm(inst);
  if (a.algo == "brute") algo = Algorithm::Brute;
  else if (a.algo == "strict") algo = Algorithm::Strict;
  else if (a.algo == "dp") algo = Algorithm::Dp;
  else if (a.algo == "greedy") algo = Algorithm::Greedy;

  io::Json report;
  report["algorithm"] = std::string(algorithm_name(algo));
  std::optional<Matching> found;
  bool exact = true;
  std::string note;
  try {
    switch (algo) {
      case Algorithm::Strict: found = strict_order_solve(inst); break;
      case Algorithm::Brute: found = brute_force_solve(inst, a.brute); break;
      case Algorithm::Greedy: {
        auto g = greedy_big_d_search(inst);
        io::Json steps = io::Json::array();
        for (const auto& s : g.steps) steps.push_back(s.multiplicity);
        report["certificate"] = {{"threshold", g.threshold}, {"multiplicities", steps}};
        found = std::move(g.matching);
        break;
      }
      case Algorithm::Dp: {
        auto r = fpt_dp_search(inst, dp);
        report["dp"] = {{"k", r.stats.k},         {"gap", r.stats.gap},       {"window_agents", r.stats.window_agents},
                        {"windows", r.stats.windows}, {"states", r.stats.states}, {"exact", r.stats.exact}};
        exact = r.stats.exact;
        found = std::move(r.matching);
        break;
      }
    }
  } catch (const Error& e) {
    if (!is_guard_error(e.code())) throw;
    report["verdict"] = "UNKNOWN";
    report["reason"] = e.what();
    if (a.json) out << report.dump(2) << "\n";
    else out << "UNKNOWN\nalgorithm: " << algorithm_name(algo) << "\nreason: " << e.what() << "\n";
    return kGuard;
  }

  std::string verdict;
  std::optional<BlockingReport> blocking;
  bool validated = false;
  if (!found) {
    verdict = exact ? "NO-STABLE" : "UNKNOWN";
    if (!exact) note = "window overrides make a negative answer inconclusive";
  } else {
    try {
      blocking = find_blocking(inst, *found, a.stability);
      validated = true;
    } catch (const Error& e) {
      if (!is_guard_error(e.code())) throw;
      note = "stability check skipped: " + std::string(e.what());
    }
    verdict = blocking ? "UNSTABLE-EXISTS" : "STABLE";
  }

  report["verdict"] = verdict;
  report["validated"] = validated;
  if (found) report["matching"] = io::matching_to_json(inst, *found);
  if (blocking) report["blocking"] = io::detail::set_json(inst, blocking->group);
  if (!note.empty()) report["note"] = note;
  if (a.json) {
    out << report.dump(2) << "\n";
  } else {
    out << verdict << "\nalgorithm: " << algorithm_name(algo) << "\n";
    if (found) out << "matching: " << io::format_matching(inst, *found) << "\n";
    if (blocking) out << "blocking: " << io::format_set(inst, blocking->group) << "\n";
    if (!note.empty()) out << "note: " << note << "\n";
  }
  if (found && !a.witness.empty()) emit(a.witness, io::serialize_matching(inst, *found), out);
  return kOk;
}

inline int do_check(const std::string& instance, const std::string& matching, bool json, const StabilityLimits& lim,
                    std::ostream& out) {
  Instance inst = io::parse_instance(read_file(instance));
  Matching m = io::parse_matching(read_file(matching), inst);
  if (auto chk = validate_matching(inst, m); !chk) throw Error(Errc::ValidationError, "matching: " + chk.detail);
  auto r = find_blocking(inst, m, lim);
  if (json) {
    io::Json doc{{"stable", !r.has_value()}};
    if (r) {
      doc["blocking"] = io::detail::set_json(inst, r->group);
      io::Json ev = io::Json::array();
      for (const auto& e : r->evidence)
        ev.push_back({{"agent", inst.name(e.agent)},
                      {"current", e.current ? io::detail::set_json(inst, *e.current) : io::Json(nullptr)},
                      {"preferred", io::detail::set_json(inst, e.preferred)}});
      doc["evidence"] = ev;
    }
    out << doc.dump(2) << "\n";
  } else if (r) {
    out << "UNSTABLE: blocking " << io::format_set(inst, r->group) << "\n";
  } else {
    out << "STABLE\n";
  }
  return kOk;
}

inline int do_stats(const std::string& instance, std::optional<std::size_t> budget, bool json, std::ostream& out) {
  Instance inst = io::parse_instance(read_file(instance));
  io::Json doc;
  doc["n"] = inst.size();
  doc["d"] = inst.d();
  doc["source"] = source_name(inst);
  doc["complete"] = inst.complete();
  if (const Poset* p = inst.poset()) {
    const std::size_t k = inst.lpo()->kappa;
    doc["kappa"] = k;
    doc["width"] = width(*p);
    doc["locality_bound"] = locality_bound(k, inst.d());
    doc["window_k"] = dp_window(k, inst.d());
  }
  doc["algorithm"] = std::string(algorithm_name(choose_algorithm(inst)));
  int code = kOk;
  if (budget) {
    try {
      auto dd = deletion_distance(inst, *budget);
      doc["lambda"] = dd.lambda;
      io::Json w = io::Json::array();
      for (AgentId a : dd.witness) w.push_back(inst.name(a));
      doc["lambda_witness"] = w;
    } catch (const Error& e) {
      if (!is_guard_error(e.code())) throw;
      doc["lambda"] = nullptr;
      doc["lambda_note"] = e.what();
      code = kGuard;
    }
  }
  if (json) {
    out << doc.dump(2) << "\n";
    return code;
  }
  for (const auto& [key, val] : doc.items()) {
    if (key == "lambda_witness") {
      std::vector<AgentId> ids;
      for (const auto& nm : val) ids.push_back(*inst.find(nm.get<std::string>()));
      out << key << ": " << io::format_set(inst, AgentSet(ids)) << "\n";
    } else if (val.is_string()) {
      out << key << ": " << val.get<std::string>() << "\n";
    } else {
      out << key << ": " << (val.is_null() ? "unknown" : val.dump()) << "\n";
    }
  }
  return code;
}

}  // namespace detail

/// Runs the tool on argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multidimensional stable roommates solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mdsr 1.0");

  detail::SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Search for a stable matching");
  solve->add_option("--input", sa.input, "Instance document")->required();
  solve->add_option("--algo", sa.algo, "auto, brute, strict, dp or greedy")
      ->check(CLI::IsMember({"auto", "brute", "strict", "dp", "greedy"}));
  solve->add_option("--witness", sa.witness, "Write the matching document here");
  solve->add_flag("--json", sa.json, "Machine-readable output");
  solve->add_option("--max-agents", sa.brute.max_agents, "Brute-force agent guard");
  solve->add_option("--max-nodes", sa.brute.max_nodes, "Brute-force search node guard");
  solve->add_option("--max-groups", sa.stability.max_groups, "Stability-check group guard");
  solve->add_option("--window-cap", sa.dp.window_cap, "Most agents per DP window");
  solve->add_option("--max-states", sa.dp.max_states, "DP state budget");
  solve->add_option("--dp-window", sa.dp_window, "Override the DP window length (inexact)");
  solve->add_option("--dp-gap", sa.dp_gap, "Override the DP locality gap (inexact)");

  std::string check_instance, check_matching;
  bool check_json = false;
  StabilityLimits check_limits;
  auto* check = app.add_subcommand("check", "Check a matching for stability");
  check->add_option("--instance", check_instance, "Instance document")->required();
  check->add_option("--matching", check_matching, "Matching document")->required();
  check->add_option("--max-groups", check_limits.max_groups, "Stability-check group guard");
  check->add_flag("--json", check_json, "Machine-readable output");

  std::string stats_instance;
  std::optional<std::size_t> lambda_budget;
  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Report instance parameters");
  stats->add_option("--instance", stats_instance, "Instance document")->required();
  stats->add_option("--lambda-budget", lambda_budget, "Compute the deletion distance up to this budget");
  stats->add_flag("--json", stats_json, "Machine-readable output");

  std::string gen_out, gen_agent = "a";
  std::uint64_t seed = 1;
  std::size_t gen_n = 6, gen_d = 3, gen_swaps = 3, gen_man = 1, gen_woman = 1;
  auto* gen = app.add_subcommand("gen", "Emit generated instances");
  gen->require_subcommand(1);
  bool doc_json = false;
  gen->add_option("--output", gen_out, "Output path (default stdout)");
  gen->add_flag("--json", doc_json, "Accepted for symmetry; instance documents are always JSON");
  gen->fallthrough();
  gen->add_subcommand("instable", "Six agents without a stable matching");
  gen->add_subcommand("cutoff", "Cut-off gadget")->add_option("--agent", gen_agent, "Designated agent name");
  auto* gen_tie = gen->add_subcommand("tie", "Tie gadget");
  gen_tie->add_option("--man", gen_man, "Man index (1-based)");
  gen_tie->add_option("--woman", gen_woman, "First tied woman (1-based)");
  auto* gen_chain = gen->add_subcommand("chain", "Strict master order a1 > a2 > ...");
  gen_chain->add_option("--n", gen_n, "Agents");
  gen_chain->add_option("--d", gen_d, "Group size");
  auto* gen_rand = gen->add_subcommand("random-poset", "Random master poset, canonical tiebreak");
  gen_rand->add_option("--n", gen_n, "Agents");
  gen_rand->add_option("--d", gen_d, "Group size");
  gen_rand->add_option("--swaps", gen_swaps, "Perturbation swaps (more means more incomparability)");
  gen_rand->add_option("--seed", seed, "Random seed");

  std::string red_out, formula_path, assignment_path, extract_path, smti_input, smti_matching;
  bool emit_matching = false;
  auto* reduce = app.add_subcommand("reduce", "Build reduced instances and convert witnesses");
  reduce->require_subcommand(1);
  reduce->add_option("--output", red_out, "Output path (default stdout)");
  reduce->add_flag("--json", doc_json, "Extracted assignments as JSON instead of signed literals");
  reduce->fallthrough();
  auto* red_sat = reduce->add_subcommand("sat", "From 1-in-3 positive 3-occurrence SAT");
  red_sat->add_option("--formula", formula_path, "Formula file")->required();
  red_sat->add_option("--assignment", assignment_path, "Assignment file (signed literals)");
  red_sat->add_flag("--emit-matching", emit_matching, "Emit the matching built from the assignment");
  red_sat->add_option("--extract", extract_path, "Matching document to turn back into an assignment");
  auto* red_smti = reduce->add_subcommand("smti", "From perfect stable marriage with ties and master lists");
  red_smti->add_option("--input", smti_input, "SMTI document")->required();
  red_smti->add_option("--matching", smti_matching, "SMTI matching document");
  red_smti->add_flag("--emit-matching", emit_matching, "Emit the matching built from the SMTI matching");
  red_smti->add_option("--extract", extract_path, "Matching document to turn back into an SMTI matching");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return detail::do_solve(sa, out);
    if (*check) return detail::do_check(check_instance, check_matching, check_json, check_limits, out);
    if (*stats) return detail::do_stats(stats_instance, lambda_budget, stats_json, out);
    if (*gen) {
      const std::string which = gen->get_subcommands().front()->get_name();
      std::optional<Instance> inst;
      if (which == "instable") inst = instable_instance();
      else if (which == "cutoff") inst = cutoff_gadget(gen_agent).instance;
      else if (which == "tie") inst = tie_gadget(gen_man, gen_woman).instance;
      else if (which == "chain") inst = Instance(gen_d, detail::numbered("a", gen_n), MasterPoset{Poset::identity_chain(gen_n), std::nullopt});
      else {
        std::mt19937_64 rng(seed);
        inst = Instance(gen_d, detail::numbered("a", gen_n), MasterPoset{detail::random_poset(rng, gen_n, gen_swaps), std::nullopt});
      }
      detail::emit(gen_out, io::serialize_instance(*inst), out);
      return kOk;
    }
    if (*red_sat) {
      OneInThreeFormula f = io::parse_formula(detail::read_file(formula_path));
      if (!extract_path.empty()) {
        Instance inst = sat_reduce(f);
        Matching m = io::parse_matching(detail::read_file(extract_path), inst);
        const Assignment asg = sat_backward_assignment(f, m);
        std::string text = io::serialize_assignment(asg);
        if (doc_json) {
          io::Json values = io::Json::object();
          for (std::size_t i = 0; i < asg.size(); ++i) values[f.variables[i]] = static_cast<bool>(asg[i]);
          text = io::Json{{"version", io::kVersion}, {"assignment", values}}.dump(2) + "\n";
        }
        detail::emit(red_out, text, out);
      } else if (emit_matching) {
        if (assignment_path.empty()) throw UsageError("--emit-matching needs --assignment");
        Assignment asg = io::parse_assignment(detail::read_file(assignment_path), f.variables.size());
        detail::emit(red_out, io::serialize_matching(sat_reduce(f), sat_forward_matching(f, asg)), out);
      } else {
        detail::emit(red_out, io::serialize_instance(sat_reduce(f)), out);
      }
      return kOk;
    }
    if (*red_smti) {
      SmtiInstance s = io::parse_smti(detail::read_file(smti_input));
      SmtiReduction r = smti_reduce(s);
      if (!extract_path.empty()) {
        Matching m = io::parse_matching(detail::read_file(extract_path), r.instance);
        detail::emit(red_out, io::serialize_smti_matching(s, smti_backward(s, r, m)), out);
      } else if (emit_matching) {
        if (smti_matching.empty()) throw UsageError("--emit-matching needs --matching");
        SmtiMatching pm = io::parse_smti_matching(detail::read_file(smti_matching), s);
        detail::emit(red_out, io::serialize_matching(r.instance, smti_forward(s, r, pm)), out);
      } else {
        detail::emit(red_out, io::serialize_instance(r.instance), out);
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_guard_error(e.code()) ? kGuard : kValidation;
  }
  return kUsage;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace mdsr::cli
