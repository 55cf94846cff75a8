#pragma once

// JSON documents for instances, matchings and SMTI inputs, plus the text
// formats for formulas and assignments.

#include <charconv>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mdsr/core.hpp"
#include "mdsr/reductions.hpp"

namespace mdsr::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1";

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& why) {
  throw Error(Errc::ParseError, where + ": " + why);
}

/// Re-raises core errors as ValidationError naming the violated invariant.
template <class Fn>
auto validated(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == Errc::ParseError || e.code() == Errc::ValidationError || is_guard_error(e.code())) throw;
    throw Error(Errc::ValidationError, e.what());
  }
}

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, "byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where, "missing field \"" + key + "\"");
  return *it;
}

inline std::string as_string(const Json& j, const std::string& where) {
  if (!j.is_string()) parse_fail(where, "expected a string");
  return j.get<std::string>();
}

inline std::size_t as_size(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) parse_fail(where, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline const Json& as_array(const Json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where, "expected an array");
  return j;
}

inline void check_version(const Json& doc) {
  if (as_string(field(doc, "version", "document"), "version") != kVersion)
    parse_fail("version", "unsupported document version");
}

/// Resolves agent names against a name table.
class Names {
 public:
  explicit Names(const std::vector<std::string>& names) {
    for (AgentId a = 0; a < names.size(); ++a) index_.emplace(names[a], a);
  }
  AgentId id(const Json& j, const std::string& where) const {
    std::string name = as_string(j, where);
    auto it = index_.find(name);
    if (it == index_.end()) throw Error(Errc::ValidationError, where + ": unknown agent \"" + name + "\"");
    return it->second;
  }

  AgentSet set(const Json& j, const std::string& where) const {
    std::vector<AgentId> ids;
    for (const auto& e : as_array(j, where)) ids.push_back(id(e, where));
    return validated([&] { return AgentSet(std::move(ids)); });
  }

  std::vector<TupleSet> list(const Json& j, const std::string& where) const {
    std::vector<TupleSet> out;
    std::size_t i = 0;
    for (const auto& e : as_array(j, where)) out.push_back(set(e, where + "[" + std::to_string(i++) + "]"));
    return out;
  }

  /// Object keyed by agent name, one list per agent.
  PreferenceLists per_agent(const Json& j, const std::vector<std::string>& agents, const std::string& where) const {
    if (!j.is_object()) parse_fail(where, "expected an object keyed by agent");
    for (const auto& [k, v] : j.items())
      if (!index_.count(k)) throw Error(Errc::ValidationError, where + ": unknown agent \"" + k + "\"");
    PreferenceLists out(agents.size());
    for (AgentId a = 0; a < agents.size(); ++a) {
      auto it = j.find(agents[a]);
      if (it != j.end()) out[a] = list(*it, where + "." + agents[a]);
    }
    return out;
  }

 private:
  std::unordered_map<std::string, AgentId> index_;
};

inline Json set_json(const Instance& inst, const AgentSet& s) {
  Json arr = Json::array();
  for (AgentId a : s) arr.push_back(inst.name(a));
  return arr;
}

inline Json list_json(const Instance& inst, const std::vector<TupleSet>& list) {
  Json arr = Json::array();
  for (const auto& t : list) arr.push_back(set_json(inst, t));
  return arr;
}

inline Json per_agent_json(const Instance& inst, const PreferenceLists& lists) {
  Json obj = Json::object();
  for (AgentId a = 0; a < inst.size(); ++a) obj[inst.name(a)] = list_json(inst, lists[a]);
  return obj;
}

}  // namespace detail

// ---------------------------------------------------------------- instances

inline Json instance_to_json(const Instance& inst) {
  Json doc;
  doc["version"] = kVersion;
  doc["d"] = inst.d();
  doc["agents"] = inst.names();
  Json src;
  if (auto* ex = std::get_if<ExplicitLists>(&inst.source())) {
    src["type"] = "explicit";
    src["lists"] = detail::per_agent_json(inst, ex->lists);
  } else if (auto* ml = std::get_if<MasterListSets>(&inst.source())) {
    src["type"] = "master_list_sets";
    src["list"] = detail::list_json(inst, ml->list);
  } else {
    const auto& mp = std::get<MasterPoset>(inst.source());
    src["type"] = "master_poset";
    Json pairs = Json::array();
    for (auto [u, v] : mp.poset.source_pairs()) pairs.push_back({inst.name(u), inst.name(v)});
    src["pairs"] = pairs;
    if (mp.completion) {
      src["tiebreak"] = Json{{"explicit", detail::per_agent_json(inst, *mp.completion)}};
    } else {
      src["tiebreak"] = "canonical";
    }
  }
  doc["source"] = src;
  if (inst.acceptability()) doc["acceptability"] = detail::per_agent_json(inst, *inst.acceptability());
  return doc;
}

/// Canonical text: two-space indentation and a trailing newline.
inline std::string serialize_instance(const Instance& inst) { return instance_to_json(inst).dump(2) + "\n"; }

inline Instance instance_from_json(const Json& doc) {
  detail::check_version(doc);
  const std::size_t d = detail::as_size(detail::field(doc, "d", "document"), "d");
  std::vector<std::string> agents;
  for (const auto& a : detail::as_array(detail::field(doc, "agents", "document"), "agents"))
    agents.push_back(detail::as_string(a, "agents"));
  if (std::set<std::string>(agents.begin(), agents.end()).size() != agents.size())
    throw Error(Errc::ValidationError, "agents: duplicate agent name");
  const detail::Names names(agents);

  std::optional<Acceptability> acc;
  if (auto it = doc.find("acceptability"); it != doc.end()) acc = names.per_agent(*it, agents, "acceptability");

  const Json& src = detail::field(doc, "source", "document");
  const std::string type = detail::as_string(detail::field(src, "type", "source"), "source.type");
  PreferenceSource source;
  if (type == "explicit") {
    source = ExplicitLists{names.per_agent(detail::field(src, "lists", "source"), agents, "source.lists")};
  } else if (type == "master_list_sets") {
    source = MasterListSets{names.list(detail::field(src, "list", "source"), "source.list")};
  } else if (type == "master_poset") {
    std::vector<Poset::Pair> pairs;
    for (const auto& p : detail::as_array(detail::field(src, "pairs", "source"), "source.pairs")) {
      if (!p.is_array() || p.size() != 2) detail::parse_fail("source.pairs", "each pair needs two agents");
      pairs.emplace_back(names.id(p[0], "source.pairs"), names.id(p[1], "source.pairs"));
    }
    Poset poset = detail::validated([&] { return Poset::from_pairs(agents.size(), pairs); });
    std::optional<PreferenceLists> completion;
    const Json& tb = detail::field(src, "tiebreak", "source");
    if (tb.is_string()) {
      if (tb.get<std::string>() != "canonical") detail::parse_fail("source.tiebreak", "expected \"canonical\"");
    } else {
      completion = names.per_agent(detail::field(tb, "explicit", "source.tiebreak"), agents, "source.tiebreak.explicit");
    }
    source = MasterPoset{std::move(poset), std::move(completion)};
  } else {
    detail::parse_fail("source.type", "unknown source type \"" + type + "\"");
  }
  return detail::validated([&] { return Instance(d, std::move(agents), std::move(source), std::move(acc)); });
}

inline Instance parse_instance(std::string_view text) { return instance_from_json(detail::parse_json(text)); }

// ---------------------------------------------------------------- matchings

inline Json matching_to_json(const Instance& inst, const Matching& m) {
  Matching sorted = m;
  sorted.canonicalize();
  Json groups = Json::array();
  for (const auto& g : sorted.groups) groups.push_back(detail::set_json(inst, g));
  return Json{{"version", kVersion}, {"groups", groups}};
}

inline std::string serialize_matching(const Instance& inst, const Matching& m) {
  return matching_to_json(inst, m).dump(2) + "\n";
}

inline Matching parse_matching(std::string_view text, const Instance& inst) {
  Json doc = detail::parse_json(text);
  detail::check_version(doc);
  const detail::Names names(inst.names());
  Matching m;
  std::size_t i = 0;
  for (const auto& g : detail::as_array(detail::field(doc, "groups", "document"), "groups"))
    m.groups.push_back(names.set(g, "groups[" + std::to_string(i++) + "]"));
  return m;
}

/// One-line rendering such as {a,b,c} {d,e,f}.
inline std::string format_set(const Instance& inst, const AgentSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + inst.name(s[i]);
  return out + "}";
}

inline std::string format_matching(const Instance& inst, const Matching& m) {
  Matching sorted = m;
  sorted.canonicalize();
  std::string out;
  for (const auto& g : sorted.groups) out += (out.empty() ? "" : " ") + format_set(inst, g);
  return out.empty() ? "{}" : out;
}

// ---------------------------------------------------------------- formulas

/// Text format: `p oit3 <vars> <clauses>`, then one clause per line as three
/// 1-based variable indices with an optional trailing 0; `c` lines are comments.
inline OneInThreeFormula parse_formula(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0, nvars = 0, nclauses = 0;
  bool header = false;
  OneInThreeFormula f;
  auto where = [&] { return "line " + std::to_string(line_no); };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first) || first == "c") continue;
    if (first == "p") {
      std::string kind;
      if (header) detail::parse_fail(where(), "second header");
      if (!(ls >> kind >> nvars >> nclauses) || kind != "oit3") detail::parse_fail(where(), "expected `p oit3 <vars> <clauses>`");
      header = true;
      continue;
    }
    if (!header) detail::parse_fail(where(), "clause before header");
    std::vector<long long> nums;
    std::istringstream cs(line);
    std::string tok;
    while (cs >> tok) {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) detail::parse_fail(where(), "not an integer: " + tok);
      nums.push_back(v);
    }
    if (nums.size() == 4 && nums[3] == 0) nums.pop_back();
    if (nums.size() != 3) detail::parse_fail(where(), "a clause needs exactly three variables");
    std::array<std::size_t, 3> clause{};
    for (std::size_t l = 0; l < 3; ++l) {
      if (nums[l] < 1 || static_cast<std::size_t>(nums[l]) > nvars)
        detail::parse_fail(where(), "variable index out of range (literals are positive)");
      clause[l] = static_cast<std::size_t>(nums[l] - 1);
    }
    f.clauses.push_back(clause);
  }
  if (!header) detail::parse_fail("formula", "missing header");
  if (f.clauses.size() != nclauses) detail::parse_fail("formula", "header announces " + std::to_string(nclauses) + " clauses");
  for (std::size_t i = 0; i < nvars; ++i) f.variables.push_back("x" + std::to_string(i + 1));
  validate_formula(f);
  return f;
}

inline std::string serialize_formula(const OneInThreeFormula& f) {
  std::string out = "p oit3 " + std::to_string(f.variables.size()) + " " + std::to_string(f.clauses.size()) + "\n";
  for (const auto& c : f.clauses)
    out += std::to_string(c[0] + 1) + " " + std::to_string(c[1] + 1) + " " + std::to_string(c[2] + 1) + " 0\n";
  return out;
}

/// Whitespace-separated signed literals; unlisted variables are false and 0 is ignored.
inline Assignment parse_assignment(std::string_view text, std::size_t nvars) {
  std::istringstream in{std::string(text)};
  Assignment asg(nvars, false);
  std::vector<int> seen(nvars, 0);
  std::string tok;
  while (in >> tok) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) detail::parse_fail("assignment", "not a literal: " + tok);
    if (v == 0) continue;
    const auto idx = static_cast<std::size_t>((v < 0 ? -v : v) - 1);
    if (idx >= nvars) detail::parse_fail("assignment", "variable out of range: " + tok);
    const int sign = v > 0 ? 1 : -1;
    if (seen[idx] == -sign) detail::parse_fail("assignment", "contradictory literals for variable " + std::to_string(idx + 1));
    seen[idx] = sign;
    asg[idx] = v > 0;
  }
  return asg;
}

inline std::string serialize_assignment(const Assignment& asg) {
  std::string out;
  for (std::size_t i = 0; i < asg.size(); ++i) out += (asg[i] ? "" : "-") + std::to_string(i + 1) + " ";
  return out + "0\n";
}

// ---------------------------------------------------------------- SMTI

inline SmtiInstance smti_from_json(const Json& doc) {
  detail::check_version(doc);
  SmtiInstance s;
  for (const auto& m : detail::as_array(detail::field(doc, "men", "document"), "men")) s.men.push_back(detail::as_string(m, "men"));
  for (const auto& w : detail::as_array(detail::field(doc, "women", "document"), "women"))
    s.women.push_back(detail::as_string(w, "women"));
  const detail::Names men(s.men), women(s.women);
  s.tied_with_next.assign(s.women.size(), false);
  if (auto it = doc.find("ties"); it != doc.end()) {
    for (const auto& t : detail::as_array(*it, "ties")) {
      if (!t.is_array() || t.size() != 2) detail::parse_fail("ties", "each tie names two women");
      AgentId x = women.id(t[0], "ties"), y = women.id(t[1], "ties");
      if (y != x + 1) throw Error(Errc::MalformedSmti, "tied women must be adjacent in the master list");
      s.tied_with_next[x] = true;
    }
  }
  s.accepts.resize(s.men.size());
  const Json& acc = detail::field(doc, "accepts", "document");
  if (!acc.is_object()) detail::parse_fail("accepts", "expected an object keyed by man");
  for (const auto& [man, list] : acc.items()) {
    AgentId i = men.id(Json(man), "accepts");
    for (const auto& w : detail::as_array(list, "accepts." + man)) s.accepts[i].push_back(women.id(w, "accepts." + man));
    std::sort(s.accepts[i].begin(), s.accepts[i].end());
  }
  validate_smti(s);
  return s;
}

inline SmtiInstance parse_smti(std::string_view text) { return smti_from_json(detail::parse_json(text)); }

inline std::string serialize_smti(const SmtiInstance& s) {
  Json doc;
  doc["version"] = kVersion;
  doc["men"] = s.men;
  doc["women"] = s.women;
  Json ties = Json::array();
  for (std::size_t j = 0; j < s.women.size(); ++j)
    if (s.tied_with_next[j]) ties.push_back({s.women[j], s.women[j + 1]});
  doc["ties"] = ties;
  Json acc = Json::object();
  for (std::size_t i = 0; i < s.men.size(); ++i) {
    Json list = Json::array();
    for (std::size_t j : s.accepts[i]) list.push_back(s.women[j]);
    acc[s.men[i]] = list;
  }
  doc["accepts"] = acc;
  return doc.dump(2) + "\n";
}

inline SmtiMatching parse_smti_matching(std::string_view text, const SmtiInstance& s) {
  Json doc = detail::parse_json(text);
  detail::check_version(doc);
  const detail::Names men(s.men), women(s.women);
  SmtiMatching pm;
  for (const auto& p : detail::as_array(detail::field(doc, "pairs", "document"), "pairs")) {
    if (!p.is_array() || p.size() != 2) detail::parse_fail("pairs", "each pair names a man and a woman");
    pm.emplace_back(men.id(p[0], "pairs"), women.id(p[1], "pairs"));
  }
  return pm;
}

inline std::string serialize_smti_matching(const SmtiInstance& s, SmtiMatching pm) {
  std::sort(pm.begin(), pm.end());
  Json pairs = Json::array();
  for (auto [i, j] : pm) pairs.push_back({s.men[i], s.women[j]});
  return Json{{"version", kVersion}, {"pairs", pairs}}.dump(2) + "\n";
}

}  // namespace mdsr::io
