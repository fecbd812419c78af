#pragma once

// Experiment configuration: a flat `key = value` text format with `#`
// comments. Every value carries its origin (file:line or --flag) so
// validation errors point at the offending line.

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "rmnl/choice.hpp"

namespace rmnl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PolicyKind { kActiveElim, kAdaptive, kUcb, kTs };

inline const char* policy_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::kActiveElim: return "active_elim";
    case PolicyKind::kAdaptive: return "adaptive";
    case PolicyKind::kUcb: return "ucb";
    case PolicyKind::kTs: return "ts";
  }
  return "?";
}

inline std::optional<PolicyKind> parse_policy(std::string_view s) {
  if (s == "active_elim") return PolicyKind::kActiveElim;
  if (s == "adaptive") return PolicyKind::kAdaptive;
  if (s == "ucb") return PolicyKind::kUcb;
  if (s == "ts") return PolicyKind::kTs;
  return std::nullopt;
}

inline const char* adversary_name(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::kNone: return "none";
    case AdversaryKind::kFrontLoaded: return "front_loaded";
    case AdversaryKind::kAdaptiveHook: return "adaptive_hook";
  }
  return "?";
}

struct ExperimentConfig {
  int n = 0;
  int k = 0;
  int t = 0;
  double eps = 0.0;
  std::optional<double> eps_bar;                 // unset: eps_bar = eps
  std::optional<double> explore_scale;           // unset: T_0 ≈ T/64
  std::optional<double> adaptive_explore_scale;  // unset: T_0 ≈ T/64
  std::vector<PolicyKind> policies;
  AdversaryKind adversary = AdversaryKind::kFrontLoaded;
  int trials = 20;
  std::uint64_t seed = 0;
  std::string out = "out";
  bool full_trace = false;
  int checkpoints = 50;
  double ucb_c1 = 1.0;
  double ucb_margin = 0.0;
  double delta = 1e-9;

  double resolved_eps_bar() const { return eps_bar.value_or(eps); }
  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigEntry {
  std::string value;
  std::string origin;
};

using ConfigMap = std::map<std::string, ConfigEntry, std::less<>>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string unquote(std::string v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

inline std::string fmt_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Parse `key = value` lines. Throws ConfigError("source:line: ...") on
// malformed lines or duplicate keys; unknown keys are caught by
// resolve_config.
inline ConfigMap parse_config_text(std::string_view text, std::string_view source) {
  ConfigMap out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    std::string key = detail::trim(std::string_view(body).substr(0, eq));
    std::string value = detail::unquote(detail::trim(std::string_view(body).substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (out.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    out[key] = {std::move(value), where};
  }
  return out;
}

namespace detail {

inline const ConfigEntry* find(const ConfigMap& m, std::string_view key) {
  const auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

inline ConfigError bad(const ConfigEntry& e, std::string_view key, std::string_view what) {
  return ConfigError(e.origin + ": " + std::string(key) + ": " + std::string(what) + " (got '" +
                     e.value + "')");
}

inline long long to_int(const ConfigEntry& e, std::string_view key) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(e.value.c_str(), &end, 10);
  if (e.value.empty() || *end != '\0' || errno) throw bad(e, key, "expected an integer");
  return v;
}

inline double to_double(const ConfigEntry& e, std::string_view key) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(e.value.c_str(), &end);
  if (e.value.empty() || *end != '\0' || errno) throw bad(e, key, "expected a number");
  return v;
}

inline bool to_bool(const ConfigEntry& e, std::string_view key) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw bad(e, key, "expected true or false");
}

}  // namespace detail

inline constexpr std::string_view kConfigKeys[] = {
    "n",         "k",        "t",           "eps",          "eps_bar", "explore_scale",
    "adaptive_explore_scale", "policy",     "adversary",    "trials",  "seed",
    "out",       "full_trace", "checkpoints", "ucb_c1",     "ucb_margin", "delta"};

// Validate a parsed map into a config. Missing required keys, unknown keys,
// type errors and out-of-range values all throw ConfigError naming the key
// and, where it exists, the line.
inline ExperimentConfig resolve_config(const ConfigMap& m) {
  using namespace detail;
  for (const auto& [key, entry] : m) {
    bool known = false;
    for (auto k : kConfigKeys) known = known || k == key;
    if (!known) throw ConfigError(entry.origin + ": unknown key '" + key + "'");
  }
  for (const char* req : {"n", "k", "t", "eps", "policy"})
    if (!find(m, req)) throw ConfigError(std::string("missing required field '") + req + "'");

  ExperimentConfig c;
  auto get_int = [&](std::string_view key, long long lo, long long hi, auto& dst) {
    if (const ConfigEntry* e = find(m, key)) {
      const long long v = to_int(*e, key);
      if (v < lo || v > hi)
        throw bad(*e, key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    }
  };
  auto get_double = [&](std::string_view key, double lo, double hi, bool hi_open) {
    const ConfigEntry* e = find(m, key);
    const double v = to_double(*e, key);
    if (!(v >= lo && (hi_open ? v < hi : v <= hi)))
      throw bad(*e, key, "must lie in [" + fmt_double(lo) + ", " + fmt_double(hi) +
                             (hi_open ? ")" : "]"));
    return v;
  };
  auto get_scale = [&](std::string_view key) -> std::optional<double> {
    const ConfigEntry* e = find(m, key);
    if (!e || e->value == "auto") return std::nullopt;
    const double v = to_double(*e, key);
    if (!(v >= 0.0)) throw bad(*e, key, "must be >= 0 or 'auto'");
    return v;
  };

  get_int("n", 2, 1'000'000, c.n);
  get_int("k", 1, 1'000'000, c.k);
  get_int("t", 1, 1'000'000'000, c.t);
  c.eps = get_double("eps", 0.0, 1.0, true);
  if (find(m, "eps_bar")) c.eps_bar = get_double("eps_bar", 0.0, 1.0, false);
  c.explore_scale = get_scale("explore_scale");
  c.adaptive_explore_scale = get_scale("adaptive_explore_scale");

  {
    const ConfigEntry& e = *find(m, "policy");
    std::string item;
    std::istringstream ss(e.value);
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item == "all") {
        c.policies.insert(c.policies.end(), {PolicyKind::kActiveElim, PolicyKind::kAdaptive,
                                             PolicyKind::kUcb, PolicyKind::kTs});
        continue;
      }
      const auto p = parse_policy(item);
      if (!p) throw bad(e, "policy", "unknown policy '" + item + "'");
      c.policies.push_back(*p);
    }
    if (c.policies.empty()) throw bad(e, "policy", "no policy given");
  }
  if (const ConfigEntry* e = find(m, "adversary")) {
    if (e->value == "none") c.adversary = AdversaryKind::kNone;
    else if (e->value == "front_loaded") c.adversary = AdversaryKind::kFrontLoaded;
    else if (e->value == "adaptive_hook") c.adversary = AdversaryKind::kAdaptiveHook;
    else throw bad(*e, "adversary", "expected none, front_loaded or adaptive_hook");
  }
  get_int("trials", 1, 1'000'000, c.trials);
  if (const ConfigEntry* e = find(m, "seed")) {
    const long long v = to_int(*e, "seed");
    if (v < 0) throw bad(*e, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(v);
  }
  if (const ConfigEntry* e = find(m, "out")) {
    if (e->value.empty()) throw bad(*e, "out", "must not be empty");
    c.out = e->value;
  }
  if (const ConfigEntry* e = find(m, "full_trace")) c.full_trace = to_bool(*e, "full_trace");
  get_int("checkpoints", 1, 1'000'000'000, c.checkpoints);
  if (find(m, "ucb_c1")) c.ucb_c1 = get_double("ucb_c1", 0.0, 1e9, false);
  if (find(m, "ucb_margin")) c.ucb_margin = get_double("ucb_margin", 0.0, 1e9, false);
  if (find(m, "delta")) c.delta = get_double("delta", 1e-15, 1.0, false);
  if (c.delta <= 0.0) throw ConfigError("delta: must be > 0");

  if (c.k >= c.n) throw bad(*find(m, "k"), "k", "must be smaller than n");
  for (PolicyKind p : c.policies)
    if (p == PolicyKind::kAdaptive && c.n > c.t)
      throw bad(*find(m, "t"), "t", "adaptive policy requires t >= n");
  return c;
}

// Canonical text form; resolve_config(parse_config_text(to_config_text(c)))
// == c.
inline std::string to_config_text(const ExperimentConfig& c) {
  using detail::fmt_double;
  std::ostringstream o;
  o << "n = " << c.n << "\n";
  o << "k = " << c.k << "\n";
  o << "t = " << c.t << "\n";
  o << "eps = " << fmt_double(c.eps) << "\n";
  if (c.eps_bar) o << "eps_bar = " << fmt_double(*c.eps_bar) << "\n";
  o << "explore_scale = " << (c.explore_scale ? fmt_double(*c.explore_scale) : "auto") << "\n";
  o << "adaptive_explore_scale = "
    << (c.adaptive_explore_scale ? fmt_double(*c.adaptive_explore_scale) : "auto") << "\n";
  o << "policy = ";
  for (std::size_t i = 0; i < c.policies.size(); ++i)
    o << (i ? "," : "") << policy_name(c.policies[i]);
  o << "\n";
  o << "adversary = " << adversary_name(c.adversary) << "\n";
  o << "trials = " << c.trials << "\n";
  o << "seed = " << c.seed << "\n";
  o << "out = \"" << c.out << "\"\n";
  o << "full_trace = " << (c.full_trace ? "true" : "false") << "\n";
  o << "checkpoints = " << c.checkpoints << "\n";
  o << "ucb_c1 = " << fmt_double(c.ucb_c1) << "\n";
  o << "ucb_margin = " << fmt_double(c.ucb_margin) << "\n";
  o << "delta = " << fmt_double(c.delta) << "\n";
  return o.str();
}

}  // namespace rmnl
