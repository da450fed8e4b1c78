#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "measures.hpp"
#include "spectral.hpp"
#include "stickbreak.hpp"

namespace dcurve {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered key=value entries; keys may repeat (atom rows).
class KeyValues {
 public:
  void add(std::string key, std::string value) { entries_.emplace_back(std::move(key), std::move(value)); }

  /// Later entries override earlier ones.
  void set(const std::string& key, std::string value) {
    std::erase_if(entries_, [&](const auto& e) { return e.first == key; });
    add(key, std::move(value));
  }

  std::optional<std::string> get(const std::string& key) const {
    std::optional<std::string> out;
    for (const auto& [k, v] : entries_)
      if (k == key) out = v;
    return out;
  }

  std::vector<std::string> all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
      if (k == key) out.push_back(v);
    return out;
  }

  bool has(const std::string& key) const { return get(key).has_value(); }

  /// Entries under "prefix." with the prefix stripped.
  KeyValues nested(const std::string& prefix) const {
    KeyValues out;
    const std::string p = prefix + ".";
    for (const auto& [k, v] : entries_)
      if (k.rfind(p, 0) == 0) out.add(k.substr(p.size()), v);
    return out;
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

namespace config {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(what + ": not a finite number: '" + text + "'");
  return v;
}

inline std::uint64_t parse_uint(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(what + ": not a non-negative integer: '" + text + "'");
  return v;
}

/// Comma-separated reals; an empty string gives an empty list.
inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item, what));
  return out;
}

/// A complex number written re:im.
inline std::pair<double, double> parse_complex(const std::string& text, const std::string& what) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(what + ": expected re:im, got '" + text + "'");
  return {parse_double(text.substr(0, colon), what), parse_double(text.substr(colon + 1), what)};
}

/// Reads key=value lines; '#' starts a comment.
inline KeyValues parse(std::istream& in) {
  KeyValues kv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    kv.add(key, trim(t.substr(eq + 1)));
  }
  return kv;
}

inline double number(const KeyValues& kv, const std::string& key, double fallback) {
  const auto v = kv.get(key);
  return v ? parse_double(*v, key) : fallback;
}

inline std::vector<double> list(const KeyValues& kv, const std::string& key, std::vector<double> fallback) {
  const auto v = kv.get(key);
  return v ? parse_list(*v, key) : fallback;
}

/// Builds a measure from keys:
///   measure = bernoulli | atoms | beta | uniform01 | betaprime | cauchy | circle | cauchy_rd | product
///   p, a, b, location, scale        family parameters
///   atom = x1,...,xd,weight         repeated, for atoms
///   spectrum = trefoil | uniform | atoms,  dimension, spectral_atom = s1,...,sd,mass,  shift = a1,...,ad
///   radial.*, direction.*           nested measures for product
inline GoverningMeasure measure_from(const KeyValues& kv) {
  const auto kind = kv.get("measure");
  if (!kind) throw ConfigError("missing key 'measure'");
  const std::string& m = *kind;
  if (m == "bernoulli") return GoverningMeasure::bernoulli(number(kv, "p", 0.5));
  if (m == "uniform01") return GoverningMeasure::uniform01();
  if (m == "beta") return GoverningMeasure::beta(number(kv, "a", 0.5), number(kv, "b", 0.5));
  if (m == "betaprime") return GoverningMeasure::beta_prime(number(kv, "a", 0.5), number(kv, "b", 0.5));
  if (m == "cauchy") return GoverningMeasure::cauchy(number(kv, "location", 0.0), number(kv, "scale", 1.0));
  if (m == "circle") return GoverningMeasure::uniform_circle();
  if (m == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& row : kv.all("atom")) {
      std::vector<double> v = parse_list(row, "atom");
      if (v.size() < 2) throw ConfigError("atom: need x1,...,xd,weight");
      const double w = v.back();
      v.pop_back();
      atoms.push_back({std::move(v), w});
    }
    if (atoms.empty()) throw ConfigError("measure=atoms needs at least one atom row");
    return GoverningMeasure::atoms(std::move(atoms));
  }
  if (m == "cauchy_rd") {
    const std::string spectrum = kv.get("spectrum").value_or("trefoil");
    if (spectrum == "trefoil") return GoverningMeasure::cauchy_rd(SpectralCauchy::trefoil());
    if (spectrum == "uniform") {
      const auto d = static_cast<std::size_t>(number(kv, "dimension", 2.0));
      return GoverningMeasure::cauchy_rd(SpectralCauchy::uniform_discretized(d));
    }
    if (spectrum == "atoms") {
      std::vector<SpectralAtom> atoms;
      for (const auto& row : kv.all("spectral_atom")) {
        std::vector<double> v = parse_list(row, "spectral_atom");
        if (v.size() < 2) throw ConfigError("spectral_atom: need s1,...,sd,mass");
        const double mass = v.back();
        v.pop_back();
        atoms.push_back({std::move(v), mass});
      }
      if (atoms.empty()) throw ConfigError("spectrum=atoms needs spectral_atom rows");
      Point shift = kv.has("shift") ? parse_list(*kv.get("shift"), "shift") : Point(atoms.front().direction.size(), 0.0);
      return GoverningMeasure::cauchy_rd(SpectralCauchy(std::move(shift), std::move(atoms)));
    }
    throw ConfigError("unknown spectrum '" + spectrum + "'");
  }
  if (m == "product") return GoverningMeasure::scaled_product(measure_from(kv.nested("radial")), measure_from(kv.nested("direction")));
  throw ConfigError("unknown measure '" + m + "'");
}

/// truncation = tail:EPS | fixed:N ; tail_handling = absorb | renormalize.
inline TruncationPolicy policy_from(const KeyValues& kv) {
  const auto handling = kv.get("tail_handling").value_or("absorb");
  TruncationPolicy::Tail tail;
  if (handling == "absorb") tail = TruncationPolicy::Tail::absorb_into_fresh_atom;
  else if (handling == "renormalize") tail = TruncationPolicy::Tail::drop_renormalize;
  else throw ConfigError("tail_handling must be absorb or renormalize");
  const std::string spec = kv.get("truncation").value_or("tail:1e-12");
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("truncation must be tail:EPS or fixed:N");
  const std::string mode = spec.substr(0, colon), value = spec.substr(colon + 1);
  try {
    if (mode == "tail") return TruncationPolicy::tail_below(parse_double(value, "truncation"), tail);
    if (mode == "fixed") return TruncationPolicy::fixed(parse_uint(value, "truncation"), tail);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("truncation must be tail:EPS or fixed:N");
}

}  // namespace config

/// Everything an experiment run needs. `keys` keeps experiment-specific
/// settings (thresholds, frequencies, nested measures).
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::size_t n = 100000;
  std::vector<double> t_grid;
  std::string out;
  double confidence = 0.999;
  TruncationPolicy policy;
  KeyValues keys;
};

/// Resolves the merged key set (file entries first, then overrides) into a
/// validated config. `seed` is mandatory and the t grid must be non-empty.
inline ExperimentConfig resolve_config(const std::string& experiment, const KeyValues& keys,
                                       const std::vector<double>& default_t_grid) {
  ExperimentConfig c;
  c.experiment = experiment;
  c.keys = keys;
  const auto seed = keys.get("seed");
  if (!seed) throw ConfigError("a seed is required (--seed or seed=)");
  c.seed = config::parse_uint(*seed, "seed");
  if (const auto n = keys.get("n")) {
    c.n = static_cast<std::size_t>(config::parse_uint(*n, "n"));
    if (c.n < 10) throw ConfigError("n must be >= 10");
  }
  c.t_grid = keys.has("t") ? config::parse_list(*keys.get("t"), "t") : default_t_grid;
  if (c.t_grid.empty()) throw ConfigError("the t grid is empty");
  for (double t : c.t_grid)
    if (!(t > 0.0)) throw ConfigError("every t must be > 0");
  c.out = keys.get("out").value_or(experiment + ".csv");
  c.confidence = config::number(keys, "confidence", 0.999);
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) throw ConfigError("confidence must lie in (0,1)");
  c.policy = config::policy_from(keys);
  return c;
}

}  // namespace dcurve
