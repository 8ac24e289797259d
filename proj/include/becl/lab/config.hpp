#pragma once

// Experiment configuration: one INI-style file with an [experiment] section
// (kind, out, seed, emit_plots, threads) and one section per experiment kind.
//
// Precedence, lowest to highest:
//   built-in defaults < config file < BECL_<SECTION>_<KEY> environment < CLI flags.
//
// Values are stored in canonical text (reals at 17 significant digits), so a
// config serializes and re-parses bit-exactly.

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace becl::lab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ParamType { integer, real, real_list, boolean, text };

struct ParamSpec {
  std::string key;
  ParamType type;
  std::string fallback;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
  std::vector<std::string> choices = {};
};

/// Shortest text that parses back to the same double.
inline std::string format_real(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field, "expected a finite real number, got '" + text + "'");
  }
  return v;
}

inline long long parse_integer(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) throw ConfigError(field, "expected an integer, got '" + text + "'");
  return v;
}

inline bool parse_bool(const std::string& field, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

inline std::vector<double> parse_real_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(field, item));
  if (out.empty()) throw ConfigError(field, "expected a comma-separated list of reals");
  return out;
}

enum class Kind { nls2d, dimred3d, manybody, scaling_table, sobolev_sharpness, mollifier_rate, hierarchy_residual };

inline const std::vector<std::pair<Kind, std::string>>& kind_names() {
  static const std::vector<std::pair<Kind, std::string>> names = {
      {Kind::nls2d, "nls2d"},
      {Kind::dimred3d, "dimred3d"},
      {Kind::manybody, "manybody"},
      {Kind::scaling_table, "scaling-table"},
      {Kind::sobolev_sharpness, "sobolev-sharpness"},
      {Kind::mollifier_rate, "mollifier-rate"},
      {Kind::hierarchy_residual, "hierarchy-residual"},
  };
  return names;
}

inline std::string kind_name(Kind k) {
  for (const auto& [kk, name] : kind_names())
    if (kk == k) return name;
  return "unknown";
}

inline Kind parse_kind(const std::string& text) {
  for (const auto& [kk, name] : kind_names())
    if (name == trim(text)) return kk;
  std::string all;
  for (const auto& [kk, name] : kind_names()) all += (all.empty() ? "" : ", ") + name;
  throw ConfigError("experiment.kind", "unknown kind '" + text + "' (expected one of " + all + ")");
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTwoPi = 6.283185307179586;

/// Section name and parameter table for each kind.
inline std::vector<ParamSpec> param_specs(Kind k) {
  using T = ParamType;
  switch (k) {
    case Kind::nls2d:
      return {
          {"n", T::integer, "64", 4, 4096},
          {"L", T::real, "8", 0, kInf, true},
          {"dt", T::real, "0.001", 0, kInf, true},
          {"t_final", T::real, "1", 0, kInf},
          {"coupling", T::real, format_real(kTwoPi), 0, kInf},
          {"width", T::real, "1", 0, kInf, true},
          {"momentum_x", T::real, "0"},
          {"momentum_y", T::real, "0"},
          {"sample_every", T::integer, "100", 1, kInf},
      };
    case Kind::dimred3d:
      return {
          {"omegas", T::real_list, "4,16,64", 1, kInf},
          {"t_final", T::real, "0.5", 0, kInf},
          {"coupling", T::real, format_real(kTwoPi), 0, kInf},
          {"width", T::real, "1", 0, kInf, true},
          {"n", T::integer, "64", 4, 1024},
          {"L", T::real, "8", 0, kInf, true},
          {"modes", T::integer, "16", 1, 64},
          {"dt_max", T::real, "0.001", 0, kInf, true},
          {"omega_dt", T::real, "0.02", 0, kInf, true},
      };
    case Kind::manybody:
      return {
          {"particles", T::integer, "2", 1, 3},
          {"n", T::integer, "8", 2, 64},
          {"L", T::real, "4", 0, kInf, true},
          {"modes", T::integer, "4", 1, 16},
          {"omega", T::real, "4", 1, kInf},
          {"beta", T::real, "0.2", 0, 0.4, true, true},
          {"g", T::real, "1", 0, kInf},
          {"sigma", T::real, "1", 0, kInf, true},
          {"width", T::real, "1", 0, kInf, true},
          {"kappa", T::real, "1", 0, kInf},
          {"dt", T::real, "0.001", 0, kInf, true},
          {"t_final", T::real, "0.25", 0, kInf},
          {"sample_every", T::integer, "50", 1, kInf},
          {"memory_mb", T::integer, "1024", 1, kInf},
          {"snapshot", T::boolean, "true"},
      };
    case Kind::scaling_table:
      return {
          {"count", T::integer, "1000", 1, 10000000},
          {"eps", T::real, "0.1", 0, kInf, true},
          {"particles", T::real, "0", 0, kInf},
          {"omega", T::real, "1", 1, kInf},
      };
    case Kind::sobolev_sharpness:
      return {
          {"omegas", T::real_list, "100,1000,10000", 0, kInf, true},
          {"nx", T::integer, "32", 4, 512},
          {"ny", T::integer, "32", 4, 512},
          {"half_x", T::real, "8", 0, kInf, true},
          {"half_y", T::real, "8", 0, kInf, true},
      };
    case Kind::mollifier_rate:
      return {
          {"kappa", T::real, "0.4", 0, 0.5, true, true},
          {"alphas", T::real_list, "1,0.5,0.25", 0, kInf, true},
          {"n", T::integer, "48", 4, 256},
          {"L", T::real, "6", 0, kInf, true},
      };
    case Kind::hierarchy_residual:
      return {
          {"variant", T::text, "gp2d", -kInf, kInf, false, false, {"gp2d", "bbgky"}},
          {"k", T::integer, "1", 1, 3},
          {"t", T::real, "0.2", 0, kInf, true},
          {"dt", T::real, "0.002", 0, kInf, true},
          {"n", T::integer, "64", 4, 1024},
          {"L", T::real, "8", 0, kInf, true},
          {"coupling", T::real, format_real(kTwoPi), 0, kInf},
          {"particles", T::integer, "2", 1, 3},
          {"modes", T::integer, "2", 1, 16},
          {"omega", T::real, "4", 1, kInf},
          {"beta", T::real, "0.2", 0, 0.4, true, true},
          {"observables", T::integer, "6", 1, 64},
          {"levels", T::integer, "2", 1, 4},
      };
  }
  return {};
}

inline std::vector<ParamSpec> experiment_specs() {
  using T = ParamType;
  return {
      {"out", T::text, ""},
      {"seed", T::integer, "1", 0, kInf},
      {"emit_plots", T::boolean, "false"},
      {"threads", T::integer, "1", 1, 256},
  };
}

/// Validate one value and return its canonical text.
inline std::string canonicalize(const std::string& field, const ParamSpec& spec, const std::string& raw) {
  auto range = [&](double v) {
    const bool lo_bad = spec.lo_open ? !(v > spec.lo) : !(v >= spec.lo);
    const bool hi_bad = spec.hi_open ? !(v < spec.hi) : !(v <= spec.hi);
    if (lo_bad || hi_bad) {
      std::ostringstream os;
      os.precision(12);
      os << "value " << v << " outside " << (spec.lo_open ? "(" : "[") << spec.lo << ", " << spec.hi
         << (spec.hi_open ? ")" : "]");
      throw ConfigError(field, os.str());
    }
  };
  switch (spec.type) {
    case ParamType::integer: {
      const long long v = parse_integer(field, raw);
      range(static_cast<double>(v));
      return std::to_string(v);
    }
    case ParamType::real: {
      const double v = parse_real(field, raw);
      range(v);
      return format_real(v);
    }
    case ParamType::real_list: {
      std::string out;
      for (double v : parse_real_list(field, raw)) {
        range(v);
        out += (out.empty() ? "" : ",") + format_real(v);
      }
      return out;
    }
    case ParamType::boolean:
      return parse_bool(field, raw) ? "true" : "false";
    case ParamType::text: {
      const std::string t = trim(raw);
      if (!spec.choices.empty() && std::find(spec.choices.begin(), spec.choices.end(), t) == spec.choices.end()) {
        throw ConfigError(field, "unexpected value '" + t + "'");
      }
      return t;
    }
  }
  return raw;
}

struct ExperimentConfig {
  Kind kind = Kind::scaling_table;
  std::map<std::string, std::string> experiment;  // out, seed, emit_plots, threads
  std::map<std::string, std::string> params;      // the kind's own section
  std::map<std::string, std::string> sweep;       // "section.key" -> list of values (raw)

  std::string section() const { return kind_name(kind); }

  static ExperimentConfig defaults(Kind k) {
    ExperimentConfig c;
    c.kind = k;
    for (const auto& s : experiment_specs()) c.experiment[s.key] = s.fallback;
    c.experiment["out"] = "runs/" + kind_name(k);
    for (const auto& s : param_specs(k)) c.params[s.key] = s.fallback;
    for (const auto& s : experiment_specs()) c.set("experiment." + s.key, c.experiment[s.key]);
    for (const auto& s : param_specs(k)) c.set(c.section() + "." + s.key, s.fallback);
    return c;
  }

  /// Set "experiment.key" or "<kind>.key" (or a bare key of the kind's section).
  void set(const std::string& dotted, const std::string& value) {
    const auto dot = dotted.find('.');
    const std::string sec = dot == std::string::npos ? section() : dotted.substr(0, dot);
    const std::string key = dot == std::string::npos ? dotted : dotted.substr(dot + 1);
    if (sec == "experiment") {
      if (key == "kind") throw ConfigError("experiment.kind", "kind cannot be overridden after parsing");
      for (const auto& s : experiment_specs()) {
        if (s.key == key) {
          experiment[key] = canonicalize("experiment." + key, s, value);
          return;
        }
      }
      throw ConfigError("experiment." + key, "unknown key");
    }
    if (sec != section()) throw ConfigError(dotted, "section does not match experiment kind '" + section() + "'");
    for (const auto& s : param_specs(kind)) {
      if (s.key == key) {
        params[key] = canonicalize(sec + "." + key, s, value);
        return;
      }
    }
    throw ConfigError(dotted, "unknown key");
  }

  // Typed access.
  std::string text(const std::string& key) const { return lookup(key); }
  double real(const std::string& key) const { return parse_real(section() + "." + key, lookup(key)); }
  long long integer(const std::string& key) const { return parse_integer(section() + "." + key, lookup(key)); }
  bool flag(const std::string& key) const { return parse_bool(section() + "." + key, lookup(key)); }
  std::vector<double> reals(const std::string& key) const { return parse_real_list(section() + "." + key, lookup(key)); }

  std::string out_dir() const { return experiment.at("out"); }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(parse_integer("experiment.seed", experiment.at("seed"))); }
  bool emit_plots() const { return parse_bool("experiment.emit_plots", experiment.at("emit_plots")); }
  int threads() const { return static_cast<int>(parse_integer("experiment.threads", experiment.at("threads"))); }

  /// Cross-field checks that the per-key ranges cannot express.
  void validate() const {
    for (const auto& s : experiment_specs()) canonicalize("experiment." + s.key, s, experiment.at(s.key));
    for (const auto& s : param_specs(kind)) canonicalize(section() + "." + s.key, s, lookup(s.key));
    if (out_dir().empty()) throw ConfigError("experiment.out", "output directory must not be empty");
    auto even = [&](const char* key) {
      if (params.count(key) && integer(key) % 2 != 0) throw ConfigError(section() + "." + key, "grid size must be even");
    };
    switch (kind) {
      case Kind::nls2d:
      case Kind::dimred3d:
      case Kind::manybody:
      case Kind::mollifier_rate:
      case Kind::hierarchy_residual:
        even("n");
        break;
      case Kind::sobolev_sharpness:
        even("nx");
        even("ny");
        break;
      default:
        break;
    }
    if (kind == Kind::dimred3d || kind == Kind::sobolev_sharpness) {
      const auto w = reals("omegas");
      for (std::size_t i = 1; i < w.size(); ++i)
        if (!(w[i] > w[i - 1])) throw ConfigError(section() + ".omegas", "list must be strictly increasing");
      if (kind == Kind::sobolev_sharpness && w.size() < 2) throw ConfigError(section() + ".omegas", "need >= 2 values");
    }
    if (kind == Kind::manybody && real("kappa") / (2.0 * real("omega")) > 1.0) {
      throw ConfigError("manybody.kappa", "excited fraction kappa/(2 omega) must not exceed 1");
    }
    if (kind == Kind::hierarchy_residual) {
      if (text("variant") == "bbgky" && integer("k") > integer("particles")) {
        throw ConfigError("hierarchy-residual.k", "k must not exceed the particle count");
      }
      const double ratio = real("t") / real("dt");
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
        throw ConfigError("hierarchy-residual.t", "t must be a positive integer multiple of dt");
      }
    }
    if (kind == Kind::manybody || (kind == Kind::hierarchy_residual && text("variant") == "bbgky")) {
      // Finest grid of the run, one state copy.
      const double n = static_cast<double>(integer("n")) *
                       (kind == Kind::hierarchy_residual ? std::pow(2.0, static_cast<double>(integer("levels") - 1)) : 1.0);
      const double bytes = 16.0 * std::pow(n * n * static_cast<double>(integer("modes")), static_cast<double>(integer("particles")));
      const double budget = kind == Kind::manybody ? static_cast<double>(integer("memory_mb")) * 1048576.0 : 1073741824.0;
      if (bytes > budget) {
        std::ostringstream os;
        os << "resource budget refused: the state needs " << bytes / 1048576.0 << " MiB, budget is " << budget / 1048576.0
           << " MiB (reduce n, modes or particles)";
        throw ConfigError(section() + ".n", os.str());
      }
    }
    for (const auto& [field, values] : sweep) {
      ExperimentConfig probe = *this;
      probe.sweep.clear();
      std::stringstream ss(values);
      std::string item;
      while (std::getline(ss, item, ',')) probe.set(field, item);
    }
  }

  std::string to_ini() const {
    std::ostringstream os;
    os << "[experiment]\n";
    os << "kind = " << section() << "\n";
    for (const auto& [k, v] : experiment) os << k << " = " << v << "\n";
    os << "\n[" << section() << "]\n";
    for (const auto& [k, v] : params) os << k << " = " << v << "\n";
    if (!sweep.empty()) {
      os << "\n[sweep]\n";
      for (const auto& [k, v] : sweep) os << k << " = " << v << "\n";
    }
    return os.str();
  }

  static ExperimentConfig from_ini(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream is(text);
    try {
      boost::property_tree::ini_parser::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw ConfigError("file", std::string("malformed config: ") + e.message() + " (line " +
                                    std::to_string(e.line()) + ")");
    }
    const auto kind_text = tree.get_optional<std::string>("experiment.kind");
    if (!kind_text) throw ConfigError("experiment.kind", "missing");
    ExperimentConfig c = defaults(parse_kind(*kind_text));
    for (const auto& [sec, node] : tree) {
      if (sec == "sweep") {
        for (const auto& [k, v] : node) c.sweep[k] = trim(v.data());
        continue;
      }
      if (sec != "experiment" && sec != c.section()) throw ConfigError(sec, "unexpected section for kind '" + c.section() + "'");
      for (const auto& [k, v] : node) {
        if (sec == "experiment" && k == "kind") continue;
        c.set(sec + "." + k, v.data());
      }
    }
    return c;
  }

  /// Apply BECL_<SECTION>_<KEY> variables ('-' in section names becomes '_').
  void apply_environment() {
    auto env_name = [](std::string sec, std::string key) {
      std::string s = "BECL_" + sec + "_" + key;
      for (auto& ch : s) ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      return s;
    };
    for (const auto& s : experiment_specs())
      if (const char* v = std::getenv(env_name("experiment", s.key).c_str())) set("experiment." + s.key, v);
    for (const auto& s : param_specs(kind))
      if (const char* v = std::getenv(env_name(section(), s.key).c_str())) set(section() + "." + s.key, v);
  }

 private:
  const std::string& lookup(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) throw ConfigError(section() + "." + key, "unknown key");
    return it->second;
  }
};

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.kind == b.kind && a.experiment == b.experiment && a.params == b.params && a.sweep == b.sweep;
}

}  // namespace becl::lab
