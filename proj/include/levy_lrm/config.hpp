#pragma once

// Flat key = value run configuration for the command-line tool.
//
//   # comment
//   model.kind = merton
//   model.sigma = 0.2
//   query.t = 0:0.05:0.95
//   query.strike = 1, 2, 4

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "levy_lrm/errors.hpp"
#include "levy_lrm/fft.hpp"
#include "levy_lrm/levy_core.hpp"

namespace levy_lrm::cli {

/// Malformed text, unknown key, missing key or an unparseable value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class ModelKind { merton, vg, vg_cgm };
enum class ModeChoice { automatic, fft_grid, direct_sum };

inline const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::merton: return "merton";
    case ModelKind::vg: return "vg";
    case ModelKind::vg_cgm: return "vg-cgm";
  }
  return "?";
}

/// Raw model numbers; turned into MertonParams / VgParams by `build_model`.
struct ModelSpec {
  ModelKind kind = ModelKind::merton;
  std::map<std::string, double> values;  ///< keyed without the "model." prefix

  double get(const std::string& name) const { return values.at(name); }
};

struct RunConfig {
  ModelSpec model;
  fft::FftConfig fft;
  bool enforce_tail = true;  ///< refuse cells whose truncation bound exceeds N*eta
  double maturity = 1.0;
  std::vector<double> t_grid{0.0};
  std::vector<double> strikes;  ///< empty when not given
  double spot = 1.0;
  std::string output_path = "-";
  ModeChoice mode = ModeChoice::automatic;
  std::vector<double> jump_sizes;
};

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Snaps range points like 0.05 * 19 back to the nearest short decimal (0.95).
inline double round_decimal(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  double y = x;
  std::from_chars(buf, res.ptr, y);
  return y;
}

inline const std::map<ModelKind, std::vector<std::string>>& model_keys() {
  static const std::map<ModelKind, std::vector<std::string>> keys{
      {ModelKind::merton, {"mu", "sigma", "gamma", "m", "delta"}},
      {ModelKind::vg, {"kappa", "m", "delta"}},
      {ModelKind::vg_cgm, {"C", "G", "M"}},
  };
  return keys;
}

inline const std::set<std::string>& plain_keys() {
  static const std::set<std::string> keys{
      "model.kind",  "fft.n",       "fft.eta",      "fft.alpha",  "fft.eps",
      "fft.rule",    "fft.enforce_tail", "query.T",  "query.t",    "query.strike",
      "query.spot",  "output.path", "output.mode",  "impact.y"};
  return keys;
}

}  // namespace detail

/// Parses "key = value" lines; '#' starts a comment. Duplicate keys are errors.
inline KeyValues parse_key_values(std::istream& in, const std::string& source = "config") {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key(detail::trim(view.substr(0, eq)));
    const std::string value(detail::trim(view.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": duplicate key " + key);
  }
  return kv;
}

/// "key=value" from the command line; replaces any file value.
inline void apply_override(KeyValues& kv, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override must look like key=value: " + std::string(assignment));
  }
  const std::string key(detail::trim(assignment.substr(0, eq)));
  if (key.empty()) throw ConfigError("override has an empty key");
  kv[key] = std::string(detail::trim(assignment.substr(eq + 1)));
}

inline double parse_real(std::string_view text, const std::string& key) {
  text = detail::trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(key + ": not a finite number: '" + std::string(text) + "'");
  }
  return value;
}

inline std::size_t parse_count(std::string_view text, const std::string& key) {
  text = detail::trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": not a nonnegative integer: '" + std::string(text) + "'");
  }
  return value;
}

/// A single value, a comma list "a, b, c", or an inclusive range "start:step:stop".
inline std::vector<double> parse_grid(std::string_view text, const std::string& key) {
  text = detail::trim(text);
  if (text.empty()) throw ConfigError(key + ": empty value");
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
      const auto colon = text.find(':', start);
      parts.push_back(parse_real(text.substr(start, colon - start), key));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    if (parts.size() != 3) throw ConfigError(key + ": range must be start:step:stop");
    const double first = parts[0], step = parts[1], last = parts[2];
    if (!(step > 0.0)) throw ConfigError(key + ": range step must be positive");
    if (last < first) throw ConfigError(key + ": range stop is below start");
    const double span = (last - first) / step;
    if (span > 1e6) throw ConfigError(key + ": range has too many points");
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(detail::round_decimal(first + step * static_cast<double>(i)));
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma - start), key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// Schema check and conversion. Numeric domain problems in the query block
/// (t outside [0, T), nonpositive strikes, ...) are reported here too.
inline RunConfig load_config(const KeyValues& kv) {
  RunConfig cfg;
  const auto kind_it = kv.find("model.kind");
  if (kind_it == kv.end()) throw ConfigError("missing key model.kind");
  if (kind_it->second == "merton") {
    cfg.model.kind = ModelKind::merton;
  } else if (kind_it->second == "vg") {
    cfg.model.kind = ModelKind::vg;
  } else if (kind_it->second == "vg-cgm") {
    cfg.model.kind = ModelKind::vg_cgm;
  } else {
    throw ConfigError("model.kind must be merton, vg or vg-cgm, got '" + kind_it->second + "'");
  }

  const auto& wanted = detail::model_keys().at(cfg.model.kind);
  for (const auto& [key, value] : kv) {
    if (detail::plain_keys().count(key)) continue;
    if (key.rfind("model.", 0) == 0) {
      const std::string name = key.substr(6);
      if (std::find(wanted.begin(), wanted.end(), name) == wanted.end()) {
        throw ConfigError(key + " is not a parameter of model kind " +
                          to_string(cfg.model.kind));
      }
      cfg.model.values[name] = parse_real(value, key);
      continue;
    }
    throw ConfigError("unknown key " + key);
  }
  for (const auto& name : wanted) {
    if (!cfg.model.values.count(name)) throw ConfigError("missing key model." + name);
  }

  const auto get = [&](const char* key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };

  if (auto v = get("fft.n")) cfg.fft.n = parse_count(*v, "fft.n");
  if (auto v = get("fft.eta")) cfg.fft.eta = parse_real(*v, "fft.eta");
  if (auto v = get("fft.alpha")) cfg.fft.alpha = parse_real(*v, "fft.alpha");
  if (auto v = get("fft.eps")) cfg.fft.eps = parse_real(*v, "fft.eps");
  if (auto v = get("fft.rule")) {
    if (*v == "simpson") {
      cfg.fft.rule = fft::QuadratureRule::simpson;
    } else if (*v == "trapezoid") {
      cfg.fft.rule = fft::QuadratureRule::trapezoid;
    } else {
      throw ConfigError("fft.rule must be simpson or trapezoid");
    }
  }
  if (auto v = get("fft.enforce_tail")) {
    if (*v == "true") {
      cfg.enforce_tail = true;
    } else if (*v == "false") {
      cfg.enforce_tail = false;
    } else {
      throw ConfigError("fft.enforce_tail must be true or false");
    }
  }
  try {
    cfg.fft.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  if (auto v = get("query.T")) cfg.maturity = parse_real(*v, "query.T");
  if (auto v = get("query.t")) cfg.t_grid = parse_grid(*v, "query.t");
  if (auto v = get("query.strike")) cfg.strikes = parse_grid(*v, "query.strike");
  if (auto v = get("query.spot")) cfg.spot = parse_real(*v, "query.spot");
  for (double t : cfg.t_grid) {
    for (double K : cfg.strikes.empty() ? std::vector<double>{cfg.spot} : cfg.strikes) {
      try {
        MarketQuery{t, cfg.maturity, cfg.spot, K}.validate();
      } catch (const Error& e) {
        throw ConfigError(std::string("query: ") + e.what());
      }
    }
  }

  if (auto v = get("output.path")) cfg.output_path = *v;
  if (auto v = get("output.mode")) {
    if (*v == "auto") {
      cfg.mode = ModeChoice::automatic;
    } else if (*v == "fft-grid") {
      cfg.mode = ModeChoice::fft_grid;
    } else if (*v == "direct-sum") {
      cfg.mode = ModeChoice::direct_sum;
    } else {
      throw ConfigError("output.mode must be auto, fft-grid or direct-sum");
    }
  }
  if (auto v = get("impact.y")) {
    if (!detail::trim(*v).empty()) cfg.jump_sizes = parse_grid(*v, "impact.y");
  }
  return cfg;
}

inline RunConfig load_config(std::istream& in, const std::vector<std::string>& overrides = {},
                             const std::string& source = "config") {
  auto kv = parse_key_values(in, source);
  for (const auto& o : overrides) apply_override(kv, o);
  return load_config(kv);
}

using AnyModel = std::variant<MertonParams, VgParams>;

/// May throw InvalidParameter / DomainError for out-of-domain numbers.
inline AnyModel build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::merton:
      return MertonParams{spec.get("mu"), spec.get("sigma"), spec.get("gamma"), spec.get("m"),
                          spec.get("delta")};
    case ModelKind::vg:
      return VgParams::from_kmd(spec.get("kappa"), spec.get("m"), spec.get("delta"));
    case ModelKind::vg_cgm:
      return VgParams::from_cgm(spec.get("C"), spec.get("G"), spec.get("M"));
  }
  throw ConfigError("unknown model kind");
}

}  // namespace levy_lrm::cli
