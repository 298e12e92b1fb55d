#pragma once

// Command-line front end: `validate`, `curve` and `impact` subcommands.
// Exit codes: 0 success, 1 validation or tail failure, 2 usage/parse error.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "levy_lrm/config.hpp"
#include "levy_lrm/errors.hpp"
#include "levy_lrm/lrm.hpp"

namespace levy_lrm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Shortest-safe round-trip text: 17 significant digits, '.' separator, no locale.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

/// min(jobs, LRM_WORKERS or the logical core count), at least 1.
inline std::size_t worker_count(std::size_t jobs) {
  std::size_t cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LRM_WORKERS")) {
    std::size_t parsed = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), parsed);
    if (ec == std::errc() && ptr == text.data() + text.size() && parsed > 0) cap = parsed;
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

/// Runs body(i) for i < jobs on up to `workers` threads; the first exception
/// (by index) is rethrown after all threads join.
template <class Body>
void parallel_for(std::size_t jobs, std::size_t workers, Body body) {
  std::vector<std::exception_ptr> errors(jobs);
  std::atomic<std::size_t> next{0};
  const auto drain = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline EvalMode resolve_mode(ModeChoice choice, std::size_t strike_count) {
  switch (choice) {
    case ModeChoice::fft_grid: return EvalMode::fft_grid;
    case ModeChoice::direct_sum: return EvalMode::direct_sum;
    case ModeChoice::automatic: break;
  }
  return strike_count <= 4 ? EvalMode::direct_sum : EvalMode::fft_grid;
}

inline std::vector<double> strikes_or_spot(const RunConfig& cfg) {
  return cfg.strikes.empty() ? std::vector<double>{cfg.spot} : cfg.strikes;
}

struct CurveCell {
  double t = 0.0;
  double tau = 0.0;
  double strike = 0.0;
  LrmResult result;
};

/// Every (t, K) cell of the configured grid, ordered by t then K. Unless
/// cfg.enforce_tail is off, throws TailConditionError naming the first
/// uncovered cell before computing anything.
template <class Model>
std::vector<CurveCell> compute_curve(const Model& model, const RunConfig& cfg, EvalMode mode,
                                     std::size_t workers) {
  const auto strikes = strikes_or_spot(cfg);
  const auto mmm = mmm_quantities(model);
  if (cfg.enforce_tail) {
    for (double t : cfg.t_grid) {
      const double tau = cfg.maturity - t;
      for (double K : strikes) {
        const double a = truncation_bound(model, mmm, tau, cfg.spot, K, cfg.fft);
        if (!fft::tail_condition_check(cfg.fft, a)) {
          throw TailConditionError("t=" + format_number(t) + " K=" + format_number(K) +
                                   ": truncation bound " + format_number(a) +
                                   " exceeds N*eta = " + format_number(cfg.fft.grid_length()));
        }
      }
    }
  }

  std::vector<CurveCell> cells(cfg.t_grid.size() * strikes.size());
  parallel_for(cfg.t_grid.size(), workers, [&](std::size_t ti) {
    const double t = cfg.t_grid[ti];
    const double tau = cfg.maturity - t;
    const LrmSlice<Model> slice(model, tau, cfg.spot, cfg.fft, {mode, cfg.enforce_tail});
    for (std::size_t ki = 0; ki < strikes.size(); ++ki) {
      cells[ti * strikes.size() + ki] = {t, tau, strikes[ki], slice.evaluate(strikes[ki])};
    }
  });
  return cells;
}

inline void write_curve_csv(std::ostream& os, const RunConfig& cfg,
                            const std::vector<CurveCell>& cells) {
  os << "model,t,tau,spot,strike,moneyness,alpha,n,eta,trunc_bound,mode,i1,i2,lrm\n";
  for (const auto& c : cells) {
    const auto& r = c.result;
    os << to_string(cfg.model.kind) << ',' << format_number(c.t) << ',' << format_number(c.tau)
       << ',' << format_number(cfg.spot) << ',' << format_number(c.strike) << ','
       << format_number(c.strike / cfg.spot) << ',' << format_number(r.config.alpha) << ','
       << r.config.n << ',' << format_number(r.config.eta) << ',' << format_number(r.trunc_a)
       << ',' << to_string(r.mode) << ',' << (r.i1 ? format_number(*r.i1) : std::string())
       << ',' << format_number(r.i2) << ',' << format_number(r.lrm) << '\n';
  }
}

struct ImpactRow {
  double y = 0.0;
  double moneyness_before = 0.0;
  double moneyness_after = 0.0;
  double lrm_before = 0.0;
  double lrm_after = 0.0;
  double impact = 0.0;
};

template <class Model>
std::vector<ImpactRow> compute_impact(const Model& model, const RunConfig& cfg, EvalMode mode) {
  const double tau = cfg.maturity - cfg.t_grid.front();
  const double moneyness = strikes_or_spot(cfg).front() / cfg.spot;
  const LrmSlice<Model> slice(model, tau, 1.0, cfg.fft, {mode, cfg.enforce_tail});
  const double before = slice.evaluate(moneyness).lrm;
  std::vector<ImpactRow> rows;
  for (double y : cfg.jump_sizes) {
    const double after_m = moneyness * std::exp(-y);
    const double after = slice.evaluate(after_m).lrm;
    rows.push_back({y, moneyness, after_m, before, after, after - before});
  }
  return rows;
}

inline void write_impact_csv(std::ostream& os, const std::vector<ImpactRow>& rows) {
  os << "y,moneyness_before,moneyness_after,lrm_before,lrm_after,impact\n";
  for (const auto& r : rows) {
    os << format_number(r.y) << ',' << format_number(r.moneyness_before) << ','
       << format_number(r.moneyness_after) << ',' << format_number(r.lrm_before) << ','
       << format_number(r.lrm_after) << ',' << format_number(r.impact) << '\n';
  }
}

/// Prints every assumption with its slack, the minimal martingale measure
/// quantities and the truncation bound of each (t, K) cell against N*eta.
/// Returns 0 iff everything passes.
inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const AnyModel model = build_model(cfg.model);
  return std::visit(
      [&](const auto& m) {
        out << "model: " << to_string(cfg.model.kind) << '\n';
        const auto report = validate_assumptions(m);
        for (const auto& e : report.entries) {
          out << "  " << (e.passed ? "PASS" : "FAIL") << "  " << e.condition
              << "  slack=" << format_number(e.slack) << '\n';
        }
        if (!report.ok()) {
          out << "result: FAILED (";
          const auto failures = report.failures();
          for (std::size_t i = 0; i < failures.size(); ++i) {
            out << (i ? ", " : "") << failures[i] << " violated";
          }
          out << ")\n";
          return kExitFailure;
        }
        const auto q = mmm_quantities(m);
        out << "mmm: mu_S=" << format_number(q.mu_s)
            << " quad_exp_moment=" << format_number(q.quad_exp_moment)
            << " h=" << format_number(q.h) << " mu_star=" << format_number(q.mu_star) << '\n';
        out << "fft: n=" << cfg.fft.n << " eta=" << format_number(cfg.fft.eta)
            << " alpha=" << format_number(cfg.fft.alpha) << " eps=" << format_number(cfg.fft.eps)
            << " N*eta=" << format_number(cfg.fft.grid_length()) << '\n';
        bool tails_ok = true;
        for (double t : cfg.t_grid) {
          for (double K : strikes_or_spot(cfg)) {
            const double a = truncation_bound(m, q, cfg.maturity - t, cfg.spot, K, cfg.fft);
            const bool ok = fft::tail_condition_check(cfg.fft, a);
            tails_ok = tails_ok && ok;
            out << "  " << (ok ? "PASS" : "FAIL") << "  tail t=" << format_number(t)
                << " K=" << format_number(K) << " bound=" << format_number(a)
                << (ok ? " <= " : " > ") << "N*eta\n";
          }
        }
        out << "result: " << (tails_ok ? "ok" : "FAILED (tail condition)") << '\n';
        return tails_ok ? kExitOk : kExitFailure;
      },
      model);
}

namespace detail {

class OutputTarget {
 public:
  OutputTarget(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::out | std::ios::trunc);
    if (!file_) throw ConfigError("cannot open output file " + path);
    stream_ = &file_;
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

inline int cmd_curve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const AnyModel model = build_model(cfg.model);
  const auto strikes = strikes_or_spot(cfg);
  const EvalMode mode = resolve_mode(cfg.mode, strikes.size());
  const std::size_t workers = worker_count(cfg.t_grid.size());
  const auto cells = std::visit(
      [&](const auto& m) { return compute_curve(m, cfg, mode, workers); }, model);
  std::ostringstream csv;
  write_curve_csv(csv, cfg, cells);
  detail::OutputTarget target(cfg.output_path, out);
  target.stream() << csv.str();
  for (const auto& c : cells) {
    if (!c.result.tail_ok) {
      err << "warning: t=" << format_number(c.t) << " K=" << format_number(c.strike)
          << ": truncation bound " << format_number(c.result.trunc_a) << " exceeds N*eta = "
          << format_number(cfg.fft.grid_length()) << '\n';
    }
  }
  err << "curve: " << cells.size() << " cells (" << to_string(mode) << ", " << workers
      << " workers) in " << detail::seconds_since(start) << " s\n";
  return kExitOk;
}

inline int cmd_impact(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.jump_sizes.empty()) throw ConfigError("impact needs at least one jump size (impact.y or --y)");
  for (double y : cfg.jump_sizes) {
    if (y == 0.0) throw ConfigError("impact: jump size 0 has no effect and is rejected");
  }
  if (cfg.t_grid.size() != 1 || cfg.strikes.size() > 1) {
    throw ConfigError("impact needs a single query.t and a single query.strike");
  }
  const auto start = std::chrono::steady_clock::now();
  const AnyModel model = build_model(cfg.model);
  const EvalMode mode = resolve_mode(cfg.mode, cfg.jump_sizes.size() + 1);
  const auto rows =
      std::visit([&](const auto& m) { return compute_impact(m, cfg, mode); }, model);
  std::ostringstream csv;
  write_impact_csv(csv, rows);
  detail::OutputTarget target(cfg.output_path, out);
  target.stream() << csv.str();
  err << "impact: " << rows.size() << " jump sizes (" << to_string(mode) << ") in "
      << detail::seconds_since(start) << " s\n";
  return kExitOk;
}

/// Entry point behind `main`; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local risk-minimizing hedge ratios for European calls under exponential Levy models"};
  app.name("levy_lrm");
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_path;
  std::string mode_text;
  std::string jump_text;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "key = value configuration file");
    sub->add_option("-s,--set", overrides, "override a configuration key (key=value)")
        ->take_all();
  };
  auto* validate = app.add_subcommand("validate", "check model assumptions and tail conditions");
  add_common(validate);
  auto* curve = app.add_subcommand("curve", "LRM over the t and K grids as CSV");
  add_common(curve);
  curve->add_option("-o,--output", output_path, "CSV path ('-' for stdout)");
  curve->add_option("-m,--mode", mode_text, "auto | fft-grid | direct-sum");
  auto* impact = app.add_subcommand("impact", "jump impact LRM(m e^{-y}) - LRM(m) as CSV");
  add_common(impact);
  impact->add_option("-o,--output", output_path, "CSV path ('-' for stdout)");
  impact->add_option("-m,--mode", mode_text, "auto | fft-grid | direct-sum");
  impact->add_option("-y,--y", jump_text, "jump sizes: list or start:step:stop");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  try {
    if (!output_path.empty()) overrides.push_back("output.path=" + output_path);
    if (!mode_text.empty()) overrides.push_back("output.mode=" + mode_text);
    if (!jump_text.empty()) overrides.push_back("impact.y=" + jump_text);

    RunConfig cfg;
    if (config_path.empty()) {
      std::istringstream empty;
      cfg = load_config(empty, overrides, "<none>");
    } else {
      std::ifstream file(config_path);
      if (!file) throw ConfigError("cannot read config file " + config_path);
      cfg = load_config(file, overrides, config_path);
    }

    if (validate->parsed()) return cmd_validate(cfg, out);
    if (curve->parsed()) return cmd_curve(cfg, out, err);
    return cmd_impact(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const AssumptionViolation& e) {
    err << "validation failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const TailConditionError& e) {
    err << "tail condition failed: " << e.what() << '\n';
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace levy_lrm::cli
