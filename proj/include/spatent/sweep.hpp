#pragma once

// Temperature sweeps of lambda at fixed mean particle number.
//
// Rows are computed by a pool of workers and written strictly in grid order
// as soon as every earlier row is done, so a partial output file is always a
// valid prefix of the full sweep.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "spatent/entanglement.hpp"
#include "spatent/regions.hpp"

namespace spatent {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GridKind { linear, log };
enum class OutputFormat { csv, jsonl };

struct SweepConfig {
  double n_mean = 10.0;
  double t_min = 0.1;
  double t_max = 100.0;
  int t_steps = 50;
  GridKind grid = GridKind::log;
  double eps_tail = 1e-8;
  double split = 0.0;
  std::string out;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  LambdaFormula formula = LambdaFormula::coherent_bunching;
  unsigned threads = 0;  // 0: hardware concurrency
  bool resume = false;

  void validate() const {
    if (!(n_mean > 0.0) || !std::isfinite(n_mean)) throw ConfigError("n-mean must be positive");
    if (!(t_min > 0.0) || !std::isfinite(t_min)) throw ConfigError("t-min must be positive");
    if (!(t_max >= t_min) || !std::isfinite(t_max)) throw ConfigError("t-max must be >= t-min");
    if (t_steps < 1) throw ConfigError("t-steps must be at least 1");
    if (!(eps_tail > 0.0 && eps_tail < 1.0)) throw ConfigError("eps-tail must lie in (0, 1)");
    if (!std::isfinite(split)) throw ConfigError("split must be finite");
    if (formula == LambdaFormula::printed_sum && split != 0.0)
      throw ConfigError("the printed-sum formula needs split = 0");
  }
};

inline std::vector<double> temperature_grid(const SweepConfig& c) {
  c.validate();
  std::vector<double> t(static_cast<std::size_t>(c.t_steps));
  if (c.t_steps == 1) {
    t[0] = c.t_min;
    return t;
  }
  const double last = c.t_steps - 1;
  for (int i = 0; i < c.t_steps; ++i) {
    const double f = i / last;
    t[static_cast<std::size_t>(i)] =
        c.grid == GridKind::linear ? c.t_min + f * (c.t_max - c.t_min)
                                   : std::exp(std::log(c.t_min) + f * (std::log(c.t_max) - std::log(c.t_min)));
  }
  t.back() = c.t_max;
  return t;
}

struct SweepRow {
  double T = 0.0;
  double mu = std::numeric_limits<double>::quiet_NaN();
  int k_max = 0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double chi_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double condensate_fraction = std::numeric_limits<double>::quiet_NaN();
  double tail_bound = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";

  [[nodiscard]] bool ok() const noexcept { return status == "ok"; }
};

inline constexpr std::string_view csv_header =
    "T,mu,K_max,lambda,chi_norm_sq,condensate_fraction,tail_bound,status";

inline SweepRow compute_row(const SweepConfig& c, double T) {
  SweepRow row;
  row.T = T;
  try {
    const bool printed = c.formula == LambdaFormula::printed_sum;
    const NegativityReport r = lambda_lower_bound(T, c.n_mean, c.eps_tail, RegionSplit{c.split}, printed);
    row.mu = r.mu;
    row.k_max = r.k_max;
    row.lambda = r.lambda_for(c.formula);
    row.chi_norm_sq = r.chi_norm_sq_for(c.formula);
    row.condensate_fraction = r.condensate_fraction;
    row.tail_bound = r.tail_bound;
  } catch (const std::exception& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

/// Shortest text for a double that round-trips: 17 significant digits.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + "\"";
}

inline std::string format_csv_row(const SweepRow& r) {
  std::string s;
  s += format_real(r.T) + ',' + format_real(r.mu) + ',' + std::to_string(r.k_max) + ',';
  s += format_real(r.lambda) + ',' + format_real(r.chi_norm_sq) + ',';
  s += format_real(r.condensate_fraction) + ',' + format_real(r.tail_bound) + ',';
  s += csv_quote(r.status);
  return s;
}

inline std::string format_jsonl_row(const SweepRow& r) {
  const auto num = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["T"] = num(r.T);
  j["mu"] = num(r.mu);
  j["K_max"] = r.k_max;
  j["lambda"] = num(r.lambda);
  j["chi_norm_sq"] = num(r.chi_norm_sq);
  j["condensate_fraction"] = num(r.condensate_fraction);
  j["tail_bound"] = num(r.tail_bound);
  j["status"] = r.status;
  return j.dump();
}

inline std::string format_row(const SweepRow& r, OutputFormat f) {
  return f == OutputFormat::csv ? format_csv_row(r) : format_jsonl_row(r);
}

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t failures = 0;
};

/// Computes rows [first_row, T_steps) and hands each to `emit` in grid order.
inline SweepResult run_sweep(const SweepConfig& config,
                             const std::function<void(const SweepRow&)>& emit,
                             std::size_t first_row = 0) {
  const std::vector<double> grid = temperature_grid(config);
  const std::size_t total = grid.size();
  SweepResult result;
  if (first_row >= total) return result;

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, total - first_row));

  std::vector<std::optional<SweepRow>> slots(total);
  std::mutex m;
  std::condition_variable ready;
  std::atomic<std::size_t> next{first_row};

  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepRow row = compute_row(config, grid[i]);
      {
        std::lock_guard lock(m);
        slots[i] = std::move(row);
      }
      ready.notify_all();
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);

  for (std::size_t i = first_row; i < total; ++i) {
    SweepRow row;
    {
      std::unique_lock lock(m);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      row = std::move(*slots[i]);
      slots[i].reset();
    }
    if (!row.ok()) ++result.failures;
    emit(row);
    result.rows.push_back(std::move(row));
  }
  return result;
}

/// Writes a whole sweep (header included for CSV) to a stream, flushing
/// after every row.
inline SweepResult write_sweep(const SweepConfig& config, std::ostream& out,
                               std::size_t first_row = 0, bool write_header = true) {
  if (write_header && config.format == OutputFormat::csv) out << csv_header << '\n' << std::flush;
  return run_sweep(
      config, [&](const SweepRow& r) { out << format_row(r, config.format) << '\n' << std::flush; },
      first_row);
}

/// Number of complete data rows already present in an output file. A
/// trailing partial line is cut off so that appending resumes cleanly.
inline std::size_t completed_rows(const std::string& path, OutputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  const auto last_newline = text.rfind('\n');
  const std::size_t keep = last_newline == std::string::npos ? 0 : last_newline + 1;
  if (keep != text.size()) {
    text.resize(keep);
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
  }
  std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  if (format == OutputFormat::csv && lines > 0) --lines;  // header
  return lines;
}

}  // namespace spatent
