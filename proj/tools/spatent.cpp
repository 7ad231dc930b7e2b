// Command-line front end: temperature sweeps of lambda and oracle runs.
//
//   spatent sweep  --n-mean 10 --t-min 0.1 --t-max 100 --t-steps 50 --grid log --out lambda.csv
//   spatent verify --k 3 --out report.json
//
// Exit codes: 0 success, 1 a row or certificate failed, 2 bad configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spatent/oracle.hpp"
#include "spatent/sweep.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_bad_config = 2;

int run_sweep_command(spatent::SweepConfig config) {
  try {
    config.validate();
  } catch (const spatent::ConfigError& e) {
    std::cerr << "spatent sweep: " << e.what() << '\n';
    return exit_bad_config;
  }

  spatent::SweepResult result;
  if (config.out.empty() || config.out == "-") {
    result = spatent::write_sweep(config, std::cout);
  } else {
    std::size_t done = 0;
    bool header_present = false;
    if (config.resume) {
      done = spatent::completed_rows(config.out, config.format);
      std::ifstream probe(config.out);
      header_present = probe.peek() != std::ifstream::traits_type::eof();
    }
    std::ofstream out(config.out, config.resume ? std::ios::app : std::ios::trunc);
    if (!out) {
      std::cerr << "spatent sweep: cannot open " << config.out << '\n';
      return exit_bad_config;
    }
    if (done > 0)
      std::cerr << "spatent sweep: resuming after " << done << " completed rows\n";
    result = spatent::write_sweep(config, out, done, !header_present);
  }
  if (result.failures > 0) {
    std::cerr << "spatent sweep: " << result.failures << " row(s) failed\n";
    return exit_failed;
  }
  return exit_ok;
}

int run_verify_command(const spatent::VerifyGrid& grid, const std::string& out_path) {
  spatent::VerificationReport report;
  try {
    report = spatent::run_verification(grid);
  } catch (const std::invalid_argument& e) {
    std::cerr << "spatent verify: " << e.what() << '\n';
    return exit_bad_config;
  }
  const std::string text = report.to_json().dump(2);
  if (out_path.empty() || out_path == "-") {
    std::cout << text << '\n';
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "spatent verify: cannot open " << out_path << '\n';
      return exit_bad_config;
    }
    out << text << '\n';
  }
  for (const auto& c : report.checks)
    if (!c.informational && !c.passed)
      std::cerr << "FAIL " << c.name << " T=" << c.T << " N=" << c.n_mean << " K=" << c.K
                << (c.message.empty() ? "" : " " + c.message) << '\n';
  std::cerr << "spatent verify: " << report.checks.size() << " checks, " << report.failures()
            << " failure(s)\n";
  return report.all_passed() ? exit_ok : exit_failed;
}

// Expands `sweep --config FILE` into flags placed ahead of the ones given on
// the command line, so that explicit flags win. Lines are `key = value`;
// blank lines and lines starting with '#' are skipped. Returns the arguments
// in CLI11's reversed order.
std::vector<std::string> with_config_file(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  bool in_sweep = false;
  std::size_t insert_at = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::string& a = in[i];
    if (!in_sweep && a == "sweep") {
      in_sweep = true;
      out.push_back(a);
      insert_at = out.size();
      continue;
    }
    std::string path;
    if (in_sweep && a == "--config" && i + 1 < in.size()) {
      path = in[++i];
    } else if (in_sweep && a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else {
      out.push_back(a);
      continue;
    }
    std::ifstream file(path);
    if (!file) throw std::runtime_error("cannot read config file " + path);
    std::string line;
    for (int lineno = 1; std::getline(file, line); ++lineno) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
      const auto trim = [](std::string v) {
        const auto b = v.find_first_not_of(" \t\r");
        const auto e = v.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
      };
      std::string key = trim(line.substr(0, eq));
      for (char& ch : key)
        if (ch == '_') ch = '-';
      from_file.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
    }
  }
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(insert_at), from_file.begin(), from_file.end());
  return {out.rbegin(), out.rend()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial entanglement of thermal bosons in a 1D harmonic trap"};
  app.require_subcommand(1);

  spatent::SweepConfig sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "lambda(T) at fixed mean particle number");
  sweep_cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  sweep_cmd->add_option("--config", config_path, "key=value file; command-line flags take precedence");
  sweep_cmd->add_option("--n-mean", sweep.n_mean, "mean particle number <N>")->capture_default_str();
  sweep_cmd->add_option("--t-min", sweep.t_min, "lowest temperature")->capture_default_str();
  sweep_cmd->add_option("--t-max", sweep.t_max, "highest temperature")->capture_default_str();
  sweep_cmd->add_option("--t-steps", sweep.t_steps, "number of grid points")->capture_default_str();
  sweep_cmd
      ->add_option("--grid", sweep.grid, "linear|log")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, spatent::GridKind>{{"linear", spatent::GridKind::linear},
                                                   {"log", spatent::GridKind::log}},
          CLI::ignore_case));
  sweep_cmd->add_option("--eps-tail", sweep.eps_tail, "relative tail budget for truncation")
      ->capture_default_str();
  sweep_cmd->add_option("--split", sweep.split, "demarcation point a")->capture_default_str();
  sweep_cmd->add_option("--out", sweep.out, "output path (default stdout)");
  sweep_cmd
      ->add_option("--format", sweep.format, "csv|jsonl")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, spatent::OutputFormat>{{"csv", spatent::OutputFormat::csv},
                                                       {"jsonl", spatent::OutputFormat::jsonl}},
          CLI::ignore_case));
  sweep_cmd
      ->add_option("--lambda-formula", sweep.formula,
                   "coherent_bunching (block norm) or printed_sum (closed triple sum)")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, spatent::LambdaFormula>{
              {"coherent_bunching", spatent::LambdaFormula::coherent_bunching},
              {"printed_sum", spatent::LambdaFormula::printed_sum}},
          CLI::ignore_case));
  sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = all cores)");
  sweep_cmd->add_flag("--resume", sweep.resume, "append to an existing output, skipping finished rows");

  spatent::VerifyGrid grid;
  int k = 3;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "run the oracle certificates");
  verify_cmd->add_option("--k", k, "oracle truncation (1..6)")->capture_default_str();
  verify_cmd->add_option("--out", verify_out, "JSON report path (default stdout)");
  verify_cmd->add_option("--temps", grid.temperatures, "temperature grid");
  verify_cmd->add_option("--n-values", grid.n_values, "mean particle numbers");
  verify_cmd->add_option("--split", grid.split.a, "demarcation point a");
  verify_cmd->add_option("--corrupt-overlaps", grid.overlap_corruption,
                         "test hook: scale off-diagonal overlaps on the analytic side")
      ->group("");

  std::vector<std::string> args;
  try {
    args = with_config_file(argc, argv);
  } catch (const std::runtime_error& e) {
    std::cerr << "spatent: " << e.what() << '\n';
    return exit_bad_config;
  }
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_bad_config;
  }

  if (*sweep_cmd) return run_sweep_command(sweep);
  grid.k_values = {k};
  return run_verify_command(grid, verify_out);
}
