#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "spatent/sweep.hpp"

namespace {

using spatent::SweepConfig;

std::string run_to_string(const SweepConfig& c) {
  std::ostringstream out;
  spatent::write_sweep(c, out);
  return out.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) v.push_back(line);
  return v;
}

SweepConfig small_config() {
  SweepConfig c;
  c.t_min = 0.2;
  c.t_max = 20.0;
  c.t_steps = 7;
  c.threads = 3;
  return c;
}

TEST(Sweep, LogGridEndpointsAndSpacing) {
  SweepConfig c;
  c.t_min = 0.1;
  c.t_max = 100.0;
  c.t_steps = 4;
  const auto t = spatent::temperature_grid(c);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t.front(), 0.1);
  EXPECT_DOUBLE_EQ(t.back(), 100.0);
  EXPECT_NEAR(t[1], 1.0, 1e-12);
  c.grid = spatent::GridKind::linear;
  EXPECT_NEAR(spatent::temperature_grid(c)[1], 33.4, 1e-12);
}

TEST(Sweep, OutputIsDeterministicAcrossThreadCounts) {
  SweepConfig c = small_config();
  const std::string a = run_to_string(c);
  c.threads = 1;
  const std::string b = run_to_string(c);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, run_to_string(c));
}

TEST(Sweep, CsvAndJsonlCarryTheSameValues) {
  SweepConfig c = small_config();
  const auto csv = lines_of(run_to_string(c));
  c.format = spatent::OutputFormat::jsonl;
  const auto jsonl = lines_of(run_to_string(c));
  ASSERT_EQ(csv.size(), jsonl.size() + 1);
  EXPECT_EQ(csv[0], spatent::csv_header);
  for (std::size_t i = 0; i < jsonl.size(); ++i) {
    const auto j = nlohmann::json::parse(jsonl[i]);
    std::vector<std::string> cells;
    std::istringstream in(csv[i + 1]);
    for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_EQ(std::stod(cells[0]), j["T"].get<double>());
    EXPECT_EQ(std::stod(cells[1]), j["mu"].get<double>());
    EXPECT_EQ(std::stoi(cells[2]), j["K_max"].get<int>());
    EXPECT_EQ(std::stod(cells[3]), j["lambda"].get<double>());
    EXPECT_EQ(std::stod(cells[4]), j["chi_norm_sq"].get<double>());
    EXPECT_EQ(cells[7], j["status"].get<std::string>());
  }
}

TEST(Sweep, SingleStepEqualsDirectCall) {
  SweepConfig c;
  c.t_min = c.t_max = 2.5;
  c.t_steps = 1;
  const auto result = spatent::run_sweep(c, [](const spatent::SweepRow&) {});
  ASSERT_EQ(result.rows.size(), 1u);
  const auto direct = spatent::lambda_lower_bound(2.5, c.n_mean, c.eps_tail);
  EXPECT_EQ(result.rows[0].lambda, direct.lambda);
  EXPECT_EQ(result.rows[0].mu, direct.mu);
  EXPECT_EQ(result.rows[0].k_max, direct.k_max);
}

TEST(Sweep, ColdSweepSitsAtOneQuarter) {
  SweepConfig c;
  c.t_min = 0.01;
  c.t_max = 0.1;
  c.t_steps = 10;
  const auto result = spatent::run_sweep(c, [](const spatent::SweepRow&) {});
  for (const auto& r : result.rows) {
    ASSERT_TRUE(r.ok()) << r.status;
    EXPECT_NEAR(r.lambda, 0.25, 1e-2) << r.T;
  }
}

TEST(Sweep, PrintedFormulaSelectable) {
  SweepConfig c = small_config();
  c.formula = spatent::LambdaFormula::printed_sum;
  const auto result = spatent::run_sweep(c, [](const spatent::SweepRow&) {});
  for (const auto& r : result.rows) {
    const auto direct = spatent::lambda_lower_bound(r.T, c.n_mean, c.eps_tail);
    EXPECT_EQ(r.lambda, direct.lambda_printed);
  }
}

TEST(Sweep, ConfigValidation) {
  const auto bad = [](auto mutate) {
    SweepConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), spatent::ConfigError);
  };
  bad([](SweepConfig& c) { c.t_min = 0.0; });
  bad([](SweepConfig& c) { c.t_max = 0.05; });
  bad([](SweepConfig& c) { c.t_steps = 0; });
  bad([](SweepConfig& c) { c.eps_tail = 1.0; });
  bad([](SweepConfig& c) { c.n_mean = -3.0; });
  bad([](SweepConfig& c) {
    c.split = 0.5;
    c.formula = spatent::LambdaFormula::printed_sum;
  });
  EXPECT_NO_THROW(SweepConfig{}.validate());
}

TEST(Sweep, RowFailuresAreRecordedInRow) {
  // At T = 1e5 the truncation needed exceeds the largest supported mode.
  SweepConfig c;
  c.t_min = 1.0;
  c.t_max = 1e5;
  c.t_steps = 2;
  const auto result = spatent::run_sweep(c, [](const spatent::SweepRow&) {});
  ASSERT_EQ(result.rows.size(), 2u);
  EXPECT_TRUE(result.rows[0].ok());
  EXPECT_EQ(result.failures, 1u);
  EXPECT_EQ(result.rows[1].status.rfind("error: ", 0), 0u);
  EXPECT_TRUE(std::isnan(result.rows[1].lambda));
}

TEST(Sweep, CsvQuotingOfStatus) {
  spatent::SweepRow r;
  r.status = "error: a, b";
  const std::string line = spatent::format_csv_row(r);
  EXPECT_NE(line.find("\"error: a, b\""), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(spatent::format_jsonl_row(r))["lambda"], nullptr);
}

TEST(Sweep, ResumeCompletesAPartialFile) {
  const auto dir = std::filesystem::temp_directory_path() / "spatent_resume_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "sweep.csv").string();
  SweepConfig c = small_config();
  const std::string full = run_to_string(c);

  // Keep the header, three rows and half of the fourth.
  const auto lines = lines_of(full);
  {
    std::ofstream out(path, std::ios::trunc);
    for (int i = 0; i < 4; ++i) out << lines[static_cast<std::size_t>(i)] << '\n';
    out << lines[4].substr(0, lines[4].size() / 2);
  }
  const std::size_t done = spatent::completed_rows(path, c.format);
  EXPECT_EQ(done, 3u);
  {
    std::ofstream out(path, std::ios::app);
    spatent::write_sweep(c, out, done, false);
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), full);
  std::filesystem::remove_all(dir);
}

}  // namespace
