#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sirajd/bench.hpp"

using namespace sirajd;
using namespace sirajd::bench;
namespace fs = std::filesystem;

namespace {

SparseMatrix diag_toy() {
  Vector d(10);
  for (std::size_t i = 0; i < 10; ++i) d[i] = static_cast<double>(i + 1);
  return SparseMatrix::diagonal(d);
}

ExperimentSpec toy_spec() {
  ExperimentSpec s;
  s.matrix_path = "toy.mtx";
  s.sigma = 3.2;
  return s;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sirajd_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("spec parsing") {
  const auto doc = nlohmann::json::parse(R"({"matrix": "a.mtx", "re": 0.5, "im": -1, "methods": ["sira", "jd"],
      "teps": [1e-3, 1e-4], "droptol": 0.01, "mmax": 12, "max_restarts": 3, "seed": 4, "out": "runs"})");
  const ExperimentSpec s = parse_spec(doc);
  CHECK(s.matrix_path == "a.mtx");
  CHECK(s.sigma == Complex{0.5, -1.0});
  REQUIRE(s.methods.size() == 2);
  CHECK(s.methods[1] == Method::Jd);
  CHECK(s.teps == std::vector<double>{1e-3, 1e-4});
  CHECK(s.droptol == 0.01);
  CHECK(s.m_max == 12);
  CHECK(s.max_restarts == 3);
  CHECK(s.seed == 4);
  CHECK(s.out_dir == "runs");

  ExperimentSpec base;
  base.m_max = 7;
  CHECK(parse_spec(nlohmann::json::parse(R"({"method": "sia-inexact"})"), base).m_max == 7);
  CHECK_THROWS_AS(parse_spec(nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(parse_spec(nlohmann::json::parse(R"({"mmax": "ten"})")), ConfigError);
  CHECK_THROWS(parse_spec(nlohmann::json::parse(R"({"method": "nope"})")));
  CHECK_THROWS_AS(parse_spec(nlohmann::json::parse(R"([1, 2])")), ConfigError);

  ExperimentSpec bad = toy_spec();
  bad.teps = {0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = toy_spec();
  bad.methods.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("toy experiment: immediate convergence gives a single-row CSV") {
  ExperimentSpec s = toy_spec();
  s.methods = {Method::SiaExact};
  const SparseMatrix a = diag_toy();
  ExperimentReport rep = run_experiment(s, a);
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].status == "converged");
  CHECK(std::abs(rep.runs[0].result.eigenvalue - 3.0) <= 1e-10);
  CHECK(exit_code(rep) == 0);

  // a run whose record has one outer iteration
  RunRecord one;
  one.result.record.iterations.push_back(IterationRecord{});
  one.result.record.iterations[0].outer_index = 1;
  one.result.record.iterations[0].residual_norm = 1e-12;
  const auto rows = history_rows(one, 10.0);
  REQUIRE(rows.size() == 1);
  std::ostringstream os;
  write_history_csv(os, rows);
  const std::string text = os.str();
  std::istringstream is(text);
  CHECK(read_history_csv(is) == rows);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("two methods give a summary array of length two; I_inn is the column sum") {
  ExperimentSpec s = toy_spec();
  s.methods = {Method::Sira, Method::SiaInexact};
  const ExperimentReport rep = run_experiment(s, diag_toy());
  const auto j = summary_json(rep);
  REQUIRE(j.is_array());
  CHECK(j.size() == 2);
  for (std::size_t i = 0; i < rep.runs.size(); ++i) {
    const auto rows = history_rows(rep.runs[i], rep.one_norm);
    std::size_t sum = 0;
    for (const auto& r : rows) sum += r.inner_iters;
    CHECK(j[i]["I_inn"].get<std::size_t>() == sum);
    CHECK(j[i]["I_out"].get<std::size_t>() == rows.size());
    CHECK(j[i]["label"] == rep.runs[i].label);
  }
  CHECK(j[0]["label"] == "sira_1e-03");
  CHECK(j[1]["label"] == "sia-inexact");
  CHECK(summary_table(rep).find("sira_1e-03") != std::string::npos);
  CHECK(timings_json(rep).size() == 2);
}

TEST_CASE("exact methods run once regardless of the teps list") {
  ExperimentSpec s = toy_spec();
  s.methods = {Method::Sira, Method::SiraExact};
  s.teps = {1e-2, 1e-4};
  const ExperimentReport rep = run_experiment(s, diag_toy());
  CHECK(rep.runs.size() == 3);
}

TEST_CASE("CSV round trip is exact") {
  std::vector<HistoryRow> rows;
  for (std::size_t i = 1; i <= 20; ++i)
    rows.push_back({i, 1.0 / (3.0 * static_cast<double>(i * i)), std::ldexp(1.0, -static_cast<int>(i)) / 7.0, i * 13});
  rows.push_back({21, 0.0, 0.0, 0});
  std::ostringstream os;
  write_history_csv(os, rows);
  std::istringstream is(os.str());
  CHECK(read_history_csv(is) == rows);

  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  std::istringstream quoted("\"outer_index\",relative_residual,inner_tol,\"inner_iters\"\r\n\"1\",0.5,\"0.25\",3\r\n");
  const auto q = read_history_csv(quoted);
  REQUIRE(q.size() == 1);
  CHECK(q[0] == HistoryRow{1, 0.5, 0.25, 3});
  std::istringstream bad("outer_index,relative_residual,inner_tol,inner_iters\n1,abc,0,0\n");
  CHECK_THROWS(read_history_csv(bad));
}

TEST_CASE("emit_report is byte-identical for identical specs") {
  ExperimentSpec s = toy_spec();
  s.methods = {Method::Sira, Method::Jd, Method::SiaInexact};
  s.seed = 11;
  const fs::path d1 = scratch("emit1");
  const fs::path d2 = scratch("emit2");
  emit_report(run_experiment(s, diag_toy()), d1);
  const auto written = emit_report(run_experiment(s, diag_toy()), d2);
  CHECK(written.size() == 6);
  for (const char* name : {"summary.json", "sira_1e-03_history.csv", "jd_1e-03_history.csv", "sia-inexact_history.csv"})
    CHECK(slurp(d1 / name) == slurp(d2 / name));
  CHECK(fs::exists(d1 / "timings.json"));
  CHECK(fs::exists(d1 / "summary.txt"));
  const auto j = nlohmann::json::parse(slurp(d1 / "summary.json"));
  CHECK(j.size() == 3);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("zero pivot is a configuration error") {
  ExperimentSpec s = toy_spec();
  s.sigma = 3.0;
  s.droptol = 0.0;
  const ExperimentReport rep = run_experiment(s, diag_toy());
  REQUIRE(rep.runs.size() == 1);
  CHECK(rep.runs[0].config_error);
  CHECK(exit_code(rep) == 2);
}

TEST_CASE("non-convergence maps to exit code 1") {
  ExperimentSpec s = toy_spec();
  s.methods = {Method::Sira};
  s.m_max = 2;
  const ExperimentReport rep = run_experiment(s, diag_toy());
  CHECK(rep.runs[0].status == "not-converged");
  CHECK(exit_code(rep) == 1);
}
