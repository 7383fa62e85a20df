#include "sirajd/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "sirajd/ilut.hpp"

namespace sirajd::bench {

namespace {

using json = nlohmann::json;

bool uses_teps(Method m) { return m == Method::Sira || m == Method::Jd; }

std::string format_teps(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", t);
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T get_number(const json& v, const char* key) {
  if (!v.is_number()) throw ConfigError(std::string("config field '") + key + "' must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ConfigError(std::string("config field '") + key + "' must be a nonnegative integer");
  }
  return v.get<T>();
}

Vector random_start(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d;
  Vector v(n);
  for (auto& x : v) x = {d(gen), d(gen)};
  scale(1.0 / norm2(v), v);
  return v;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (methods.empty()) throw ConfigError("at least one method is required");
  if (teps.empty()) throw ConfigError("at least one teps value is required");
  for (double t : teps)
    if (!(t > 0.0 && t < 0.5)) throw ConfigError("teps must lie in (0, 0.5)");
  if (!(droptol >= 0.0)) throw ConfigError("droptol must be nonnegative");
  if (m_max < 2) throw ConfigError("mmax must be at least 2");
  if (gmres_restart == 0 || gmres_maxit == 0) throw ConfigError("GMRES restart and maxit must be positive");
}

ExperimentSpec parse_spec(const json& doc, ExperimentSpec base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "matrix") {
      if (!v.is_string()) throw ConfigError("config field 'matrix' must be a string");
      base.matrix_path = v.get<std::string>();
    } else if (key == "re" || key == "sigma_re") {
      base.sigma.real(get_number<double>(v, key.c_str()));
    } else if (key == "im" || key == "sigma_im") {
      base.sigma.imag(get_number<double>(v, key.c_str()));
    } else if (key == "method" || key == "methods") {
      base.methods.clear();
      const json list = v.is_array() ? v : json::array({v});
      for (const auto& m : list) {
        if (!m.is_string()) throw ConfigError("method names must be strings");
        try {
          base.methods.push_back(parse_method(m.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (key == "teps") {
      base.teps.clear();
      const json list = v.is_array() ? v : json::array({v});
      for (const auto& t : list) base.teps.push_back(get_number<double>(t, "teps"));
    } else if (key == "droptol") {
      base.droptol = get_number<double>(v, "droptol");
    } else if (key == "mmax") {
      base.m_max = get_number<std::size_t>(v, "mmax");
    } else if (key == "max_restarts") {
      base.max_restarts = get_number<std::size_t>(v, "max_restarts");
    } else if (key == "gmres_restart") {
      base.gmres_restart = get_number<std::size_t>(v, "gmres_restart");
    } else if (key == "gmres_maxit") {
      base.gmres_maxit = get_number<std::size_t>(v, "gmres_maxit");
    } else if (key == "seed") {
      base.seed = get_number<std::uint64_t>(v, "seed");
    } else if (key == "out") {
      if (!v.is_string()) throw ConfigError("config field 'out' must be a string");
      base.out_dir = v.get<std::string>();
    } else {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  return base;
}

ExperimentSpec load_spec(const std::filesystem::path& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  ExperimentSpec spec = parse_spec(doc, std::move(base));
  // a relative matrix path is taken relative to the config file
  if (doc.contains("matrix") && std::filesystem::path(spec.matrix_path).is_relative())
    spec.matrix_path = (path.parent_path() / spec.matrix_path).string();
  return spec;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const SparseMatrix& a) {
  spec.validate();
  ExperimentReport rep;
  rep.spec = spec;
  rep.n = a.size();
  rep.one_norm = a.one_norm();
  rep.tolerance = outer_tolerance(a, 1e-10);

  std::vector<std::pair<Method, std::optional<double>>> plan;
  for (Method m : spec.methods) {
    if (uses_teps(m)) {
      for (double t : spec.teps) plan.emplace_back(m, t);
    } else {
      plan.emplace_back(m, std::nullopt);
    }
  }

  std::optional<IlutFactors> precond;
  std::string precond_error;
  double t3 = 0.0;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    precond = ilut_factor(a, spec.sigma, spec.droptol);
    t3 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.precond_fill = precond->fill();
  } catch (const ZeroPivotError& e) {
    precond_error = e.what();
  }

  for (const auto& [method, teps] : plan) {
    RunRecord run;
    run.method = method;
    run.teps = teps;
    run.label = std::string(method_name(method)) + (teps ? "_" + format_teps(*teps) : "");
    run.t3 = t3;
    if (!precond) {
      run.status = "error";
      run.error = precond_error;
      run.config_error = true;
      rep.runs.push_back(std::move(run));
      continue;
    }
    OuterConfig cfg;
    cfg.sigma = spec.sigma;
    cfg.method = method;
    if (teps) cfg.teps = *teps;
    cfg.m_max = spec.m_max;
    cfg.max_restarts = spec.max_restarts;
    cfg.inner.restart = spec.gmres_restart;
    cfg.inner.maxit = spec.gmres_maxit;
    cfg.inner.droptol = spec.droptol;
    if (spec.seed != 0) cfg.start = random_start(a.size(), spec.seed);
    try {
      run.result = run_restarted(a, cfg, &*precond);
      run.status = std::string(status_name(run.result.status));
    } catch (const ConfigError& e) {
      run.status = "error";
      run.error = e.what();
      run.config_error = true;
    } catch (const std::exception& e) {
      run.status = "error";
      run.error = e.what();
    }
    rep.runs.push_back(std::move(run));
  }
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  SparseMatrix a = mm_load(spec.matrix_path);
  return run_experiment(spec, a);
}

std::vector<HistoryRow> history_rows(const RunRecord& run, double one_norm) {
  std::vector<HistoryRow> rows;
  const double scale_by = one_norm > 0.0 ? one_norm : 1.0;
  for (const auto& it : run.result.record.iterations) {
    rows.push_back({it.outer_index, it.residual_norm / scale_by, it.inner_tol, it.inner_iterations});
  }
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
  os << csv_field("outer_index") << ',' << csv_field("relative_residual") << ',' << csv_field("inner_tol") << ','
     << csv_field("inner_iters") << "\r\n";
  for (const auto& r : rows) {
    os << r.outer_index << ',' << format_double(r.relative_residual) << ',' << format_double(r.inner_tol) << ','
       << r.inner_iters << "\r\n";
  }
}

namespace {

std::vector<std::vector<std::string>> parse_csv(std::istream& is) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  auto end_record = [&] {
    fields.push_back(field);
    records.push_back(std::move(fields));
    fields.clear();
    field.clear();
    any = false;
  };
  while (is.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get(c);
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw MalformedInputError("unterminated quoted CSV field", records.size() + 1);
  if (any || !field.empty() || !fields.empty()) end_record();
  return records;
}

template <class T>
T parse_field(const std::string& s, std::size_t line) {
  std::istringstream in(s);
  T v{};
  in >> v;
  if (in.fail() || !in.eof()) throw MalformedInputError("bad CSV field '" + s + "'", line);
  return v;
}

double parse_real(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw MalformedInputError("bad CSV field '" + s + "'", line);
  return v;
}

}  // namespace

std::vector<HistoryRow> read_history_csv(std::istream& is) {
  const auto records = parse_csv(is);
  if (records.empty()) throw MalformedInputError("missing CSV header", 1);
  const std::vector<std::string> header{"outer_index", "relative_residual", "inner_tol", "inner_iters"};
  if (records[0] != header) throw MalformedInputError("unexpected CSV header", 1);
  std::vector<HistoryRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 4) throw MalformedInputError("expected 4 CSV fields", i + 1);
    rows.push_back({parse_field<std::size_t>(f[0], i + 1), parse_real(f[1], i + 1),
                    parse_real(f[2], i + 1), parse_field<std::size_t>(f[3], i + 1)});
  }
  return rows;
}

json summary_json(const ExperimentReport& report) {
  json out = json::array();
  for (const auto& run : report.runs) {
    const auto& rec = run.result.record;
    json j;
    j["label"] = run.label;
    j["method"] = std::string(method_name(run.method));
    j["teps"] = run.teps ? json(*run.teps) : json(nullptr);
    j["status"] = run.status;
    j["error"] = run.error;
    j["n"] = report.n;
    j["sigma"] = {{"re", report.spec.sigma.real()}, {"im", report.spec.sigma.imag()}};
    j["tolerance"] = report.tolerance;
    j["eigenvalue"] = {{"re", run.result.eigenvalue.real()}, {"im", run.result.eigenvalue.imag()}};
    j["residual_norm"] = run.result.residual_norm;
    j["relative_residual"] = run.result.residual_norm / std::max(report.one_norm, 1e-300);
    j["I_out"] = rec.outer_iterations();
    j["I_inn"] = rec.inner_iterations();
    j["I_0.1"] = rec.capped_count();
    j["inner_failures"] = rec.inner_failures();
    j["restarts"] = run.result.restarts;
    out.push_back(std::move(j));
  }
  return out;
}

json timings_json(const ExperimentReport& report) {
  json out = json::array();
  for (const auto& run : report.runs) {
    const auto& rec = run.result.record;
    out.push_back({{"label", run.label},
                   {"T1", rec.t1()},
                   {"T2", rec.t2()},
                   {"T3", run.t3 + rec.t3()},
                   {"T4", rec.t4()}});
  }
  return out;
}

std::string summary_table(const ExperimentReport& report) {
  std::ostringstream os;
  os << "n = " << report.n << ", sigma = " << report.spec.sigma.real() << (report.spec.sigma.imag() < 0 ? " - " : " + ")
     << std::abs(report.spec.sigma.imag()) << "i, tol = " << std::scientific << std::setprecision(3)
     << report.tolerance << "\n\n";
  os << std::left << std::setw(22) << "Algorithm" << std::right << std::setw(7) << "I_out" << std::setw(8) << "I_inn"
     << std::setw(7) << "I_0.1" << std::setw(6) << "rst" << std::setw(10) << "T1" << std::setw(10) << "T2"
     << std::setw(10) << "T3" << std::setw(10) << "T4" << "  " << std::left << std::setw(30) << "lambda"
     << "status\n";
  for (const auto& run : report.runs) {
    const auto& rec = run.result.record;
    std::ostringstream lam;
    lam << std::scientific << std::setprecision(5) << run.result.eigenvalue.real()
        << (run.result.eigenvalue.imag() < 0 ? "-" : "+") << std::abs(run.result.eigenvalue.imag()) << "i";
    os << std::left << std::setw(22) << run.label << std::right << std::setw(7) << rec.outer_iterations()
       << std::setw(8) << rec.inner_iterations() << std::setw(7) << rec.capped_count() << std::setw(6)
       << run.result.restarts << std::fixed << std::setprecision(4) << std::setw(10) << rec.t1() << std::setw(10)
       << rec.t2() << std::setw(10) << run.t3 + rec.t3() << std::setw(10) << rec.t4() << "  " << std::left
       << std::setw(30) << lam.str() << run.status << "\n";
  }
  return os.str();
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  if (report.runs.empty()) throw std::invalid_argument("emit_report: no runs");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw std::runtime_error("cannot create output directory " + dir.string());
  std::vector<std::filesystem::path> written;
  auto open = [&](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    written.push_back(p);
    return out;
  };
  for (const auto& run : report.runs) {
    auto out = open(dir / (run.label + "_history.csv"));
    write_history_csv(out, history_rows(run, report.one_norm));
  }
  open(dir / "summary.json") << summary_json(report).dump(2) << "\n";
  open(dir / "timings.json") << timings_json(report).dump(2) << "\n";
  open(dir / "summary.txt") << summary_table(report);
  return written;
}

int exit_code(const ExperimentReport& report) {
  bool all_ok = true;
  for (const auto& run : report.runs) {
    if (run.config_error) return 2;
    if (run.status != "converged" && run.status != "converged-by-breakdown") all_ok = false;
  }
  return all_ok ? 0 : 1;
}

}  // namespace sirajd::bench
