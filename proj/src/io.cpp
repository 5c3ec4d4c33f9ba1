#include "varidescent/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "varidescent/oracles.hpp"

namespace varidescent {

namespace {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

[[noreturn]] void unknown_key(const std::string& key,
                              std::span<const std::string> known,
                              const std::string& where) {
  std::string best;
  int best_dist = 1 << 20;
  std::string lowered = key;
  for (char& c : lowered) c = static_cast<char>(std::tolower(c));
  for (const std::string& k : known) {
    const int d = edit_distance(lowered, k);
    if (d < best_dist) {
      best_dist = d;
      best = k;
    }
  }
  std::string msg = "unknown key '" + key + "'" + where;
  if (best_dist <= static_cast<int>(best.size()) / 2 + 2)
    msg += " (did you mean '" + best + "'?)";
  throw Error(msg);
}

void require_keys(const json& obj, std::span<const std::string> known,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      unknown_key(key, known, where);
  }
}

std::vector<double> get_double_array(const json& j, const std::string& key) {
  if (!j.at(key).is_array())
    throw Error("config key '" + key + "' must be an array");
  std::vector<double> out;
  for (const json& e : j.at(key)) {
    if (!e.is_number()) throw Error("config key '" + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

UniformGrid RunConfig::make_grid() const {
  return build_grid(domain,
                    std::span<const int>(cells.data(),
                                         static_cast<std::size_t>(domain.rank)));
}

Problem RunConfig::make_problem() const {
  Problem p = builtin_problem(problem_name, problem_params);
  p.boundary_mode = boundary_mode;
  p.validate();
  return p;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw Error("config root must be a JSON object");

  static const std::vector<std::string> top_keys = {
      "domain",        "cells",      "problem",   "params",
      "d",             "boundary_mode", "max_iters", "tol_grad",
      "armijo_c1",     "shrink",     "step0",     "min_step",
      "isoperimetric", "solution_csv", "convergence_log"};
  require_keys(j, top_keys, "");

  for (const char* req : {"domain", "cells", "problem"})
    if (!j.contains(req))
      throw Error(std::string("config is missing required key '") + req + "'");

  RunConfig cfg;

  const json& dom = j.at("domain");
  if (!dom.is_object()) throw Error("config key 'domain' must be an object");
  static const std::vector<std::string> dom_keys = {"lower", "upper"};
  require_keys(dom, dom_keys, " in 'domain'");
  for (const char* req : {"lower", "upper"})
    if (!dom.contains(req))
      throw Error(std::string("'domain' is missing key '") + req + "'");
  const std::vector<double> lower = get_double_array(dom, "lower");
  const std::vector<double> upper = get_double_array(dom, "upper");
  if (lower.size() != upper.size())
    throw Error("'domain.lower' has " + std::to_string(lower.size()) +
                " entries but 'domain.upper' has " + std::to_string(upper.size()));
  cfg.domain = BoxDomain(lower, upper);

  if (!j.at("cells").is_array())
    throw Error("config key 'cells' must be an array");
  std::vector<int> cells;
  for (const json& e : j.at("cells")) {
    if (!e.is_number_integer())
      throw Error("config key 'cells' must hold integers");
    cells.push_back(e.get<int>());
  }
  if (static_cast<int>(cells.size()) != cfg.domain.rank)
    throw Error("'cells' has " + std::to_string(cells.size()) +
                " entries but 'domain' has rank " +
                std::to_string(cfg.domain.rank));
  for (std::size_t i = 0; i < cells.size(); ++i) cfg.cells[i] = cells[i];

  if (!j.at("problem").is_string())
    throw Error("config key 'problem' must be a string");
  cfg.problem_name = j.at("problem").get<std::string>();

  if (j.contains("params")) {
    if (!j.at("params").is_object())
      throw Error("config key 'params' must be an object of strings");
    for (const auto& [key, value] : j.at("params").items()) {
      if (!value.is_string())
        throw Error("param '" + key + "' must be a string");
      cfg.problem_params[key] = value.get<std::string>();
    }
  }
  if (!cfg.problem_params.count("n"))
    cfg.problem_params["n"] = std::to_string(cfg.domain.rank);

  if (j.contains("boundary_mode")) {
    if (!j.at("boundary_mode").is_string())
      throw Error("config key 'boundary_mode' must be a string");
    cfg.boundary_mode =
        boundary_mode_from_string(j.at("boundary_mode").get<std::string>());
  }

  auto get_num = [&](const char* key, double& slot) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number())
      throw Error(std::string("config key '") + key + "' must be a number");
    slot = j.at(key).get<double>();
  };
  if (j.contains("max_iters")) {
    if (!j.at("max_iters").is_number_integer())
      throw Error("config key 'max_iters' must be an integer");
    cfg.optimizer.max_iters = j.at("max_iters").get<int>();
  }
  get_num("tol_grad", cfg.optimizer.tol_grad);
  get_num("armijo_c1", cfg.optimizer.armijo_c1);
  get_num("shrink", cfg.optimizer.shrink);
  get_num("step0", cfg.optimizer.step0);
  get_num("min_step", cfg.optimizer.min_step);
  cfg.optimizer.validate();

  if (j.contains("isoperimetric")) {
    const json& iso = j.at("isoperimetric");
    if (!iso.is_object())
      throw Error("config key 'isoperimetric' must be an object");
    static const std::vector<std::string> iso_keys = {"g0", "g1", "g2", "c"};
    require_keys(iso, iso_keys, " in 'isoperimetric'");
    IsoperimetricConstraint con;
    auto expr_of = [&](const char* key) {
      if (!iso.contains(key)) return zero_expression();
      if (!iso.at(key).is_string())
        throw Error(std::string("'isoperimetric.") + key +
                    "' must be an expression string");
      try {
        return parse_expression(iso.at(key).get<std::string>(), cfg.domain.rank);
      } catch (const ParseError& e) {
        throw Error(std::string("'isoperimetric.") + key + "': " + e.what());
      }
    };
    con.g0 = expr_of("g0");
    con.g1 = expr_of("g1");
    con.g2 = expr_of("g2");
    if (iso.contains("c")) {
      if (!iso.at("c").is_number())
        throw Error("'isoperimetric.c' must be a number");
      con.c = iso.at("c").get<double>();
    }
    cfg.isoperimetric = con;
  }

  if (j.contains("solution_csv")) {
    if (!j.at("solution_csv").is_string())
      throw Error("config key 'solution_csv' must be a string");
    cfg.solution_csv = j.at("solution_csv").get<std::string>();
  }
  if (j.contains("convergence_log")) {
    if (!j.at("convergence_log").is_string())
      throw Error("config key 'convergence_log' must be a string");
    cfg.convergence_log = j.at("convergence_log").get<std::string>();
  }

  // Build the problem once for validation of name/params/expressions.
  Problem p = cfg.make_problem();
  if (p.n != cfg.domain.rank)
    throw Error("problem rank " + std::to_string(p.n) +
                " does not match domain rank " + std::to_string(cfg.domain.rank));
  if (j.contains("d")) {
    if (!j.at("d").is_number_integer())
      throw Error("config key 'd' must be an integer");
    const int d = j.at("d").get<int>();
    if (d != p.d)
      throw Error("config key 'd'=" + std::to_string(d) + " but problem '" +
                  cfg.problem_name + "' has d=" + std::to_string(p.d));
  }
  if (cfg.isoperimetric && (p.n != 2 || p.d != 1))
    throw Error("isoperimetric constraints require a 2-D scalar problem");
  return cfg;
}

void write_csv(const std::string& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  const int n = f.rank();
  const int d = f.components();
  for (int i = 0; i < n; ++i) out << (i ? "," : "") << "x" << (i + 1);
  for (int c = 0; c < d; ++c) out << ",u" << (c + 1);
  out << "\n";
  std::array<double, kMaxRank> x{};
  const std::size_t points = f.point_count();
  for (std::size_t p = 0; p < points; ++p) {
    f.point_coords(p, std::span<double>(x.data(), static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) out << (i ? "," : "") << format_double(x[i]);
    for (int c = 0; c < d; ++c) out << "," << format_double(f.at(p, c));
    out << "\n";
  }
  if (!out) throw Error("write to '" + path + "' failed");
}

GridFunction read_csv(const std::string& path, const UniformGrid& grid,
                      Placement placement) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error("'" + path + "' is empty");
  const int n = grid.rank();
  std::size_t columns = 1 + std::count(line.begin(), line.end(), ',');
  if (columns <= static_cast<std::size_t>(n))
    throw Error("'" + path + "' header has " + std::to_string(columns) +
                " columns, need more than the " + std::to_string(n) +
                " coordinate columns");
  const int d = static_cast<int>(columns) - n;
  GridFunction f(grid, placement, d);
  const std::size_t points = f.point_count();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= points)
      throw Error("'" + path + "' has more rows than the grid's " +
                  std::to_string(points) + " points");
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      double value;
      try {
        value = std::stod(cell);
      } catch (const std::exception&) {
        throw Error("'" + path + "' row " + std::to_string(row + 2) +
                    ": malformed number '" + cell + "'");
      }
      if (col >= columns)
        throw Error("'" + path + "' row " + std::to_string(row + 2) +
                    " has too many columns");
      if (col >= static_cast<std::size_t>(n))
        f.at(row, static_cast<int>(col) - n) = value;
      ++col;
    }
    if (col != columns)
      throw Error("'" + path + "' row " + std::to_string(row + 2) + " has " +
                  std::to_string(col) + " columns, expected " +
                  std::to_string(columns));
    ++row;
  }
  if (row != points)
    throw Error("'" + path + "' has " + std::to_string(row) +
                " data rows but the grid has " + std::to_string(points) +
                " points");
  return f;
}

namespace {

void write_convergence_log(const std::string& path,
                           const std::vector<IterationRecord>& records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  for (const IterationRecord& r : records) {
    out << "{\"iter\":" << r.iter << ",\"F\":" << format_double(r.F)
        << ",\"grad_norm\":" << format_double(r.grad_norm)
        << ",\"step\":" << format_double(r.step) << "}\n";
  }
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace

int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Problem problem = config.make_problem();
    const UniformGrid grid = config.make_grid();
    DescentReport report =
        config.isoperimetric
            ? minimize_isoperimetric(problem, grid, config.optimizer,
                                     *config.isoperimetric)
            : minimize(problem, grid, config.optimizer);
    write_csv(config.solution_csv, report.final_u);
    write_convergence_log(config.convergence_log, report.iterations);
    out << "termination: " << to_string(report.termination) << "\n";
    out << "iterations: " << report.iterations.size() << "\n";
    if (!report.iterations.empty()) {
      const IterationRecord& last = report.iterations.back();
      out << "final F: " << format_double(last.F) << "\n";
      out << "final grad_norm: " << format_double(last.grad_norm) << "\n";
    }
    out << "solution: " << config.solution_csv << "\n";
    out << "log: " << config.convergence_log << "\n";
    switch (report.termination) {
      case Termination::GradientTolerance:
      case Termination::CriticalPointDetected:
        return 0;
      case Termination::MaxIterations:
        return 2;
      case Termination::LineSearchFailure:
        return 3;
    }
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_check_gradient(const RunConfig& config, std::ostream& out,
                       std::ostream& err) {
  try {
    const Problem problem = config.make_problem();
    const UniformGrid grid = config.make_grid();
    GridFunction v(grid, Placement::Cells, problem.d);

    std::mt19937 rng(20240817u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double eps_grid[] = {1e-4, 1e-5, 1e-6};

    out << "direction      eps            fd_value           analytic"
           "           rel_error\n";
    double best_rel = 1e300;
    bool degenerate = true;
    for (int k = 0; k < 3; ++k) {
      GridFunction h(grid, Placement::Cells, problem.d);
      for (double& x : h.data()) x = dist(rng);
      h = project_L0(h);
      const double hn = norm_l2(h);
      if (hn > 0.0) h *= 1.0 / hn;
      const GradientBundle bundle =
          boundary_mode_gradient(problem, v, problem.boundary_mode);
      const double analytic = inner_product_l2(bundle.G, h);
      for (double eps : eps_grid) {
        const double fd = fd_directional_derivative(problem, v, h, eps);
        const double scale = std::max({std::abs(fd), std::abs(analytic), 1e-14});
        const double rel = std::abs(fd - analytic) / scale;
        if (std::abs(analytic) > 1e-12 || std::abs(fd) > 1e-12)
          degenerate = false;
        best_rel = std::min(best_rel, rel);
        out << k + 1 << "              " << format_double(eps) << "    "
            << format_double(fd) << "    " << format_double(analytic) << "    "
            << format_double(rel) << "\n";
      }
    }
    if (degenerate) {
      out << "note: gradient vanishes identically at the test state; "
             "consistency is trivially satisfied\n";
      return 0;
    }
    out << "best relative error: " << format_double(best_rel) << "\n";
    return best_rel <= 1e-2 ? 0 : 4;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_project(const std::string& input_csv, const std::string& output_csv,
                const BoxDomain& domain, std::span<const int> cells,
                std::ostream& out, std::ostream& err) {
  try {
    const UniformGrid grid = build_grid(domain, cells);
    const GridFunction v = read_csv(input_csv, grid, Placement::Cells);
    const GridFunction w = project_L0(v);
    write_csv(output_csv, w);
    const L0Certificate cert = certify_L0(w, 1e-12);
    out << "projected: " << output_csv << "\n";
    out << "max slab residual: " << format_double(cert.max_slab_residual)
        << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_list_problems(std::ostream& out) {
  for (const std::string& name : builtin_problem_names()) out << name << "\n";
  return 0;
}

}  // namespace varidescent
