#include "varidescent/problem.hpp"

#include <cmath>

namespace varidescent {

std::string to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::AllSides:
      return "all_sides";
    case BoundaryMode::ThreeSides2D:
      return "three_sides_2d";
    case BoundaryMode::TwoAdjacent2D:
      return "two_adjacent_2d";
    case BoundaryMode::AdjacentCorner2D:
      return "adjacent_corner_2d";
  }
  return "?";
}

BoundaryMode boundary_mode_from_string(const std::string& name) {
  if (name == "all_sides") return BoundaryMode::AllSides;
  if (name == "three_sides_2d") return BoundaryMode::ThreeSides2D;
  if (name == "two_adjacent_2d") return BoundaryMode::TwoAdjacent2D;
  if (name == "adjacent_corner_2d") return BoundaryMode::AdjacentCorner2D;
  throw Error("unknown boundary mode '" + name +
              "' (expected all_sides, three_sides_2d, two_adjacent_2d, "
              "adjacent_corner_2d)");
}

void Problem::validate() const {
  if (n < 1 || n > kMaxRank) throw Error("Problem: rank out of range");
  if (d < 1) throw Error("Problem: component count must be positive");
  if (!lagrangian.value || !lagrangian.grad_u || !lagrangian.grad_z)
    throw Error("Problem: Lagrangian callbacks missing");
  if (boundary_mode != BoundaryMode::AllSides && n != 2)
    throw Error("Problem: boundary mode " + to_string(boundary_mode) +
                " requires rank 2");
  if (has_lift()) {
    if (static_cast<int>(lift.size()) != d ||
        static_cast<int>(lift_grad.size()) != d)
      throw Error("Problem: lift needs one expression per component");
    for (const auto& g : lift_grad)
      if (static_cast<int>(g.size()) != n)
        throw Error("Problem: lift gradient needs one expression per axis");
  }
  if (has_exact() && static_cast<int>(exact_solution.size()) != d)
    throw Error("Problem: exact solution needs one expression per component");
}

GridFunction Problem::lift_values(const UniformGrid& grid,
                                  Placement placement) const {
  if (!has_lift()) return GridFunction(grid, placement, d);
  return sample_expressions(lift, grid, placement);
}

std::vector<GridFunction> Problem::lift_gradient_cells(
    const UniformGrid& grid) const {
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    GridFunction gi(grid, Placement::Cells, d);
    if (has_lift()) {
      std::vector<AnalyticExpr> per_comp;
      per_comp.reserve(static_cast<std::size_t>(d));
      for (int j = 0; j < d; ++j)
        per_comp.push_back(lift_grad[static_cast<std::size_t>(j)]
                                    [static_cast<std::size_t>(i)]);
      gi = sample_expressions(per_comp, grid, Placement::Cells);
    }
    out.push_back(std::move(gi));
  }
  return out;
}

namespace {

double half_z_norm2(const double* z, int count) {
  double s = 0.0;
  for (int k = 0; k < count; ++k) s += z[k] * z[k];
  return 0.5 * s;
}

Lagrangian dirichlet_lagrangian(int n, int d) {
  Lagrangian lag;
  lag.value = [n, d](const double*, const double*, const double* z) {
    return half_z_norm2(z, d * n);
  };
  lag.grad_u = [d](const double*, const double*, const double*, double* du) {
    for (int j = 0; j < d; ++j) du[j] = 0.0;
  };
  lag.grad_z = [n, d](const double*, const double*, const double* z, double* dz) {
    for (int k = 0; k < d * n; ++k) dz[k] = z[k];
  };
  return lag;
}

const std::string kSineProduct = "sin(pi*x1)*sin(pi*x2)";

}  // namespace

Problem builtin_problem(const std::string& name,
                        const std::map<std::string, std::string>& params) {
  static const std::map<std::string, int> known_names = {
      {"dirichlet", 0}, {"poisson", 0}, {"nonlinear_poisson", 0},
      {"coupled_vector", 0}};
  if (!known_names.count(name)) throw Error("unknown problem '" + name + "'");
  for (const auto& [key, value] : params) {
    (void)value;
    if (key != "n" && key != "g" && key != "exact")
      throw Error("unknown parameter '" + key + "' for problem '" + name + "'");
  }

  Problem p;
  p.name = name;
  p.n = 2;
  if (auto it = params.find("n"); it != params.end()) {
    try {
      p.n = std::stoi(it->second);
    } catch (const std::exception&) {
      throw Error("malformed parameter n='" + it->second + "'");
    }
    if (p.n < 1 || p.n > kMaxRank) throw Error("parameter n out of range");
  }

  if (name == "dirichlet") {
    p.d = 1;
    p.lagrangian = dirichlet_lagrangian(p.n, p.d);
    p.exact_solution = {zero_expression()};
  } else if (name == "poisson" || name == "nonlinear_poisson") {
    p.d = 1;
    const bool nonlinear = name == "nonlinear_poisson";
    std::string g_src;
    bool default_data = true;
    if (auto it = params.find("g"); it != params.end()) {
      g_src = it->second;
      default_data = false;
    } else {
      if (p.n != 2)
        throw Error("problem '" + name + "' needs an explicit g when n != 2");
      g_src = nonlinear ? "2*pi^2*" + kSineProduct + " + (" + kSineProduct + ")^3"
                        : "2*pi^2*" + kSineProduct;
    }
    AnalyticExpr g = parse_expression(g_src, p.n);
    const int n = p.n;
    Lagrangian lag;
    lag.value = [g, n, nonlinear](const double* x, const double* u,
                                  const double* z) {
      const double gv = g.evaluate(std::span<const double>(x, static_cast<std::size_t>(n)));
      double f = half_z_norm2(z, n) - gv * u[0];
      if (nonlinear) f += 0.25 * u[0] * u[0] * u[0] * u[0];
      return f;
    };
    lag.grad_u = [g, n, nonlinear](const double* x, const double* u,
                                   const double*, double* du) {
      const double gv = g.evaluate(std::span<const double>(x, static_cast<std::size_t>(n)));
      du[0] = -gv;
      if (nonlinear) du[0] += u[0] * u[0] * u[0];
    };
    lag.grad_z = [n](const double*, const double*, const double* z, double* dz) {
      for (int k = 0; k < n; ++k) dz[k] = z[k];
    };
    p.lagrangian = lag;
    if (default_data)
      p.exact_solution = {parse_expression(kSineProduct, p.n)};
  } else {  // coupled_vector
    p.d = 2;
    const int n = p.n;
    Lagrangian lag;
    lag.value = [n](const double*, const double* u, const double* z) {
      return half_z_norm2(z, 2 * n) + u[0] * u[1];
    };
    lag.grad_u = [](const double*, const double* u, const double*, double* du) {
      du[0] = u[1];
      du[1] = u[0];
    };
    lag.grad_z = [n](const double*, const double*, const double* z, double* dz) {
      for (int k = 0; k < 2 * n; ++k) dz[k] = z[k];
    };
    p.lagrangian = lag;
  }

  if (auto it = params.find("exact"); it != params.end())
    p.exact_solution = {parse_expression(it->second, p.n)};

  p.validate();
  return p;
}

std::vector<std::string> builtin_problem_names() {
  return {"dirichlet", "poisson", "nonlinear_poisson", "coupled_vector"};
}

}  // namespace varidescent
