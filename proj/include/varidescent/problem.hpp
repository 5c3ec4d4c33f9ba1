#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "varidescent/expr.hpp"
#include "varidescent/grid.hpp"

namespace varidescent {

/// Which part of the boundary carries prescribed values. The three partial
/// modes are 2-D only.
enum class BoundaryMode {
  AllSides,         // u fixed on all of the boundary
  ThreeSides2D,     // free on the top side x2 = b2
  TwoAdjacent2D,    // fixed on x1 = a1 and x2 = a2 only
  AdjacentCorner2D  // fixed on x1 = a1 and x2 = b2
};

std::string to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(const std::string& name);

/// Pointwise Lagrangian f(x, u, z) with its partial derivatives.
/// Layouts: x has n entries, u has d entries, z has d*n entries with
/// z[j*n + i] = du_j/dx_i. Callbacks must be reentrant.
struct Lagrangian {
  std::function<double(const double* x, const double* u, const double* z)> value;
  std::function<void(const double* x, const double* u, const double* z,
                     double* df_du)>
      grad_u;  // writes d entries
  std::function<void(const double* x, const double* u, const double* z,
                     double* df_dz)>
      grad_z;  // writes d*n entries
};

/// A variational problem: minimize int f(x, u, grad u) dx over u = ubar + T v.
struct Problem {
  std::string name;
  int n = 0;  // spatial rank
  int d = 1;  // components of u
  Lagrangian lagrangian;
  BoundaryMode boundary_mode = BoundaryMode::AllSides;

  /// Boundary lift ubar, one expression per component, with its analytic
  /// gradient d(ubar_j)/dx_i. Empty means ubar = 0.
  std::vector<AnalyticExpr> lift;
  std::vector<std::vector<AnalyticExpr>> lift_grad;  // [component][axis]

  /// Known minimizer, one expression per component; empty if unknown.
  std::vector<AnalyticExpr> exact_solution;

  bool has_lift() const { return !lift.empty(); }
  bool has_exact() const { return !exact_solution.empty(); }
  void validate() const;

  /// ubar sampled on the grid (d components); zeros when there is no lift.
  GridFunction lift_values(const UniformGrid& grid, Placement placement) const;
  /// grad ubar at cell centers, one d-component field per axis.
  std::vector<GridFunction> lift_gradient_cells(const UniformGrid& grid) const;
};

/// Named test problems:
///   "dirichlet"         f = |z|^2 / 2
///   "poisson"           f = |z|^2 / 2 - g u     (default g makes
///                       sin(pi x1) sin(pi x2) the exact solution)
///   "nonlinear_poisson" f = |z|^2 / 2 + u^4 / 4 - g u (manufactured so the
///                       same sine product stays exact)
///   "coupled_vector"    d = 2, f = |z1|^2 / 2 + |z2|^2 / 2 + u1 u2
/// Recognized params: "n" (rank, default 2), "g" (source expression),
/// "exact" (overrides the stored exact solution).
Problem builtin_problem(const std::string& name,
                        const std::map<std::string, std::string>& params = {});

std::vector<std::string> builtin_problem_names();

}  // namespace varidescent
