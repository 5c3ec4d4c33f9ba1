#pragma once

#include <optional>
#include <vector>

#include "varidescent/descent.hpp"

namespace varidescent {

/// Backtracking-descent settings. All defaults as documented.
struct OptimizerConfig {
  int max_iters = 500;
  double tol_grad = 1e-6;
  double armijo_c1 = 1e-4;
  double shrink = 0.5;
  double step0 = 1.0;
  double min_step = 1e-14;

  void validate() const;
};

enum class Termination {
  GradientTolerance,
  MaxIterations,
  LineSearchFailure,
  CriticalPointDetected
};

std::string to_string(Termination t);

/// One accepted iteration of the descent loop.
struct IterationRecord {
  int iter = 0;
  double F = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
};

struct DescentReport {
  std::vector<IterationRecord> iterations;
  GridFunction final_v;  // cells
  GridFunction final_u;  // nodes, ubar + lift(final_v)
  Termination termination = Termination::MaxIterations;
};

/// Largest alpha in {step0 * shrink^k} satisfying the sufficient-decrease
/// inequality F(v + alpha h) <= F(v) + c1 alpha <G, h>, h = -G/||G||.
/// Empty when no step >= min_step qualifies.
std::optional<double> armijo_search(const Problem& problem,
                                    const GridFunction& v,
                                    const GradientBundle& bundle,
                                    const OptimizerConfig& config);

/// Steepest descent on F(v) from v0 (zero field when absent). v0 is
/// projected onto the feasible space first when its L0 certificate exceeds
/// 1e-10 (AllSides mode only; partial modes are unconstrained).
DescentReport minimize(const Problem& problem, const UniformGrid& grid,
                       const OptimizerConfig& config,
                       const std::optional<GridFunction>& v0 = std::nullopt);

/// Variant with a linear isoperimetric constraint (2-D scalar, AllSides):
/// descends along the tangent direction of J(u) = c.
DescentReport minimize_isoperimetric(const Problem& problem,
                                     const UniformGrid& grid,
                                     const OptimizerConfig& config,
                                     const IsoperimetricConstraint& constraint,
                                     const std::optional<GridFunction>& v0 =
                                         std::nullopt);

}  // namespace varidescent
