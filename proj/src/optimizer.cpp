#include "varidescent/optimizer.hpp"

#include <cmath>
#include <functional>

namespace varidescent {

void OptimizerConfig::validate() const {
  if (max_iters < 0) throw Error("OptimizerConfig: max_iters must be >= 0");
  if (!(tol_grad >= 0.0)) throw Error("OptimizerConfig: tol_grad must be >= 0");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0))
    throw Error("OptimizerConfig: armijo_c1 must be in (0, 1)");
  if (!(shrink > 0.0 && shrink < 1.0))
    throw Error("OptimizerConfig: shrink must be in (0, 1)");
  if (!(step0 > 0.0)) throw Error("OptimizerConfig: step0 must be > 0");
  if (!(min_step >= 0.0)) throw Error("OptimizerConfig: min_step must be >= 0");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance:
      return "gradient_tolerance";
    case Termination::MaxIterations:
      return "max_iterations";
    case Termination::LineSearchFailure:
      return "line_search_failure";
    case Termination::CriticalPointDetected:
      return "critical_point_detected";
  }
  return "?";
}

namespace {

std::optional<double> armijo_search_impl(
    const Problem& problem, const GridFunction& v, const GradientBundle& bundle,
    const OptimizerConfig& config) {
  if (!(bundle.grad_norm > 0.0))
    throw Error("armijo_search: gradient norm must be positive");
  GridFunction h = bundle.G;
  h *= -1.0 / bundle.grad_norm;
  // <G, h> = -||G|| for the normalized steepest direction.
  const double slope = -bundle.grad_norm;
  const double f0 = bundle.functional_value;
  double alpha = config.step0;
  while (alpha >= config.min_step) {
    GridFunction trial = v;
    trial.axpy(alpha, h);
    double f_trial;
    try {
      f_trial = [&] {
        // Evaluate under the bundle's mode so partial-boundary runs search
        // along the same functional they differentiate.
        Problem probe = problem;
        probe.boundary_mode = bundle.mode;
        return evaluate_functional(probe, trial);
      }();
    } catch (const Error&) {
      alpha *= config.shrink;
      continue;
    }
    if (f_trial <= f0 + config.armijo_c1 * alpha * slope) return alpha;
    alpha *= config.shrink;
  }
  return std::nullopt;
}

DescentReport run_descent(
    const Problem& problem, const UniformGrid& grid,
    const OptimizerConfig& config, const std::optional<GridFunction>& v0,
    const std::function<GradientBundle(const GridFunction&)>& gradient) {
  config.validate();
  problem.validate();
  if (grid.rank() != problem.n)
    throw Error("minimize: grid rank does not match problem rank");

  GridFunction v = v0 ? *v0 : GridFunction(grid, Placement::Cells, problem.d);
  if (!v.uniform_placement(Placement::Cells))
    throw Error("minimize: v0 must be cell-placed");
  if (!(v.grid() == grid)) throw Error("minimize: v0 grid mismatch");
  if (v.components() != problem.d)
    throw Error("minimize: v0 component count mismatch");

  const bool constrained = problem.boundary_mode == BoundaryMode::AllSides;
  if (constrained && v0) {
    const L0Certificate cert = certify_L0(v, 1e-10);
    if (!cert.passes()) v = project_L0(v);
  }

  DescentReport report;
  auto finish = [&](Termination t) {
    report.termination = t;
    report.final_v = v;
    report.final_u = lift_to_nodes(problem, v);
    return report;
  };

  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (constrained && iter > 0 && iter % 50 == 0) v = project_L0(v);
    const GradientBundle bundle = gradient(v);
    if (bundle.grad_norm == 0.0) return finish(Termination::CriticalPointDetected);
    if (bundle.grad_norm <= config.tol_grad) {
      report.iterations.push_back(
          {iter, bundle.functional_value, bundle.grad_norm, 0.0});
      return finish(Termination::GradientTolerance);
    }
    const std::optional<double> alpha =
        armijo_search_impl(problem, v, bundle, config);
    if (!alpha) {
      report.iterations.push_back(
          {iter, bundle.functional_value, bundle.grad_norm, 0.0});
      return finish(Termination::LineSearchFailure);
    }
    v.axpy(-*alpha / bundle.grad_norm, bundle.G);
    report.iterations.push_back(
        {iter, bundle.functional_value, bundle.grad_norm, *alpha});
  }
  return finish(Termination::MaxIterations);
}

}  // namespace

std::optional<double> armijo_search(const Problem& problem,
                                    const GridFunction& v,
                                    const GradientBundle& bundle,
                                    const OptimizerConfig& config) {
  config.validate();
  return armijo_search_impl(problem, v, bundle, config);
}

DescentReport minimize(const Problem& problem, const UniformGrid& grid,
                       const OptimizerConfig& config,
                       const std::optional<GridFunction>& v0) {
  return run_descent(problem, grid, config, v0, [&](const GridFunction& v) {
    return boundary_mode_gradient(problem, v, problem.boundary_mode);
  });
}

DescentReport minimize_isoperimetric(const Problem& problem,
                                     const UniformGrid& grid,
                                     const OptimizerConfig& config,
                                     const IsoperimetricConstraint& constraint,
                                     const std::optional<GridFunction>& v0) {
  return run_descent(problem, grid, config, v0, [&](const GridFunction& v) {
    return isoperimetric_direction(problem, constraint, v);
  });
}

}  // namespace varidescent
