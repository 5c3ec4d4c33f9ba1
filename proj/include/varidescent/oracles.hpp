#pragma once

#include <span>
#include <utility>
#include <vector>

#include "varidescent/descent.hpp"

namespace varidescent {

/// Node-grid error norms against an analytic field.
struct ErrorSummary {
  double l2_error = 0.0;
  double max_error = 0.0;
  double h = 0.0;  // largest grid spacing
};

/// Central finite difference (F(v + eps h) - F(v - eps h)) / (2 eps).
double fd_directional_derivative(const Problem& problem, const GridFunction& v,
                                 const GridFunction& h, double eps);

/// Brute-force projection onto the slab-constrained subspace by dense
/// least squares (normal equations over the constraint system). Grids are
/// capped at 33^n cells.
GridFunction projection_oracle(const GridFunction& v);

/// Trapezoid L2 and max-norm node errors of u against per-component
/// analytic expressions.
ErrorSummary error_vs_exact(const GridFunction& u,
                            std::span<const AnalyticExpr> exact);

/// Least-squares slope of log(error) against log(h); needs >= 3 levels.
double convergence_order(std::span<const std::pair<double, double>> errors);

/// The 2-D average-subtraction steepest-descent formula, written as raw
/// loops independent of project_L0: Q minus row means minus column means
/// plus the grand mean, negated to point downhill.
GridFunction dsd_closed_form_2d(const GridFunction& q);

}  // namespace varidescent
