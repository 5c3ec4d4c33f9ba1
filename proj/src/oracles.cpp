#include "varidescent/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace varidescent {

double fd_directional_derivative(const Problem& problem, const GridFunction& v,
                                 const GridFunction& h, double eps) {
  if (!(eps > 0.0)) throw Error("fd_directional_derivative: eps must be > 0");
  GridFunction plus = v;
  plus.axpy(eps, h);
  GridFunction minus = v;
  minus.axpy(-eps, h);
  return (evaluate_functional(problem, plus) -
          evaluate_functional(problem, minus)) /
         (2.0 * eps);
}

GridFunction projection_oracle(const GridFunction& v) {
  if (!v.uniform_placement(Placement::Cells))
    throw Error("projection_oracle: input must be cell-placed");
  const int n = v.rank();
  const UniformGrid& grid = v.grid();
  std::size_t cells = grid.cell_count();
  std::size_t cap = 1;
  for (int i = 0; i < n; ++i) cap *= 33;
  if (cells > cap) throw Error("projection_oracle: grid too large for dense solve");

  // Constraint rows: for every axis i and every fixed index combination of
  // the other axes, sum_k v over the full line along axis i equals zero.
  // The projection of v is v - A^T (A A^T)^{-1} A v because all rows carry
  // the same quadrature weight along a line (uniform grid).
  std::size_t rows = 0;
  for (int i = 0; i < n; ++i) {
    std::size_t others = cells / static_cast<std::size_t>(grid.cells[i]);
    rows += others;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cells));
  std::array<int, kMaxRank> idx{};
  std::size_t row = 0;
  for (int i = 0; i < n; ++i) {
    // Iterate over all cells; the row is identified by zeroing index i.
    // Assign each line a unique row by an odometer over the other axes.
    std::array<int, kMaxRank> oidx{};
    bool done = false;
    while (!done) {
      for (int k = 0; k < grid.cells[i]; ++k) {
        idx = oidx;
        idx[i] = k;
        const std::size_t p = v.flat_index(
            std::span<const int>(idx.data(), static_cast<std::size_t>(n)));
        A(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(p)) = 1.0;
      }
      ++row;
      done = true;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        if (++oidx[j] < grid.cells[j]) {
          done = false;
          break;
        }
        oidx[j] = 0;
      }
    }
  }

  const int d = v.components();
  GridFunction out = v;
  Eigen::MatrixXd gram = A * A.transpose();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  for (int c = 0; c < d; ++c) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(cells));
    for (std::size_t p = 0; p < cells; ++p)
      x(static_cast<Eigen::Index>(p)) = v.at(p, c);
    Eigen::VectorXd resid = A * x;
    Eigen::VectorXd mult = cod.solve(resid);
    Eigen::VectorXd w = x - A.transpose() * mult;
    for (std::size_t p = 0; p < cells; ++p)
      out.at(p, c) = w(static_cast<Eigen::Index>(p));
  }
  return out;
}

ErrorSummary error_vs_exact(const GridFunction& u,
                            std::span<const AnalyticExpr> exact) {
  if (!u.uniform_placement(Placement::Nodes))
    throw Error("error_vs_exact: field must be node-placed");
  if (static_cast<int>(exact.size()) != u.components())
    throw Error("error_vs_exact: one expression per component required");
  GridFunction ref = sample_expressions(
      std::vector<AnalyticExpr>(exact.begin(), exact.end()), u.grid(),
      Placement::Nodes);
  GridFunction diff = u;
  diff -= ref;
  ErrorSummary s;
  s.l2_error = norm_l2(diff);
  s.max_error = diff.max_abs();
  for (int i = 0; i < u.rank(); ++i)
    s.h = std::max(s.h, u.grid().spacing[i]);
  return s;
}

double convergence_order(std::span<const std::pair<double, double>> errors) {
  if (errors.size() < 3)
    throw Error("convergence_order: need at least 3 levels");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(errors.size());
  for (const auto& [h, e] : errors) {
    if (!(h > 0.0)) throw Error("convergence_order: h must be > 0");
    const double x = std::log(h);
    const double y = e > 0.0 ? std::log(e) : std::log(1e-300);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

GridFunction dsd_closed_form_2d(const GridFunction& q) {
  if (q.rank() != 2) throw Error("dsd_closed_form_2d: requires rank 2");
  if (!q.uniform_placement(Placement::Cells))
    throw Error("dsd_closed_form_2d: requires cell placement");
  const int n1 = q.grid().cells[0];
  const int n2 = q.grid().cells[1];
  const int d = q.components();
  GridFunction out = q;
  for (int c = 0; c < d; ++c) {
    for (int j = 0; j < n2; ++j) {
      for (int i = 0; i < n1; ++i) {
        double row_mean = 0.0, col_mean = 0.0, grand_mean = 0.0;
        for (int ii = 0; ii < n1; ++ii)
          row_mean += q.at(static_cast<std::size_t>(j) * n1 + ii, c);
        row_mean /= n1;
        for (int jj = 0; jj < n2; ++jj)
          col_mean += q.at(static_cast<std::size_t>(jj) * n1 + i, c);
        col_mean /= n2;
        for (int jj = 0; jj < n2; ++jj)
          for (int ii = 0; ii < n1; ++ii)
            grand_mean += q.at(static_cast<std::size_t>(jj) * n1 + ii, c);
        grand_mean /= static_cast<double>(n1) * n2;
        const std::size_t p = static_cast<std::size_t>(j) * n1 + i;
        out.at(p, c) =
            -(q.at(p, c) - row_mean - col_mean + grand_mean);
      }
    }
  }
  return out;
}

}  // namespace varidescent
