#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "varidescent/grid.hpp"

using namespace varidescent;

namespace {

BoxDomain unit_box(int n) {
  std::vector<double> lo(n, 0.0), hi(n, 1.0);
  return BoxDomain(lo, hi);
}

}  // namespace

TEST_CASE("box domain validation") {
  CHECK_THROWS_AS(BoxDomain(std::vector<double>{0.0}, std::vector<double>{0.0}),
                  Error);
  CHECK_THROWS_AS(BoxDomain(std::vector<double>{1.0}, std::vector<double>{0.0}),
                  Error);
  CHECK_THROWS_AS(
      BoxDomain(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(BoxDomain(std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)),
                  Error);
  BoxDomain box(std::vector<double>{0.0, -1.0}, std::vector<double>{2.0, 1.0});
  CHECK(box.rank == 2);
  CHECK(box.length(0) == doctest::Approx(2.0));
  CHECK(box.volume() == doctest::Approx(4.0));
}

TEST_CASE("build_grid basics") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{4, 4});
  CHECK(g.spacing[0] == doctest::Approx(0.25));
  CHECK(g.spacing[1] == doctest::Approx(0.25));
  CHECK(g.node_count() == 25);
  CHECK(g.cell_count() == 16);

  BoxDomain rect(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 2.0});
  UniformGrid g2 = build_grid(rect, std::vector<int>{2, 4});
  CHECK(g2.spacing[0] == doctest::Approx(0.5));
  CHECK(g2.spacing[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(build_grid(unit_box(2), std::vector<int>{1, 4}), Error);
  CHECK_THROWS_AS(build_grid(unit_box(2), std::vector<int>{4}), Error);
}

TEST_CASE("grid function layout: x1 fastest, interleaved components") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{3, 2});
  GridFunction f(g, Placement::Cells, 2);
  CHECK(f.point_count() == 6);
  CHECK(f.size() == 12);
  const int idx[2] = {2, 1};
  CHECK(f.flat_index(std::span<const int>(idx, 2)) == 5);
  int back[2] = {0, 0};
  f.unflatten(5, std::span<int>(back, 2));
  CHECK(back[0] == 2);
  CHECK(back[1] == 1);
  double x[2];
  f.point_coords(5, std::span<double>(x, 2));
  CHECK(x[0] == doctest::Approx(g.cell_coord(0, 2)));
  CHECK(x[1] == doctest::Approx(g.cell_coord(1, 1)));
}

TEST_CASE("mixed placement extents") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{4, 3});
  std::array<Placement, kMaxRank> pl{};
  pl[0] = Placement::Nodes;
  pl[1] = Placement::Cells;
  GridFunction f(g, pl, 1);
  CHECK(f.extent(0) == 5);
  CHECK(f.extent(1) == 3);
  CHECK(f.point_count() == 15);
  CHECK(f.coord(0, 0) == doctest::Approx(0.0));
  CHECK(f.coord(1, 0) == doctest::Approx(g.cell_coord(1, 0)));
}

TEST_CASE("pairwise sum matches sequential accumulation") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> xs(1000);
  for (double& x : xs) x = dist(rng);
  const double ref = std::accumulate(xs.begin(), xs.end(), 0.0);
  CHECK(pairwise_sum(xs) == doctest::Approx(ref).epsilon(1e-12));
  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("inner product: unit field over unit square") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{8, 8});
  GridFunction f(g, Placement::Cells, 1);
  for (double& x : f.data()) x = 1.0;
  CHECK(inner_product_l2(f, f) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("inner product: odd reflection integrates to zero") {
  UniformGrid g = build_grid(unit_box(1), std::vector<int>{16});
  GridFunction one(g, Placement::Cells, 1);
  GridFunction odd(g, Placement::Cells, 1);
  for (std::size_t p = 0; p < odd.point_count(); ++p) {
    one.at(p, 0) = 1.0;
    odd.at(p, 0) = g.cell_coord(0, static_cast<int>(p)) - 0.5;
  }
  CHECK(std::abs(inner_product_l2(one, odd)) < 1e-14);
}

TEST_CASE("inner product: sin^2 integral") {
  UniformGrid g = build_grid(unit_box(1), std::vector<int>{64});
  GridFunction f(g, Placement::Cells, 1);
  for (std::size_t p = 0; p < f.point_count(); ++p)
    f.at(p, 0) = std::sin(M_PI * g.cell_coord(0, static_cast<int>(p)));
  CHECK(inner_product_l2(f, f) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("inner product symmetry, bilinearity, positivity") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{5, 7});
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridFunction f(g, Placement::Cells, 2), h(g, Placement::Cells, 2),
      k(g, Placement::Cells, 2);
  for (double& x : f.data()) x = dist(rng);
  for (double& x : h.data()) x = dist(rng);
  for (double& x : k.data()) x = dist(rng);
  CHECK(inner_product_l2(f, h) == doctest::Approx(inner_product_l2(h, f)));
  GridFunction fh = f;
  fh.axpy(2.5, h);
  CHECK(inner_product_l2(fh, k) ==
        doctest::Approx(inner_product_l2(f, k) + 2.5 * inner_product_l2(h, k))
            .epsilon(1e-12));
  CHECK(inner_product_l2(f, f) > 0.0);
  GridFunction z(g, Placement::Cells, 2);
  CHECK(inner_product_l2(z, z) == 0.0);
}

TEST_CASE("midpoint rule exact on per-axis linear polynomials") {
  BoxDomain box(std::vector<double>{0.5, -1.0}, std::vector<double>{2.0, 3.0});
  UniformGrid g = build_grid(box, std::vector<int>{6, 9});
  GridFunction f(g, Placement::Cells, 1);
  GridFunction one(g, Placement::Cells, 1);
  double x[2];
  for (std::size_t p = 0; p < f.point_count(); ++p) {
    f.point_coords(p, std::span<double>(x, 2));
    f.at(p, 0) = (2.0 * x[0] - 1.0) * (0.5 * x[1] + 3.0);
    one.at(p, 0) = 1.0;
  }
  // int over [0.5,2] of 2x-1 = 2.25; int over [-1,3] of x/2+3 = 14
  CHECK(inner_product_l2(f, one) == doctest::Approx(2.25 * 14.0).epsilon(1e-12));
}

TEST_CASE("trapezoid inner product on nodes") {
  UniformGrid g = build_grid(unit_box(1), std::vector<int>{4});
  GridFunction f(g, Placement::Nodes, 1);
  for (double& x : f.data()) x = 1.0;
  CHECK(inner_product_l2(f, f) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mismatched layouts are rejected") {
  UniformGrid g = build_grid(unit_box(2), std::vector<int>{4, 4});
  GridFunction a(g, Placement::Cells, 1);
  GridFunction b(g, Placement::Nodes, 1);
  GridFunction c(g, Placement::Cells, 2);
  CHECK_THROWS_AS((void)inner_product_l2(a, b), Error);
  CHECK_THROWS_AS((void)inner_product_l2(a, c), Error);
  CHECK_THROWS_AS(a += b, Error);
}

TEST_CASE("require_finite rejects NaN") {
  UniformGrid g = build_grid(unit_box(1), std::vector<int>{4});
  GridFunction f(g, Placement::Cells, 1);
  f.at(2, 0) = std::nan("");
  CHECK_THROWS_AS(f.require_finite("test"), Error);
}
