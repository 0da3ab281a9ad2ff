#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lkreg/grid.hpp"
#include "oracles.hpp"

using namespace lkreg;

TEST_CASE("grid coordinates are symmetric and span the square") {
  auto g = make_grid(17, 1.5);
  CHECK(g->coord(0) == -1.5);
  CHECK(g->coord(16) == 1.5);
  CHECK(g->coord(8) == 0.0);
  for (std::size_t k = 0; k < 17; ++k) CHECK(g->coord(k) == -g->coord(16 - k));
  CHECK(g->spacing() == doctest::Approx(3.0 / 16.0));
}

TEST_CASE("grid rejects even or tiny sides") {
  CHECK_THROWS_AS(make_grid(4, 1.0), UsageError);
  CHECK_THROWS_AS(make_grid(1, 1.0), UsageError);
  CHECK_THROWS_AS(make_grid(5, 0.0), UsageError);
}

TEST_CASE("disc mask is strict") {
  auto g = make_grid(5, 1.0);
  CHECK_FALSE(g->in_disc(g->index(2, 4)));  // (1, 0) on the circle
  CHECK(g->in_disc(g->index(2, 2)));
  CHECK(g->in_disc(g->index(3, 3)));  // |(0.5, 0.5)| < 1
  CHECK_FALSE(g->in_disc(g->index(0, 0)));
}

TEST_CASE("field arithmetic and grid checks") {
  auto g = make_grid(5, 1.0);
  ScalarField a(g, 2.0);
  ScalarField b(g, 3.0);
  CHECK((a + b)[7] == 5.0);
  CHECK((a - b)[7] == -1.0);
  CHECK((2.0 * b)[7] == 6.0);
  a.add_scaled(-2.0, b);
  CHECK(a[0] == -4.0);
  ScalarField c(make_grid(7, 1.0));
  CHECK_THROWS_AS(a += c, UsageError);
  CHECK(l2_inner(b, b) == doctest::Approx(9.0 * 25 * g->cell_area()));
}

TEST_CASE("bilinear interpolation reproduces bilinear functions") {
  auto g = make_grid(9, 1.0);
  ScalarField f(g);
  auto fn = [](Point p) { return 1.0 + 2.0 * p.x - 0.5 * p.y + 0.75 * p.x * p.y; };
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t c = 0; c < 9; ++c) f.at(r, c) = fn(g->node(r, c));
  for (Point p : {Point{0.1, 0.2}, Point{-0.93, 0.41}, Point{0.999, -0.999}, Point{1.0, 1.0}}) {
    CHECK(interpolate_bilinear(f, p) == doctest::Approx(fn(p)).epsilon(1e-14));
  }
  CHECK(interpolate_bilinear(f, {1.01, 0.0}) == 0.0);
}

TEST_CASE("discrete Laplacian of |xi|^2 is 4") {
  auto g = make_grid(21, 1.0);
  ScalarField f(g);
  for (std::size_t r = 0; r < 21; ++r)
    for (std::size_t c = 0; c < 21; ++c) {
      const Point p = g->node(r, c);
      f.at(r, c) = p.x * p.x + p.y * p.y;
    }
  const ScalarField lap = laplacian_apply(f);
  for (std::size_t r = 1; r < 20; ++r)
    for (std::size_t c = 1; c < 20; ++c) CHECK(lap.at(r, c) == doctest::Approx(4.0).epsilon(1e-11));
  CHECK(lap.at(0, 5) == 0.0);
}

TEST_CASE("masked Laplacian is symmetric and vanishes off the disc") {
  auto g = make_grid(11, 1.0);
  std::vector<std::size_t> mask;
  const Eigen::MatrixXd b = oracle::dense_h1_gram(g, mask);
  CHECK((b - b.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(b.ldlt().isPositive());
  const ScalarField lap = laplacian_apply_masked(oracle::random_field(g, 3, false));
  for (std::size_t k = 0; k < lap.size(); ++k) {
    if (!g->in_disc(k)) CHECK(lap[k] == 0.0);
  }
}

TEST_CASE("Helmholtz solve meets its residual bound") {
  auto g = make_grid(33, 1.0);
  const ScalarField rhs = oracle::random_field(g, 11);
  EllipticReport rep;
  const ScalarField q = helmholtz_solve(rhs, nullptr, &rep);
  ScalarField res = q - laplacian_apply_masked(q);
  res -= rhs;
  CHECK(l2_norm(res) <= 1e-9 * l2_norm(rhs));
  CHECK(rep.relative_residual <= kHelmholtzTolerance);
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (!g->in_disc(k)) CHECK(q[k] == 0.0);
  }
  // warm start from the answer converges immediately
  EllipticReport warm;
  helmholtz_solve(rhs, &q, &warm);
  CHECK(warm.iterations <= 1);
}

TEST_CASE("Helmholtz solve converges on a manufactured solution") {
  // u = (1 - r^2)^2 vanishes with its gradient on the circle, so the node
  // mask boundary costs little.
  auto error_at = [](std::size_t m) {
    auto g = make_grid(m, 1.0);
    ScalarField rhs(g);
    ScalarField exact(g);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) {
        const Point p = g->node(r, c);
        const double s = p.x * p.x + p.y * p.y;
        const double u = (1 - s) * (1 - s);
        const double lap = 16.0 * s - 8.0;  // Delta (1-s)^2
        exact.at(r, c) = u;
        rhs.at(r, c) = u - lap;
      }
    rhs.restrict_to_disc();
    exact.restrict_to_disc();
    return l2_norm(helmholtz_solve(rhs) - exact) / l2_norm(exact);
  };
  const double e1 = error_at(17);
  const double e2 = error_at(33);
  const double e3 = error_at(65);
  CHECK(e2 < e1);
  CHECK(e3 < e2);
  CHECK(e3 < 0.01);
}

TEST_CASE("H1 inner product is symmetric and dominates L2") {
  auto g = make_grid(15, 1.0);
  const ScalarField u = oracle::random_field(g, 1);
  const ScalarField v = oracle::random_field(g, 2);
  CHECK(h1_inner(u, v) == doctest::Approx(h1_inner(v, u)).epsilon(1e-13));
  CHECK(h1_inner(u, u) >= l2_inner(u, u));
}

TEST_CASE("doping from an exponential of a quadratic is exact") {
  // ln x = a|xi|^2 has discrete Laplacian 4a exactly.
  auto g = make_grid(17, 1.0);
  const double a = 0.7;
  const double lambda = 0.3;
  ScalarField x(g);
  for (std::size_t r = 0; r < 17; ++r)
    for (std::size_t c = 0; c < 17; ++c) {
      const Point p = g->node(r, c);
      x.at(r, c) = std::exp(a * (p.x * p.x + p.y * p.y));
    }
  const ScalarField dop = doping_from_state(x, lambda);
  for (std::size_t r = 1; r < 16; ++r)
    for (std::size_t c = 1; c < 16; ++c)
      CHECK(dop.at(r, c) == doctest::Approx(x.at(r, c) - 4 * a * lambda * lambda).epsilon(1e-12));
  x[40] = 0.0;
  CHECK_THROWS_AS(doping_from_state(x, lambda), NumericalError);
}

TEST_CASE("signal samplings") {
  const auto u = SignalSampling::uniform(11, -1.0, 1.0);
  double sum = 0.0;
  for (double w : u.weights()) sum += w;
  CHECK(sum == doctest::Approx(2.0));
  CHECK(u.nodes()[5] == 0.0);
  CHECK(u.nodes()[0] == -1.0);
  const auto r = SignalSampling::radial(33, 2.0);
  sum = 0.0;
  for (double w : r.weights()) sum += w;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));  // integral of t dt on [0, 2]
  CHECK(r.weights()[0] == 0.0);
  CHECK_THROWS_AS(SignalSampling::uniform(1, 0.0, 1.0), UsageError);
  const Signal a{1, 2, 3};
  const Signal b{1, 2};
  CHECK_THROWS_AS(weighted_inner(a, b, a), UsageError);
}
