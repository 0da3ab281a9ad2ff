#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lkreg/schlieren.hpp"
#include "oracles.hpp"

using namespace lkreg;

TEST_CASE("direction set") {
  DirectionSet d(4);
  CHECK(d.angle(2) == doctest::Approx(std::numbers::pi / 2));
  const Point n = d.normal(1);
  const Point t = d.tangent(1);
  CHECK(n.x * t.x + n.y * t.y == doctest::Approx(0.0).scale(1.0));
  CHECK(t.x == doctest::Approx(-std::sin(std::numbers::pi / 4)));
}

TEST_CASE("backprojection equals the weighted transpose (dense oracle)") {
  auto g = make_grid(17, 1.0);
  RadonOperator radon(g, 6);
  for (std::size_t i : {0u, 1u, 4u}) {
    const auto a = oracle::dense_forward(g, [&](const ScalarField& x) { return radon.forward(x, i); });
    const auto at = oracle::dense_adjoint(radon.sampling().size(), g->size(), [&](std::span<const double> y) {
      return radon.backproject(y, i);
    });
    const auto expect = oracle::weighted_transpose(a, radon.sampling().weights(), g->cell_area());
    CHECK(oracle::relative_difference(at, expect) < 1e-12);
  }
}

TEST_CASE("Radon transform of the disc indicator gives chord lengths") {
  auto g = make_grid(129, 1.0);
  RadonOperator radon(g, 7);
  ScalarField one(g, 1.0);
  one.restrict_to_disc();
  for (std::size_t i : {0u, 3u, 5u}) {
    const Signal y = radon.forward(one, i);
    const auto s = radon.sampling().nodes();
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (std::abs(s[k]) > 0.9) continue;
      CHECK(y[k] == doctest::Approx(2.0 * std::sqrt(1.0 - s[k] * s[k])).epsilon(0.03));
    }
  }
}

TEST_CASE("radial fields give direction-independent Radon data") {
  auto g = make_grid(65, 1.0);
  RadonOperator radon(g, 8);
  ScalarField f(g);
  for (std::size_t r = 0; r < 65; ++r)
    for (std::size_t c = 0; c < 65; ++c) {
      const Point p = g->node(r, c);
      f.at(r, c) = std::exp(-4.0 * (p.x * p.x + p.y * p.y));
    }
  f.restrict_to_disc();
  // directions mapped onto each other by a symmetry of the grid agree to
  // rounding; the others agree to discretization accuracy
  const Signal y0 = radon.forward(f, 0);
  const Signal y4 = radon.forward(f, 4);
  const Signal y2 = radon.forward(f, 2);
  const Signal y6 = radon.forward(f, 6);
  const Signal y1 = radon.forward(f, 1);
  double peak = 0.0;
  double sym = 0.0;
  double off = 0.0;
  for (std::size_t k = 0; k < y0.size(); ++k) {
    peak = std::max(peak, std::abs(y0[k]));
    sym = std::max({sym, std::abs(y4[k] - y0[k]), std::abs(y6[k] - y2[k])});
    off = std::max(off, std::abs(y1[k] - y0[k]));
  }
  CHECK(sym <= 1e-10 * peak);
  CHECK(off <= 4.0 * g->spacing() * peak);
}

TEST_CASE("Schlieren data are nonnegative squares") {
  auto g = make_grid(17, 1.0);
  SchlierenOperator op(g, 3);
  const ScalarField x = oracle::random_field(g, 5);
  const Signal r = op.radon().forward(x, 1);
  const Signal f = op.forward(x, 1);
  for (std::size_t k = 0; k < f.size(); ++k) {
    CHECK(f[k] >= 0.0);
    CHECK(f[k] == r[k] * r[k]);
  }
}

TEST_CASE("quadratic Taylor identity holds to rounding") {
  auto g = make_grid(33, 1.0);
  SchlierenOperator op(g, 5);
  const ScalarField x = oracle::random_field(g, 1);
  const ScalarField h = oracle::random_field(g, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    const Signal fxh = op.forward(x + h, i);
    const Signal fx = op.forward(x, i);
    const Signal dh = op.derivative_apply(x, h, i);
    const Signal fh = op.forward(h, i);
    double scale = 0.0;
    for (double v : fxh) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < fx.size(); ++k) {
      CHECK(std::abs(fxh[k] - fx[k] - dh[k] - fh[k]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("derivative adjoint satisfies the H1 identity") {
  auto g = make_grid(17, 1.0);
  SchlierenOperator op(g, 4);
  const ScalarField x = oracle::random_field(g, 7);
  for (std::size_t i = 0; i < 4; ++i) {
    const ScalarField h = oracle::random_field(g, 30 + i);
    const Signal y = oracle::random_signal(op.sampling().size(), 40 + i);
    const double lhs = weighted_inner(op.derivative_apply(x, h, i), y, op.sampling().weights());
    const double rhs = h1_inner(h, op.adjoint_derivative(x, y, i));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(lhs));
  }
}

TEST_CASE("derivative norm matches a generalized eigenvalue oracle") {
  auto g = make_grid(9, 1.0);
  SchlierenOperator op(g, 3);
  ScalarField x(g, 0.5);
  x.restrict_to_disc();
  x[g->index(4, 5)] = 1.3;
  std::vector<std::size_t> mask;
  const Eigen::MatrixXd b = oracle::dense_h1_gram(g, mask);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto j_full =
        oracle::dense_forward(g, [&](const ScalarField& h) { return op.derivative_apply(x, h, i); });
    Eigen::MatrixXd j(j_full.rows(), static_cast<Eigen::Index>(mask.size()));
    for (std::size_t c = 0; c < mask.size(); ++c) j.col(c) = j_full.col(mask[c]);
    const auto w = op.sampling().weights();
    Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
    for (std::size_t k = 0; k < w.size(); ++k) wv(k) = w[k];
    const Eigen::MatrixXd a = j.transpose() * wv.asDiagonal() * j;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
    const double expect = std::sqrt(es.eigenvalues().maxCoeff());
    CHECK(op.derivative_norm(x, i, 1e-14, 5000) == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("step scaling is inverse to the size of x0") {
  auto g = make_grid(17, 1.0);
  SchlierenOperator op(g, 4);
  ScalarField x0(g, 0.01);
  x0.restrict_to_disc();
  const double mu = op.step_scaling_mu(x0);
  CHECK(mu > 0.0);
  CHECK(std::isfinite(mu));
  CHECK(op.step_scaling_mu(3.0 * x0) == doctest::Approx(mu / 3.0).epsilon(1e-6));
  double largest = 0.0;
  for (std::size_t i = 0; i < 4; ++i) largest = std::max(largest, op.derivative_norm(x0, i));
  CHECK(mu * largest <= kStepScalingSafety + 1e-6);
  CHECK_THROWS_AS(op.step_scaling_mu(ScalarField(g)), NumericalError);
}
