#pragma once

// Dense-matrix helpers shared by the unit tests and the acceptance run.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "lkreg/grid.hpp"

namespace oracle {

using lkreg::ScalarField;
using lkreg::Signal;

/// Column j = f(e_j) for the M*M nodal unit vectors.
inline Eigen::MatrixXd dense_forward(const lkreg::GridPtr& grid,
                                     const std::function<Signal(const ScalarField&)>& f) {
  ScalarField e(grid);
  Eigen::MatrixXd a;
  for (std::size_t j = 0; j < e.size(); ++j) {
    e[j] = 1.0;
    const Signal col = f(e);
    e[j] = 0.0;
    if (j == 0) a.resize(static_cast<Eigen::Index>(col.size()), static_cast<Eigen::Index>(e.size()));
    for (std::size_t k = 0; k < col.size(); ++k) a(k, j) = col[k];
  }
  return a;
}

/// Column k = g(e_k) for the K data-space unit vectors.
inline Eigen::MatrixXd dense_adjoint(std::size_t samples, std::size_t nodes,
                                     const std::function<ScalarField(std::span<const double>)>& g) {
  Eigen::MatrixXd a(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(samples));
  std::vector<double> e(samples, 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    e[k] = 1.0;
    const ScalarField col = g(e);
    e[k] = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) a(j, k) = col[j];
  }
  return a;
}

/// A^T W / h^2: the transpose with respect to the weighted data inner
/// product and the h^2-weighted grid inner product.
inline Eigen::MatrixXd weighted_transpose(const Eigen::MatrixXd& a, std::span<const double> w,
                                          double cell_area) {
  Eigen::VectorXd wv(static_cast<Eigen::Index>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) wv(k) = w[k];
  return a.transpose() * wv.asDiagonal() / cell_area;
}

inline double relative_difference(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

inline ScalarField random_field(const lkreg::GridPtr& grid, std::uint64_t seed,
                                bool disc_only = true) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(grid);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  if (disc_only) f.restrict_to_disc();
  return f;
}

inline Signal random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Signal s(n);
  for (double& v : s) v = u(rng);
  return s;
}

/// h^2 (I - Delta_h) restricted to the disc-mask nodes, as a dense matrix.
inline Eigen::MatrixXd dense_h1_gram(const lkreg::GridPtr& grid, std::vector<std::size_t>& mask) {
  mask.clear();
  for (std::size_t k = 0; k < grid->size(); ++k) {
    if (grid->in_disc(k)) mask.push_back(k);
  }
  const auto n = static_cast<Eigen::Index>(mask.size());
  Eigen::MatrixXd b(n, n);
  ScalarField e(grid);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[mask[j]] = 1.0;
    const ScalarField lap = lkreg::laplacian_apply_masked(e);
    for (Eigen::Index i = 0; i < n; ++i) {
      b(i, j) = grid->cell_area() * ((i == j ? 1.0 : 0.0) - lap[mask[i]]);
    }
    e[mask[j]] = 0.0;
  }
  return b;
}

}  // namespace oracle
