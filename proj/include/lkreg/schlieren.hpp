#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lkreg/grid.hpp"

namespace lkreg {

/// Directions sigma_i = (cos phi_i, sin phi_i), phi_i = pi i / N.
class DirectionSet {
 public:
  explicit DirectionSet(std::size_t count);

  std::size_t size() const { return count_; }
  double angle(std::size_t i) const;
  Point normal(std::size_t i) const;
  /// sigma_i rotated by +90 degrees; lines are s sigma_i + r tangent(i).
  Point tangent(std::size_t i) const;

 private:
  std::size_t count_;
};

/// Parallel-beam Radon transform over lines at signed distance s in
/// [-R, R]. Both s and the along-line coordinate r use the grid spacing;
/// line integrals are trapezoid sums of bilinear samples, zero outside the
/// disc. `backproject` is the exact transpose for the grid L^2 (weight h^2)
/// and trapezoid L^2(I) inner products.
class RadonOperator {
 public:
  /// `offset_samples` = 0 selects the grid side M.
  RadonOperator(GridPtr grid, std::size_t direction_count,
                std::size_t offset_samples = 0);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const DirectionSet& directions() const { return directions_; }
  const SignalSampling& sampling() const { return offsets_; }

  Signal forward(const ScalarField& x, std::size_t direction) const;
  ScalarField backproject(std::span<const double> y, std::size_t direction) const;

 private:
  void check(std::size_t direction) const;

  GridPtr grid_;
  DirectionSet directions_;
  SignalSampling offsets_;
  SignalSampling along_;
};

/// Schlieren transform F_i(x) = (R_i x)^2 with derivative
/// F_i'[x]h = 2 R_i(x) R_i(h) and its adjoint in the discrete H^1_0 metric
/// <u, v>_{H^1} = <u, (I - Delta_h) v>.
class SchlierenOperator {
 public:
  SchlierenOperator(GridPtr grid, std::size_t direction_count,
                    std::size_t offset_samples = 0);

  const RadonOperator& radon() const { return radon_; }
  const Grid2D& grid() const { return radon_.grid(); }
  const GridPtr& grid_ptr() const { return radon_.grid_ptr(); }
  const SignalSampling& sampling() const { return radon_.sampling(); }
  std::size_t size() const { return radon_.directions().size(); }

  Signal forward(const ScalarField& x, std::size_t direction) const;
  Signal derivative_apply(const ScalarField& x, const ScalarField& h,
                          std::size_t direction) const;
  /// q solving (I - Delta_h) q = 2 R_i^#(R_i(x) y) on the disc, q = 0 off it.
  ScalarField adjoint_derivative(const ScalarField& x, std::span<const double> y,
                                 std::size_t direction,
                                 const ScalarField* warm_start = nullptr) const;

  /// ||F_i'[x]|| from L^2(I) to H^1_0 by power iteration on F'^* F'.
  double derivative_norm(const ScalarField& x, std::size_t direction,
                         double tolerance = 1e-9,
                         std::size_t max_iterations = 500) const;

  /// mu = 0.9 / max_i ||F_i'[x0]||. Throws NumericalError when every
  /// derivative vanishes at x0.
  double step_scaling_mu(const ScalarField& x0) const;

 private:
  RadonOperator radon_;
};

inline constexpr double kStepScalingSafety = 0.9;

}  // namespace lkreg
