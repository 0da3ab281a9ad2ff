#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lkreg/grid.hpp"

namespace lkreg {

/// Detector centres xi_i = R (sin(pi i / N), cos(pi i / N)), i = 0..N-1, on
/// the half circle with nonnegative first coordinate.
class DetectorSet {
 public:
  DetectorSet(double radius, std::size_t count);

  double radius() const { return radius_; }
  std::size_t size() const { return count_; }
  Point center(std::size_t i) const;

 private:
  double radius_;
  std::size_t count_;
};

/// Scaled circular means
///
///   (M_i x)(t) = 1/sqrt(pi) * integral over S^1 of x(xi_i + t sigma)
///
/// for t in [0, 2R], discretized with the periodic trapezoid rule over
/// max(16, ceil(2 pi t / h)) angles and bilinear interpolation. Samples
/// outside the disc B_R contribute zero. The data space carries the weight
/// t dt, the image space the grid L^2 weight h^2, and `adjoint` is the exact
/// transpose of `forward` with respect to those two inner products.
class CircularMeanOperator {
 public:
  /// `radial_samples` = 0 selects the grid side M.
  CircularMeanOperator(GridPtr grid, std::size_t detector_count,
                       std::size_t radial_samples = 0);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const DetectorSet& detectors() const { return detectors_; }
  const SignalSampling& sampling() const { return sampling_; }
  std::size_t angular_samples(std::size_t radius_index) const;

  Signal forward(const ScalarField& x, std::size_t detector) const;
  ScalarField adjoint(std::span<const double> y, std::size_t detector) const;

  /// Largest singular value of the discrete M_i by power iteration on
  /// M_i^* M_i, stopped when the Rayleigh quotient changes by less than
  /// `tolerance` (relative).
  double norm_estimate(std::size_t detector, double tolerance = 1e-10,
                       std::size_t max_iterations = 20000) const;

 private:
  void check_detector(std::size_t detector) const;

  GridPtr grid_;
  DetectorSet detectors_;
  SignalSampling sampling_;
  // Per radius: offset into the unit-circle tables and the angular count.
  std::vector<std::size_t> ring_offset_;
  std::vector<std::size_t> ring_count_;
  std::vector<double> cos_table_;
  std::vector<double> sin_table_;
};

}  // namespace lkreg
