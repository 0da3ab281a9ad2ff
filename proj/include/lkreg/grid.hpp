#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lkreg/errors.hpp"

namespace lkreg {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Square node grid over [-R, R]^2 with M nodes per side.
///
/// Node (row, col) sits at (coord(col), coord(row)); values are stored
/// row-major. The disc mask marks nodes strictly inside the inscribed disc
/// |xi| < R, which is where H^1_0 fields may be nonzero.
class Grid2D {
 public:
  Grid2D(std::size_t side, double half_width);

  std::size_t side() const { return side_; }
  std::size_t size() const { return side_ * side_; }
  double half_width() const { return half_width_; }
  double spacing() const { return spacing_; }
  double cell_area() const { return spacing_ * spacing_; }

  double coord(std::size_t k) const;
  Point node(std::size_t row, std::size_t col) const {
    return {coord(col), coord(row)};
  }
  std::size_t index(std::size_t row, std::size_t col) const {
    return row * side_ + col;
  }

  bool in_disc(std::size_t flat) const { return disc_mask_[flat] != 0; }
  /// True for nodes off the outer ring of the square.
  bool is_interior(std::size_t row, std::size_t col) const {
    return row > 0 && col > 0 && row + 1 < side_ && col + 1 < side_;
  }
  std::size_t disc_node_count() const { return disc_nodes_; }

  bool operator==(const Grid2D& other) const {
    return side_ == other.side_ && half_width_ == other.half_width_;
  }

 private:
  std::size_t side_;
  double half_width_;
  double spacing_;
  std::vector<unsigned char> disc_mask_;
  std::size_t disc_nodes_ = 0;
};

using GridPtr = std::shared_ptr<const Grid2D>;

GridPtr make_grid(std::size_t side, double half_width);

/// Nodal values on a Grid2D. Copies are deep; the grid is shared.
class ScalarField {
 public:
  explicit ScalarField(GridPtr grid, double fill = 0.0);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t row, std::size_t col) {
    return values_[grid_->index(row, col)];
  }
  double at(std::size_t row, std::size_t col) const {
    return values_[grid_->index(row, col)];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double factor);
  /// this += factor * other
  ScalarField& add_scaled(double factor, const ScalarField& other);

  bool all_finite() const;
  /// Zeroes every node outside the disc mask.
  void restrict_to_disc();

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double factor, ScalarField a);

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* what);

/// Grid L^2 inner product with cell-area weight h^2.
double l2_inner(const ScalarField& u, const ScalarField& v);
double l2_norm(const ScalarField& u);

/// Corner indices and weights of the bilinear cell containing a point.
struct BilinearStencil {
  std::array<std::size_t, 4> index{};
  std::array<double, 4> weight{};
};

/// Returns false when the point lies outside the grid square.
bool bilinear_stencil(const Grid2D& grid, Point p, BilinearStencil& out);

/// Bilinear interpolation; zero outside the grid square.
double interpolate_bilinear(const ScalarField& field, Point p);

/// 5-point Laplacian at nodes off the outer ring, zero on the ring.
ScalarField laplacian_apply(const ScalarField& field);

/// Dirichlet Laplacian on the disc mask: neighbours outside the mask count
/// as zero, and output is zero off the mask.
ScalarField laplacian_apply_masked(const ScalarField& field);

struct EllipticReport {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Solves (I - Delta_h) q = rhs on the disc mask with q = 0 elsewhere, by
/// conjugate gradients to relative residual 1e-10. `warm_start`, when given,
/// is used as the initial iterate. Throws NumericalError past 10 M^2
/// iterations.
ScalarField helmholtz_solve(const ScalarField& rhs,
                            const ScalarField* warm_start = nullptr,
                            EllipticReport* report = nullptr);

inline constexpr double kHelmholtzTolerance = 1e-10;

/// <u, (I - Delta_h) v> with the masked Laplacian and weight h^2. Only mask
/// nodes contribute.
double h1_inner(const ScalarField& u, const ScalarField& v);

/// C = x - lambda^2 Delta_h(ln x) at interior nodes; the outer ring is left
/// at zero (not evaluated). Throws NumericalError if any x <= 0.
ScalarField doping_from_state(const ScalarField& x, double lambda);

/// Sample positions and trapezoid weights for a 1-D signal. The weights
/// define the data inner product <a, b> = sum_k w_k a_k b_k.
class SignalSampling {
 public:
  /// Radii t_k = k dt on [0, max_radius], weights trapezoid(dt) * t_k.
  static SignalSampling radial(std::size_t count, double max_radius);
  /// Uniform nodes on [lo, hi] with plain trapezoid weights.
  static SignalSampling uniform(std::size_t count, double lo, double hi);

  std::size_t size() const { return nodes_.size(); }
  double step() const { return step_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  bool operator==(const SignalSampling& other) const {
    return nodes_ == other.nodes_ && weights_ == other.weights_;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double step_ = 0.0;
};

using Signal = std::vector<double>;

/// sum_k w_k a_k b_k; throws UsageError on length mismatch.
double weighted_inner(std::span<const double> a, std::span<const double> b,
                      std::span<const double> weights);
double weighted_norm(std::span<const double> a, std::span<const double> weights);

/// Inner product of L^2([0, 2R], t dt) realized on a radial sampling.
double weighted_inner_radial(std::span<const double> y1,
                             std::span<const double> y2,
                             const SignalSampling& sampling);

}  // namespace lkreg
