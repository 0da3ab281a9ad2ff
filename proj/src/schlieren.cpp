#include "lkreg/schlieren.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lkreg {

DirectionSet::DirectionSet(std::size_t count) : count_(count) {
  if (count == 0) throw UsageError("direction count must be >= 1");
}

double DirectionSet::angle(std::size_t i) const {
  return std::numbers::pi * static_cast<double>(i) / static_cast<double>(count_);
}

Point DirectionSet::normal(std::size_t i) const {
  const double phi = angle(i);
  return {std::cos(phi), std::sin(phi)};
}

Point DirectionSet::tangent(std::size_t i) const {
  const Point n = normal(i);
  return {-n.y, n.x};
}

RadonOperator::RadonOperator(GridPtr grid, std::size_t direction_count,
                             std::size_t offset_samples)
    : grid_(std::move(grid)),
      directions_(direction_count),
      offsets_(SignalSampling::uniform(
          offset_samples == 0 ? (grid_ ? grid_->side() : 2) : offset_samples,
          grid_ ? -grid_->half_width() : -1.0, grid_ ? grid_->half_width() : 1.0)),
      along_(SignalSampling::uniform(grid_ ? grid_->side() : 2,
                                     grid_ ? -grid_->half_width() : -1.0,
                                     grid_ ? grid_->half_width() : 1.0)) {
  if (!grid_) throw UsageError("radon operator requires a grid");
}

void RadonOperator::check(std::size_t direction) const {
  if (direction >= directions_.size()) {
    std::ostringstream msg;
    msg << "direction index " << direction << " out of range [0, "
        << directions_.size() << ")";
    throw UsageError(msg.str());
  }
}

Signal RadonOperator::forward(const ScalarField& x, std::size_t direction) const {
  check(direction);
  if (!(x.grid() == *grid_)) {
    throw UsageError("radon: field grid differs from operator grid");
  }
  const Point n = directions_.normal(direction);
  const Point t = directions_.tangent(direction);
  const double r2 = grid_->half_width() * grid_->half_width();
  Signal y(offsets_.size(), 0.0);
  BilinearStencil st;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    const double s = offsets_.nodes()[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < along_.size(); ++j) {
      const double r = along_.nodes()[j];
      const Point p{s * n.x + r * t.x, s * n.y + r * t.y};
      if (p.x * p.x + p.y * p.y >= r2) continue;
      if (!bilinear_stencil(*grid_, p, st)) continue;
      double val = 0.0;
      for (int q = 0; q < 4; ++q) val += st.weight[q] * x[st.index[q]];
      sum += along_.weights()[j] * val;
    }
    y[k] = sum;
  }
  return y;
}

ScalarField RadonOperator::backproject(std::span<const double> y,
                                       std::size_t direction) const {
  check(direction);
  if (y.size() != offsets_.size()) {
    throw UsageError("backprojection: signal sampling mismatch");
  }
  const Point n = directions_.normal(direction);
  const Point t = directions_.tangent(direction);
  const double r2 = grid_->half_width() * grid_->half_width();
  const double inv_area = 1.0 / grid_->cell_area();
  ScalarField out(grid_);
  BilinearStencil st;
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    const double wy = offsets_.weights()[k] * y[k] * inv_area;
    if (wy == 0.0) continue;
    const double s = offsets_.nodes()[k];
    for (std::size_t j = 0; j < along_.size(); ++j) {
      const double r = along_.nodes()[j];
      const Point p{s * n.x + r * t.x, s * n.y + r * t.y};
      if (p.x * p.x + p.y * p.y >= r2) continue;
      if (!bilinear_stencil(*grid_, p, st)) continue;
      const double c = wy * along_.weights()[j];
      for (int q = 0; q < 4; ++q) out[st.index[q]] += c * st.weight[q];
    }
  }
  return out;
}

SchlierenOperator::SchlierenOperator(GridPtr grid, std::size_t direction_count,
                                     std::size_t offset_samples)
    : radon_(std::move(grid), direction_count, offset_samples) {}

Signal SchlierenOperator::forward(const ScalarField& x,
                                  std::size_t direction) const {
  Signal y = radon_.forward(x, direction);
  for (double& v : y) v *= v;
  return y;
}

Signal SchlierenOperator::derivative_apply(const ScalarField& x,
                                           const ScalarField& h,
                                           std::size_t direction) const {
  require_same_grid(x, h, "schlieren derivative");
  const Signal rx = radon_.forward(x, direction);
  Signal rh = radon_.forward(h, direction);
  for (std::size_t k = 0; k < rh.size(); ++k) rh[k] *= 2.0 * rx[k];
  return rh;
}

ScalarField SchlierenOperator::adjoint_derivative(const ScalarField& x,
                                                  std::span<const double> y,
                                                  std::size_t direction,
                                                  const ScalarField* warm_start) const {
  Signal weighted = radon_.forward(x, direction);
  if (y.size() != weighted.size()) {
    throw UsageError("schlieren adjoint: signal sampling mismatch");
  }
  for (std::size_t k = 0; k < weighted.size(); ++k) weighted[k] *= 2.0 * y[k];
  const ScalarField rhs = radon_.backproject(weighted, direction);
  return helmholtz_solve(rhs, warm_start);
}

double SchlierenOperator::derivative_norm(const ScalarField& x,
                                          std::size_t direction,
                                          double tolerance,
                                          std::size_t max_iterations) const {
  ScalarField v(grid_ptr());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = grid().in_disc(k) ? 1.0 : 0.0;
  v *= 1.0 / std::sqrt(h1_inner(v, v));
  double rayleigh = 0.0;
  ScalarField guess(grid_ptr());
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const Signal jv = derivative_apply(x, v, direction);
    const double next = weighted_inner(jv, jv, sampling().weights());
    if (next == 0.0) return 0.0;
    const bool done =
        it > 0 && std::abs(next - rayleigh) <= tolerance * std::abs(next);
    rayleigh = next;
    if (done) break;
    // w ~ rayleigh * v once converged, which makes a good CG start.
    guess = v;
    guess *= rayleigh;
    ScalarField w = adjoint_derivative(x, jv, direction, &guess);
    const double wn = std::sqrt(h1_inner(w, w));
    v = std::move(w);
    v *= 1.0 / wn;
  }
  return std::sqrt(rayleigh);
}

double SchlierenOperator::step_scaling_mu(const ScalarField& x0) const {
  double largest = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    largest = std::max(largest, derivative_norm(x0, i));
  }
  if (!(largest > 0.0)) {
    throw NumericalError("derivative vanishes at initial guess");
  }
  return kStepScalingSafety / largest;
}

}  // namespace lkreg
