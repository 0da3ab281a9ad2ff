#include "lkreg/circular_mean.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lkreg {

DetectorSet::DetectorSet(double radius, std::size_t count)
    : radius_(radius), count_(count) {
  if (count == 0) throw UsageError("detector count must be >= 1");
  if (!(radius > 0.0)) throw UsageError("detector radius must be positive");
}

Point DetectorSet::center(std::size_t i) const {
  const double phi = std::numbers::pi * static_cast<double>(i) /
                     static_cast<double>(count_);
  return {radius_ * std::sin(phi), radius_ * std::cos(phi)};
}

CircularMeanOperator::CircularMeanOperator(GridPtr grid,
                                           std::size_t detector_count,
                                           std::size_t radial_samples)
    : grid_(std::move(grid)),
      detectors_(grid_ ? grid_->half_width() : 1.0, detector_count),
      sampling_(SignalSampling::radial(
          radial_samples == 0 ? (grid_ ? grid_->side() : 2) : radial_samples,
          2.0 * (grid_ ? grid_->half_width() : 1.0))) {
  if (!grid_) throw UsageError("circular mean operator requires a grid");
  const double h = grid_->spacing();
  const std::size_t nr = sampling_.size();
  ring_offset_.resize(nr);
  ring_count_.resize(nr);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < nr; ++k) {
    const double t = sampling_.nodes()[k];
    const auto n_ang = std::max<std::size_t>(
        16, static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * t / h)));
    ring_offset_[k] = offset;
    ring_count_[k] = n_ang;
    for (std::size_t j = 0; j < n_ang; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(n_ang);
      cos_table_.push_back(std::cos(theta));
      sin_table_.push_back(std::sin(theta));
    }
    offset += n_ang;
  }
}

std::size_t CircularMeanOperator::angular_samples(std::size_t radius_index) const {
  return ring_count_.at(radius_index);
}

void CircularMeanOperator::check_detector(std::size_t detector) const {
  if (detector >= detectors_.size()) {
    std::ostringstream msg;
    msg << "detector index " << detector << " out of range [0, "
        << detectors_.size() << ")";
    throw UsageError(msg.str());
  }
}

Signal CircularMeanOperator::forward(const ScalarField& x,
                                     std::size_t detector) const {
  check_detector(detector);
  if (!(x.grid() == *grid_)) {
    throw UsageError("circular mean: field grid differs from operator grid");
  }
  const Point c = detectors_.center(detector);
  const double r2 = grid_->half_width() * grid_->half_width();
  Signal y(sampling_.size(), 0.0);
  BilinearStencil st;
  for (std::size_t k = 0; k < sampling_.size(); ++k) {
    const double t = sampling_.nodes()[k];
    const std::size_t n_ang = ring_count_[k];
    const double* cs = cos_table_.data() + ring_offset_[k];
    const double* sn = sin_table_.data() + ring_offset_[k];
    double sum = 0.0;
    for (std::size_t j = 0; j < n_ang; ++j) {
      const Point p{c.x + t * cs[j], c.y + t * sn[j]};
      if (p.x * p.x + p.y * p.y >= r2) continue;
      if (!bilinear_stencil(*grid_, p, st)) continue;
      for (int q = 0; q < 4; ++q) sum += st.weight[q] * x[st.index[q]];
    }
    const double quad = 2.0 * std::numbers::pi / static_cast<double>(n_ang);
    y[k] = quad / std::sqrt(std::numbers::pi) * sum;
  }
  return y;
}

ScalarField CircularMeanOperator::adjoint(std::span<const double> y,
                                          std::size_t detector) const {
  check_detector(detector);
  if (y.size() != sampling_.size()) {
    throw UsageError("circular mean adjoint: signal sampling mismatch");
  }
  const Point c = detectors_.center(detector);
  const double r2 = grid_->half_width() * grid_->half_width();
  const double inv_area = 1.0 / grid_->cell_area();
  ScalarField out(grid_);
  BilinearStencil st;
  for (std::size_t k = 0; k < sampling_.size(); ++k) {
    const double wy = sampling_.weights()[k] * y[k];
    if (wy == 0.0) continue;
    const double t = sampling_.nodes()[k];
    const std::size_t n_ang = ring_count_[k];
    const double quad = 2.0 * std::numbers::pi / static_cast<double>(n_ang);
    const double coeff = wy * quad / std::sqrt(std::numbers::pi) * inv_area;
    const double* cs = cos_table_.data() + ring_offset_[k];
    const double* sn = sin_table_.data() + ring_offset_[k];
    for (std::size_t j = 0; j < n_ang; ++j) {
      const Point p{c.x + t * cs[j], c.y + t * sn[j]};
      if (p.x * p.x + p.y * p.y >= r2) continue;
      if (!bilinear_stencil(*grid_, p, st)) continue;
      for (int q = 0; q < 4; ++q) out[st.index[q]] += coeff * st.weight[q];
    }
  }
  return out;
}

double CircularMeanOperator::norm_estimate(std::size_t detector,
                                           double tolerance,
                                           std::size_t max_iterations) const {
  check_detector(detector);
  // Constant start: M_i^* M_i has nonnegative entries, so its top
  // eigenvector is nonnegative and overlaps the start vector.
  ScalarField v(grid_, 1.0);
  v *= 1.0 / l2_norm(v);
  double rayleigh = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const Signal mv = forward(v, detector);
    const double next = weighted_inner(mv, mv, sampling_.weights());
    ScalarField w = adjoint(mv, detector);
    const double wn = l2_norm(w);
    if (wn == 0.0) return 0.0;
    const bool done =
        it > 0 && std::abs(next - rayleigh) <= tolerance * std::abs(next);
    rayleigh = next;
    if (done) break;
    v = std::move(w);
    v *= 1.0 / wn;
  }
  return std::sqrt(rayleigh);
}

}  // namespace lkreg
