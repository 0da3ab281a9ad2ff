#include "lkreg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lkreg {

Grid2D::Grid2D(std::size_t side, double half_width)
    : side_(side), half_width_(half_width) {
  if (side < 3 || side % 2 == 0) {
    throw UsageError("grid side must be odd and >= 3");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw UsageError("grid half-width must be positive");
  }
  spacing_ = 2.0 * half_width / static_cast<double>(side - 1);
  disc_mask_.assign(size(), 0);
  const double r2 = half_width * half_width;
  for (std::size_t row = 0; row < side; ++row) {
    for (std::size_t col = 0; col < side; ++col) {
      const Point p = node(row, col);
      if (p.x * p.x + p.y * p.y < r2) {
        disc_mask_[index(row, col)] = 1;
        ++disc_nodes_;
      }
    }
  }
}

double Grid2D::coord(std::size_t k) const {
  // Integer numerator keeps coord(k) == -coord(M-1-k) exactly.
  const double num = 2.0 * static_cast<double>(k) - static_cast<double>(side_ - 1);
  return half_width_ * (num / static_cast<double>(side_ - 1));
}

GridPtr make_grid(std::size_t side, double half_width) {
  return std::make_shared<const Grid2D>(side, half_width);
}

ScalarField::ScalarField(GridPtr grid, double fill) : grid_(std::move(grid)) {
  if (!grid_) throw UsageError("field requires a grid");
  values_.assign(grid_->size(), fill);
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  return add_scaled(1.0, other);
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  return add_scaled(-1.0, other);
}

ScalarField& ScalarField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

ScalarField& ScalarField::add_scaled(double factor, const ScalarField& other) {
  require_same_grid(*this, other, "add_scaled");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += factor * other.values_[i];
  }
  return *this;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void ScalarField::restrict_to_disc() {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!grid_->in_disc(i)) values_[i] = 0.0;
  }
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double factor, ScalarField a) { return a *= factor; }

void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* what) {
  if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid())) {
    std::ostringstream msg;
    msg << what << ": fields live on different grids";
    throw UsageError(msg.str());
  }
}

double l2_inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v, "l2_inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum * u.grid().cell_area();
}

double l2_norm(const ScalarField& u) { return std::sqrt(l2_inner(u, u)); }

bool bilinear_stencil(const Grid2D& grid, Point p, BilinearStencil& out) {
  const double last = static_cast<double>(grid.side() - 1);
  const double u = (p.x / grid.half_width() + 1.0) * 0.5 * last;
  const double v = (p.y / grid.half_width() + 1.0) * 0.5 * last;
  if (!(u >= 0.0 && u <= last && v >= 0.0 && v <= last)) return false;
  const auto col = std::min(static_cast<std::size_t>(u), grid.side() - 2);
  const auto row = std::min(static_cast<std::size_t>(v), grid.side() - 2);
  const double fx = u - static_cast<double>(col);
  const double fy = v - static_cast<double>(row);
  const std::size_t base = grid.index(row, col);
  out.index = {base, base + 1, base + grid.side(), base + grid.side() + 1};
  out.weight = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy,
                fx * fy};
  return true;
}

double interpolate_bilinear(const ScalarField& field, Point p) {
  BilinearStencil st;
  if (!bilinear_stencil(field.grid(), p, st)) return 0.0;
  double sum = 0.0;
  for (int c = 0; c < 4; ++c) sum += st.weight[c] * field[st.index[c]];
  return sum;
}

ScalarField laplacian_apply(const ScalarField& field) {
  const Grid2D& g = field.grid();
  const std::size_t m = g.side();
  const double inv_h2 = 1.0 / g.cell_area();
  ScalarField out(field.grid_ptr());
  for (std::size_t row = 1; row + 1 < m; ++row) {
    for (std::size_t col = 1; col + 1 < m; ++col) {
      const std::size_t k = g.index(row, col);
      out[k] = (field[k - 1] + field[k + 1] + field[k - m] + field[k + m] -
                4.0 * field[k]) *
               inv_h2;
    }
  }
  return out;
}

namespace {

// Masked Laplacian into a preallocated buffer; `values` may be nonzero off the
// mask, those entries are ignored.
void masked_laplacian(const Grid2D& g, std::span<const double> values,
                      std::span<double> out) {
  const std::size_t m = g.side();
  const double inv_h2 = 1.0 / g.cell_area();
  auto val = [&](std::size_t k) { return g.in_disc(k) ? values[k] : 0.0; };
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!g.in_disc(k)) {
      out[k] = 0.0;
      continue;
    }
    // Disc nodes never touch the outer ring, so all four neighbours exist.
    out[k] = (val(k - 1) + val(k + 1) + val(k - m) + val(k + m) -
              4.0 * values[k]) *
             inv_h2;
  }
}

// (I - Delta_h) restricted to the mask.
void helmholtz_apply(const Grid2D& g, std::span<const double> v,
                     std::span<double> out) {
  masked_laplacian(g, v, out);
  for (std::size_t k = 0; k < g.size(); ++k) {
    out[k] = g.in_disc(k) ? v[k] - out[k] : 0.0;
  }
}

double masked_dot(const Grid2D& g, std::span<const double> a,
                  std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g.in_disc(k)) s += a[k] * b[k];
  }
  return s;
}

}  // namespace

ScalarField laplacian_apply_masked(const ScalarField& field) {
  ScalarField out(field.grid_ptr());
  masked_laplacian(field.grid(), field.values(), out.values());
  return out;
}

ScalarField helmholtz_solve(const ScalarField& rhs, const ScalarField* warm_start,
                            EllipticReport* report) {
  const Grid2D& g = rhs.grid();
  const std::size_t n = g.size();
  const std::size_t max_iter = 10 * n;
  ScalarField q(rhs.grid_ptr());
  if (warm_start != nullptr) {
    require_same_grid(rhs, *warm_start, "helmholtz_solve");
    q = *warm_start;
    q.restrict_to_disc();
  }

  const double rhs_norm = std::sqrt(masked_dot(g, rhs.values(), rhs.values()));
  if (rhs_norm == 0.0) {
    if (report) *report = {};
    return ScalarField(rhs.grid_ptr());
  }
  const double target = kHelmholtzTolerance * rhs_norm;

  std::vector<double> r(n), p(n), ap(n);
  std::size_t iter = 0;
  // Outer loop restarts from the true residual so the returned q satisfies
  // the tolerance on the actual equation, not only on the CG recurrence.
  for (;;) {
    helmholtz_apply(g, q.values(), ap);
    for (std::size_t k = 0; k < n; ++k) {
      r[k] = g.in_disc(k) ? rhs[k] - ap[k] : 0.0;
    }
    double rr = masked_dot(g, r, r);
    if (std::sqrt(rr) <= target) break;
    if (iter >= max_iter) {
      std::ostringstream msg;
      msg << "helmholtz_solve: no convergence after " << iter
          << " iterations, relative residual " << std::sqrt(rr) / rhs_norm;
      throw NumericalError(msg.str());
    }
    p = r;
    while (iter < max_iter) {
      helmholtz_apply(g, p, ap);
      const double alpha = rr / masked_dot(g, p, ap);
      for (std::size_t k = 0; k < n; ++k) {
        q[k] += alpha * p[k];
        r[k] -= alpha * ap[k];
      }
      ++iter;
      const double rr_next = masked_dot(g, r, r);
      if (std::sqrt(rr_next) <= 0.5 * target) break;
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
  }

  if (report) {
    helmholtz_apply(g, q.values(), ap);
    double res = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (g.in_disc(k)) res += (rhs[k] - ap[k]) * (rhs[k] - ap[k]);
    }
    report->iterations = iter;
    report->relative_residual = std::sqrt(res) / rhs_norm;
  }
  return q;
}

double h1_inner(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v, "h1_inner");
  const Grid2D& g = u.grid();
  std::vector<double> av(g.size());
  helmholtz_apply(g, v.values(), av);
  return masked_dot(g, u.values(), av) * g.cell_area();
}

ScalarField doping_from_state(const ScalarField& x, double lambda) {
  ScalarField log_x(x.grid_ptr());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0)) {
      throw NumericalError("doping_from_state: log of non-positive state");
    }
    log_x[k] = std::log(x[k]);
  }
  const ScalarField lap = laplacian_apply(log_x);
  const Grid2D& g = x.grid();
  ScalarField c(x.grid_ptr());
  for (std::size_t row = 1; row + 1 < g.side(); ++row) {
    for (std::size_t col = 1; col + 1 < g.side(); ++col) {
      const std::size_t k = g.index(row, col);
      c[k] = x[k] - lambda * lambda * lap[k];
    }
  }
  return c;
}

SignalSampling SignalSampling::radial(std::size_t count, double max_radius) {
  SignalSampling s = uniform(count, 0.0, max_radius);
  for (std::size_t k = 0; k < count; ++k) s.weights_[k] *= s.nodes_[k];
  return s;
}

SignalSampling SignalSampling::uniform(std::size_t count, double lo, double hi) {
  if (count < 2) throw UsageError("signal sampling needs at least 2 samples");
  if (!(hi > lo)) throw UsageError("signal sampling interval is empty");
  SignalSampling s;
  const double n = static_cast<double>(count - 1);
  s.step_ = (hi - lo) / n;
  s.nodes_.resize(count);
  s.weights_.assign(count, s.step_);
  for (std::size_t k = 0; k < count; ++k) {
    // Same symmetric construction as Grid2D::coord.
    const double num = 2.0 * static_cast<double>(k) - n;
    s.nodes_[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * (num / n);
  }
  s.weights_.front() *= 0.5;
  s.weights_.back() *= 0.5;
  return s;
}

double weighted_inner(std::span<const double> a, std::span<const double> b,
                      std::span<const double> weights) {
  if (a.size() != b.size() || a.size() != weights.size()) {
    throw UsageError("weighted_inner: signal length mismatch");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += weights[k] * a[k] * b[k];
  return sum;
}

double weighted_norm(std::span<const double> a, std::span<const double> weights) {
  return std::sqrt(weighted_inner(a, a, weights));
}

double weighted_inner_radial(std::span<const double> y1,
                             std::span<const double> y2,
                             const SignalSampling& sampling) {
  return weighted_inner(y1, y2, sampling.weights());
}

}  // namespace lkreg
