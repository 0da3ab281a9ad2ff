#include "lkreg/phantom.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

namespace lkreg {

namespace {

constexpr double kGaussianSupportWidths = 3.0;

double reach(const DiscShape& d) { return std::hypot(d.center.x, d.center.y) + d.radius; }
double reach(const EllipseShape& e) {
  return std::hypot(e.center.x, e.center.y) + std::max(e.semi_major, e.semi_minor);
}
double reach(const GaussianShape& g) {
  return std::hypot(g.center.x, g.center.y) + kGaussianSupportWidths * g.width;
}

bool valid_size(const DiscShape& d) { return d.radius > 0.0; }
bool valid_size(const EllipseShape& e) { return e.semi_major > 0.0 && e.semi_minor > 0.0; }
bool valid_size(const GaussianShape& g) { return g.width > 0.0; }

double value_at(const DiscShape& d, Point p) {
  const double dx = p.x - d.center.x;
  const double dy = p.y - d.center.y;
  return dx * dx + dy * dy <= d.radius * d.radius ? d.amplitude : 0.0;
}

double value_at(const EllipseShape& e, Point p) {
  const double dx = p.x - e.center.x;
  const double dy = p.y - e.center.y;
  const double c = std::cos(e.angle);
  const double s = std::sin(e.angle);
  const double u = (c * dx + s * dy) / e.semi_major;
  const double v = (-s * dx + c * dy) / e.semi_minor;
  return u * u + v * v <= 1.0 ? e.amplitude : 0.0;
}

double value_at(const GaussianShape& g, Point p) {
  const double dx = p.x - g.center.x;
  const double dy = p.y - g.center.y;
  return g.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * g.width * g.width));
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

ScalarField build_phantom(const PhantomSpec& spec, GridPtr grid) {
  ScalarField field(std::move(grid));
  const Grid2D& g = field.grid();
  for (std::size_t n = 0; n < spec.primitives.size(); ++n) {
    std::visit(
        [&](const auto& shape) {
          if (!valid_size(shape)) {
            std::ostringstream msg;
            msg << "phantom primitive " << n << " has non-positive size";
            throw UsageError(msg.str());
          }
          if (!(reach(shape) < g.half_width())) {
            std::ostringstream msg;
            msg << "phantom primitive " << n << " escapes the reconstruction disc";
            throw UsageError(msg.str());
          }
          for (std::size_t row = 0; row < g.side(); ++row) {
            for (std::size_t col = 0; col < g.side(); ++col) {
              field.at(row, col) += value_at(shape, g.node(row, col));
            }
          }
        },
        spec.primitives[n]);
  }
  field.restrict_to_disc();
  return field;
}

PhantomSpec default_tat_phantom(double radius) {
  const double r = radius;
  PhantomSpec spec;
  spec.primitives = {
      DiscShape{{-0.30 * r, 0.30 * r}, 0.25 * r, 1.0},
      EllipseShape{{0.25 * r, -0.20 * r}, 0.35 * r, 0.15 * r, 0.5, 0.8},
      DiscShape{{0.35 * r, 0.40 * r}, 0.12 * r, 0.6},
      GaussianShape{{-0.20 * r, -0.45 * r}, 0.10 * r, 1.2},
  };
  return spec;
}

PhantomSpec default_schlieren_phantom() {
  PhantomSpec spec;
  spec.primitives = {
      DiscShape{{0.0, 0.0}, 0.6, 1.0},
      DiscShape{{0.2, 0.15}, 0.2, -1.5},
      EllipseShape{{-0.3, -0.25}, 0.2, 0.1, 0.7, 0.5},
  };
  return spec;
}

std::string_view noise_model_name(NoiseModel m) {
  return m == NoiseModel::uniform ? "uniform" : "gaussian";
}

NoiseModel parse_noise_model(std::string_view name) {
  const std::string l = lower(name);
  if (l == "uniform") return NoiseModel::uniform;
  if (l == "gaussian" || l == "normal") return NoiseModel::gaussian;
  throw UsageError("unknown noise model '" + std::string(name) +
                   "' (expected uniform or gaussian)");
}

NoisySignal add_noise(std::span<const double> clean, std::span<const double> weights,
                      NoiseModel model, double rho, std::uint64_t seed) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw UsageError("noise level rho must be finite and >= 0");
  }
  NoisySignal out{Signal(clean.begin(), clean.end()), 0.0};
  if (rho == 0.0) return out;
  const double clean_norm = weighted_norm(clean, weights);
  if (clean_norm == 0.0) throw UsageError("relative noise undefined for zero data");

  std::mt19937_64 rng(seed);
  Signal e(clean.size());
  double e_norm = 0.0;
  // A draw of all-zero noise on the weighted samples has probability zero,
  // but loop rather than divide by zero.
  while (e_norm == 0.0) {
    if (model == NoiseModel::uniform) {
      std::uniform_real_distribution<double> dist(-1.0, 1.0);
      for (double& v : e) v = dist(rng);
    } else {
      std::normal_distribution<double> dist(0.0, 1.0);
      for (double& v : e) v = dist(rng);
    }
    e_norm = weighted_norm(e, weights);
  }
  const double scale = rho * clean_norm / e_norm;
  Signal diff(clean.size());
  for (std::size_t k = 0; k < clean.size(); ++k) {
    out.noisy[k] = clean[k] + scale * e[k];
    diff[k] = out.noisy[k] - clean[k];
  }
  out.delta = weighted_norm(diff, weights);
  return out;
}

std::vector<Signal> synthesize_data(const ForwardModel& model, const ScalarField& truth) {
  std::vector<Signal> data;
  data.reserve(model.equation_count());
  for (std::size_t i = 0; i < model.equation_count(); ++i) {
    data.push_back(model.evaluate(i, truth));
  }
  return data;
}

NoisySystemData make_noisy_data(const ForwardModel& model, const ScalarField& truth,
                                NoiseModel noise, double rho, std::uint64_t seed) {
  NoisySystemData out;
  out.model = noise;
  out.rho = rho;
  out.seed = seed;
  out.clean = synthesize_data(model, truth);
  for (std::size_t i = 0; i < out.clean.size(); ++i) {
    NoisySignal ns = add_noise(out.clean[i], model.data_weights(i), noise, rho,
                               seed ^ static_cast<std::uint64_t>(i));
    out.noisy.push_back(std::move(ns.noisy));
    out.deltas.push_back(ns.delta);
  }
  return out;
}

}  // namespace lkreg
