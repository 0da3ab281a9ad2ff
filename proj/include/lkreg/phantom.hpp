#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "lkreg/grid.hpp"
#include "lkreg/operator_system.hpp"

namespace lkreg {

struct DiscShape {
  Point center;
  double radius = 0.0;
  double amplitude = 1.0;
};

struct EllipseShape {
  Point center;
  double semi_major = 0.0;  ///< along the rotated x axis
  double semi_minor = 0.0;
  double angle = 0.0;       ///< radians
  double amplitude = 1.0;
};

/// amplitude * exp(-|xi - c|^2 / (2 width^2)); its support is taken to be
/// the 3-width disc around the centre when checking containment.
struct GaussianShape {
  Point center;
  double width = 0.0;
  double amplitude = 1.0;
};

using PhantomPrimitive = std::variant<DiscShape, EllipseShape, GaussianShape>;

struct PhantomSpec {
  std::vector<PhantomPrimitive> primitives;
};

/// Nodewise superposition; characteristic functions use node membership.
/// Throws UsageError if a primitive reaches outside the disc |xi| < R.
ScalarField build_phantom(const PhantomSpec& spec, GridPtr grid);

/// Characteristic functions plus one Gaussian, inside the unit-scaled disc.
PhantomSpec default_tat_phantom(double radius);
/// Several characteristic functions including a negative inclusion; the
/// overall mean is positive.
PhantomSpec default_schlieren_phantom();

enum class NoiseModel { uniform, gaussian };

std::string_view noise_model_name(NoiseModel m);
NoiseModel parse_noise_model(std::string_view name);

/// Recorded in outputs so runs can be traced to the generator used.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

struct NoisySignal {
  Signal noisy;
  double delta = 0.0;
};

/// Adds i.i.d. noise rescaled so that ||y_delta - y|| = rho ||y|| exactly
/// in the weighted norm; `delta` is the recomputed distance. Throws
/// UsageError for rho < 0 or for rho > 0 with ||y|| = 0.
NoisySignal add_noise(std::span<const double> clean, std::span<const double> weights,
                      NoiseModel model, double rho, std::uint64_t seed);

struct NoisySystemData {
  std::vector<Signal> clean;
  std::vector<Signal> noisy;
  std::vector<double> deltas;
  NoiseModel model = NoiseModel::uniform;
  double rho = 0.0;
  std::uint64_t seed = 0;
};

/// F_i(x_true) for every equation.
std::vector<Signal> synthesize_data(const ForwardModel& model, const ScalarField& truth);

/// Noise per equation with derived seed (seed XOR i).
NoisySystemData make_noisy_data(const ForwardModel& model, const ScalarField& truth,
                                NoiseModel noise, double rho, std::uint64_t seed);

}  // namespace lkreg
