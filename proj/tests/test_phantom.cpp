#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lkreg/phantom.hpp"
#include "oracles.hpp"

using namespace lkreg;

TEST_CASE("empty phantom is zero") {
  auto g = make_grid(9, 1.0);
  const ScalarField f = build_phantom({}, g);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK(f[k] == 0.0);
}

TEST_CASE("disc phantom takes values 0/1 and has the disc area") {
  auto g = make_grid(129, 1.0);
  PhantomSpec spec{{DiscShape{{0.1, -0.2}, 0.4, 1.0}}};
  const ScalarField f = build_phantom(spec, g);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK((f[k] == 0.0 || f[k] == 1.0));
  double integral = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) integral += f[k] * g->cell_area();
  // oracle: the area is counted on a 4x finer node set
  auto fine = make_grid(513, 1.0);
  double fine_area = 0.0;
  const ScalarField ff = build_phantom(spec, fine);
  for (std::size_t k = 0; k < ff.size(); ++k) fine_area += ff[k] * fine->cell_area();
  CHECK(std::abs(fine_area - std::numbers::pi * 0.16) < 4.0 * fine->spacing());
  CHECK(std::abs(integral - std::numbers::pi * 0.16) < 4.0 * g->spacing());
}

TEST_CASE("overlapping discs superpose") {
  auto g = make_grid(65, 1.0);
  PhantomSpec spec{{DiscShape{{0.0, 0.0}, 0.5, 1.0}, DiscShape{{0.2, 0.0}, 0.3, -1.0}}};
  const ScalarField f = build_phantom(spec, g);
  for (std::size_t k = 0; k < f.size(); ++k) CHECK((f[k] == -1.0 || f[k] == 0.0 || f[k] == 1.0));
  CHECK(f.at(32, 32 + 6) == 0.0);  // (0.1875, 0) in both
}

TEST_CASE("phantom is linear in the amplitudes") {
  auto g = make_grid(33, 1.0);
  PhantomSpec a{{EllipseShape{{0.1, 0.1}, 0.3, 0.1, 0.4, 1.0}, GaussianShape{{-0.2, 0.0}, 0.1, 2.0}}};
  PhantomSpec b = a;
  std::get<EllipseShape>(b.primitives[0]).amplitude = 3.0;
  std::get<GaussianShape>(b.primitives[1]).amplitude = 6.0;
  const ScalarField fa = build_phantom(a, g);
  const ScalarField fb = build_phantom(b, g);
  for (std::size_t k = 0; k < fa.size(); ++k) CHECK(fb[k] == doctest::Approx(3.0 * fa[k]));
}

TEST_CASE("gaussian primitive values") {
  auto g = make_grid(33, 1.0);
  PhantomSpec spec{{GaussianShape{{0.0, 0.0}, 0.2, 1.5}}};
  const ScalarField f = build_phantom(spec, g);
  CHECK(f.at(16, 16) == doctest::Approx(1.5));
  const Point p = g->node(16, 20);
  CHECK(f.at(16, 20) == doctest::Approx(1.5 * std::exp(-p.x * p.x / 0.08)));
}

TEST_CASE("primitives leaving the disc are rejected") {
  auto g = make_grid(17, 1.0);
  CHECK_THROWS_AS(build_phantom({{DiscShape{{0.7, 0.0}, 0.4, 1.0}}}, g), UsageError);
  CHECK_THROWS_AS(build_phantom({{GaussianShape{{0.0, 0.0}, 0.4, 1.0}}}, g), UsageError);
  CHECK_THROWS_AS(build_phantom({{DiscShape{{0.0, 0.0}, 0.0, 1.0}}}, g), UsageError);
}

TEST_CASE("default phantoms fit in the unit disc") {
  auto g = make_grid(33, 1.0);
  CHECK_NOTHROW(build_phantom(default_tat_phantom(1.0), g));
  const ScalarField s = build_phantom(default_schlieren_phantom(), g);
  double sum = 0.0;
  double lowest = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    sum += s[k];
    lowest = std::min(lowest, s[k]);
  }
  CHECK(sum > 0.0);
  CHECK(lowest < 0.0);
}

TEST_CASE("noise is calibrated exactly") {
  const Signal y = oracle::random_signal(200, 9);
  const auto radial = SignalSampling::radial(200, 2.0);
  const auto plain = SignalSampling::uniform(200, -1.0, 1.0);
  for (auto model : {NoiseModel::uniform, NoiseModel::gaussian}) {
    for (const SignalSampling* s : {&radial, &plain}) {
      const NoisySignal n = add_noise(y, s->weights(), model, 0.05, 42);
      Signal diff(y.size());
      for (std::size_t k = 0; k < y.size(); ++k) diff[k] = n.noisy[k] - y[k];
      const double rel = weighted_norm(diff, s->weights()) / weighted_norm(y, s->weights());
      CHECK(std::abs(rel - 0.05) <= 1e-14);
      CHECK(n.delta == weighted_norm(diff, s->weights()));
    }
  }
}

TEST_CASE("noise edge cases") {
  const Signal y = oracle::random_signal(50, 1);
  const auto s = SignalSampling::uniform(50, 0.0, 1.0);
  const NoisySignal none = add_noise(y, s.weights(), NoiseModel::gaussian, 0.0, 1);
  CHECK(none.noisy == y);
  CHECK(none.delta == 0.0);
  const NoisySignal a = add_noise(y, s.weights(), NoiseModel::uniform, 0.1, 5);
  const NoisySignal b = add_noise(y, s.weights(), NoiseModel::uniform, 0.1, 5);
  const NoisySignal c = add_noise(y, s.weights(), NoiseModel::uniform, 0.1, 6);
  CHECK(a.noisy == b.noisy);
  CHECK(a.noisy != c.noisy);
  const Signal zero(50, 0.0);
  CHECK_THROWS_WITH_AS(add_noise(zero, s.weights(), NoiseModel::uniform, 0.1, 1),
                       doctest::Contains("relative noise undefined"), UsageError);
  CHECK_THROWS_AS(add_noise(y, s.weights(), NoiseModel::uniform, -0.1, 1), UsageError);
  CHECK(parse_noise_model("Gaussian") == NoiseModel::gaussian);
  CHECK_THROWS_AS(parse_noise_model("pink"), UsageError);
}

TEST_CASE("system noise uses per-equation seeds and stores exact levels") {
  auto g = make_grid(17, 1.0);
  const CircularMeanModel model(CircularMeanOperator(g, 4));
  const ScalarField truth = build_phantom(default_tat_phantom(1.0), g);
  const NoisySystemData d = make_noisy_data(model, truth, NoiseModel::uniform, 0.05, 77);
  REQUIRE(d.noisy.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    Signal diff(d.clean[i].size());
    for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = d.noisy[i][k] - d.clean[i][k];
    CHECK(std::abs(model.data_norm(i, diff) - d.deltas[i]) <= 1e-14 * d.deltas[i]);
    const NoisySignal single =
        add_noise(d.clean[i], model.data_weights(i), NoiseModel::uniform, 0.05, 77 ^ i);
    CHECK(single.noisy == d.noisy[i]);
  }
}

TEST_CASE("synthesized data") {
  auto g = make_grid(17, 1.0);
  const CircularMeanModel tat(CircularMeanOperator(g, 3));
  for (const Signal& y : synthesize_data(tat, ScalarField(g)))
    for (double v : y) CHECK(v == 0.0);
  const SchlierenModel sch(SchlierenOperator(g, 3));
  const ScalarField x = oracle::random_field(g, 4);
  for (const Signal& y : synthesize_data(sch, x))
    for (double v : y) CHECK(v >= 0.0);
}
