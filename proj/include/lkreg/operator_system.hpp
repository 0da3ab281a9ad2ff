#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lkreg/circular_mean.hpp"
#include "lkreg/grid.hpp"
#include "lkreg/schlieren.hpp"

namespace lkreg {

/// An indexed family of forward maps F_i : X -> Y_i.
///
/// Implementations must be free of side effects on their inputs so that
/// different equations can be evaluated concurrently.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::size_t equation_count() const = 0;
  virtual const GridPtr& grid() const = 0;
  virtual Signal evaluate(std::size_t i, const ScalarField& x) const = 0;
  /// F_i'(x)^* r in the model's image-space metric; linear in r.
  virtual ScalarField adjoint_derivative(std::size_t i, const ScalarField& x,
                                         std::span<const double> r) const = 0;
  /// Quadrature weights defining the data norm of equation i.
  virtual std::span<const double> data_weights(std::size_t i) const = 0;
  /// Sample positions (radius or line offset) of equation i.
  virtual std::span<const double> data_nodes(std::size_t i) const = 0;

  double data_norm(std::size_t i, std::span<const double> r) const {
    return weighted_norm(r, data_weights(i));
  }
};

/// Circular means about semicircle detectors; linear, so the adjoint
/// derivative ignores x.
class CircularMeanModel final : public ForwardModel {
 public:
  explicit CircularMeanModel(CircularMeanOperator op) : op_(std::move(op)) {}

  const CircularMeanOperator& op() const { return op_; }
  std::size_t equation_count() const override { return op_.detectors().size(); }
  const GridPtr& grid() const override { return op_.grid_ptr(); }
  Signal evaluate(std::size_t i, const ScalarField& x) const override {
    return op_.forward(x, i);
  }
  ScalarField adjoint_derivative(std::size_t i, const ScalarField&,
                                 std::span<const double> r) const override {
    return op_.adjoint(r, i);
  }
  std::span<const double> data_weights(std::size_t) const override {
    return op_.sampling().weights();
  }
  std::span<const double> data_nodes(std::size_t) const override {
    return op_.sampling().nodes();
  }

 private:
  CircularMeanOperator op_;
};

class SchlierenModel final : public ForwardModel {
 public:
  explicit SchlierenModel(SchlierenOperator op) : op_(std::move(op)) {}

  const SchlierenOperator& op() const { return op_; }
  std::size_t equation_count() const override { return op_.size(); }
  const GridPtr& grid() const override { return op_.grid_ptr(); }
  Signal evaluate(std::size_t i, const ScalarField& x) const override {
    return op_.forward(x, i);
  }
  ScalarField adjoint_derivative(std::size_t i, const ScalarField& x,
                                 std::span<const double> r) const override {
    return op_.adjoint_derivative(x, r, i);
  }
  std::span<const double> data_weights(std::size_t) const override {
    return op_.sampling().weights();
  }
  std::span<const double> data_nodes(std::size_t) const override {
    return op_.sampling().nodes();
  }

 private:
  SchlierenOperator op_;
};

/// Model plus per-equation data y^delta_i, noise levels delta_i and the
/// Landweber step scale applied to every update.
struct OperatorSystem {
  std::shared_ptr<const ForwardModel> model;
  std::vector<Signal> data;
  std::vector<double> noise_levels;
  double step_scale = 1.0;

  std::size_t size() const { return data.size(); }
  /// Throws UsageError on inconsistent sizes or invalid levels.
  void validate() const;
};

}  // namespace lkreg
