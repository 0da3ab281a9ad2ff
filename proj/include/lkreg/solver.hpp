#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lkreg/operator_system.hpp"

namespace lkreg {

enum class Method {
  classical,  ///< LK: every step taken
  loping,     ///< lLK: steps gated by the discrepancy principle
  embedded,   ///< eLK: product-space iteration with a consensus step
};

std::string_view method_name(Method m);
/// Accepts "lk", "llk", "elk" (case-insensitive).
Method parse_method(std::string_view name);

inline constexpr double kMinimumTau = 2.0;

/// Row in an iteration trace.
///
/// For LK/lLK a row is one visited equation: `residual` is the data-norm
/// residual at the current iterate before the step, `omega` the gate, and
/// `error` the relative L^2 error after the step. For eLK each iteration
/// writes two rows, `equation = kStackedRow` for the data half-step (stacked
/// residual) and `equation = kConsensusRow` for the consensus half-step
/// (norm of the scaled penalty gradient).
struct TraceRow {
  std::size_t cycle = 0;
  long equation = 0;
  std::size_t step = 0;
  int omega = 0;
  double residual = 0.0;
  std::optional<double> error;
  /// Running count of omega = 1 rows in this cycle, this row included.
  std::size_t active_in_cycle = 0;
};

inline constexpr long kStackedRow = -1;
inline constexpr long kConsensusRow = -2;

using IterationTrace = std::vector<TraceRow>;

/// CSV with header cycle,i,n,omega,residual,error_l2,active_in_cycle and 17
/// significant digits; an absent error is an empty column.
void write_trace_csv(std::ostream& out, const IterationTrace& trace);
IterationTrace read_trace_csv(std::istream& in);

struct CycleReport {
  Method method;
  std::size_t cycle = 0;
  std::size_t active = 0;
  std::size_t visited = 0;
  std::optional<double> error;
};

struct SolverConfig {
  explicit SolverConfig(ScalarField initial);

  Method method = Method::loping;
  double tau = 2.5;
  std::size_t max_cycles = 50;
  /// eLK: epsilon(delta) = epsilon_coefficient * delta.
  double epsilon_coefficient = 1.0;
  /// eLK: scale of the consensus gradient, at most 1/4.
  double embedding_scale = 0.25;
  ScalarField initial_guess;
  std::optional<ScalarField> truth;
  std::function<void(const CycleReport&)> on_cycle;

  /// Throws UsageError if any field is out of range.
  void validate() const;
};

struct SolveResult {
  ScalarField solution;
  IterationTrace trace;
  /// True when the run ended by the discrepancy rule rather than max_cycles.
  bool converged = false;
  std::size_t cycles = 0;
  std::size_t active_steps = 0;
  std::size_t visited_steps = 0;
};

/// 1 iff residual_norm > tau * noise_level.
int loping_weight(double residual_norm, double noise_level, double tau);

SolveResult run_lk(const OperatorSystem& system, const SolverConfig& config);
SolveResult run_llk(const OperatorSystem& system, const SolverConfig& config);
SolveResult run_elk(const OperatorSystem& system, const SolverConfig& config);
/// Dispatches on config.method.
SolveResult solve(const OperatorSystem& system, const SolverConfig& config);

/// Product-space state (x^0, ..., x^{N-1}) on one grid.
class StackedState {
 public:
  StackedState(std::size_t count, const ScalarField& fill);
  explicit StackedState(std::vector<ScalarField> components);

  std::size_t size() const { return parts_.size(); }
  ScalarField& operator[](std::size_t i) { return parts_[i]; }
  const ScalarField& operator[](std::size_t i) const { return parts_[i]; }

  /// sqrt of the sum of squared L^2 norms.
  double norm() const;
  /// (1/N) sum_i x^i
  ScalarField average() const;

 private:
  std::vector<ScalarField> parts_;
};

/// G(x) = sum_i ||x^{i+1} - x^i||^2 with cyclic x^N := x^0.
double consensus_penalty(const StackedState& x);

/// scale * grad G; component i is 2 scale (2 x^i - x^{i-1} - x^{i+1}). For a
/// single component the penalty is vacuous and the result is zero.
StackedState stacked_penalty_gradient(const StackedState& x, double scale);

}  // namespace lkreg
