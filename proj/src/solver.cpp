#include "lkreg/solver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lkreg {

void OperatorSystem::validate() const {
  if (!model) throw UsageError("operator system has no forward model");
  const std::size_t n = model->equation_count();
  if (n == 0) throw UsageError("operator system needs at least one equation");
  if (data.size() != n || noise_levels.size() != n) {
    throw UsageError("operator system: data/noise count differs from equation count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (data[i].size() != model->data_weights(i).size()) {
      std::ostringstream msg;
      msg << "operator system: data of equation " << i
          << " does not match its sampling";
      throw UsageError(msg.str());
    }
    if (!(noise_levels[i] >= 0.0) || !std::isfinite(noise_levels[i])) {
      throw UsageError("operator system: noise levels must be finite and >= 0");
    }
  }
  if (!(step_scale > 0.0) || !std::isfinite(step_scale)) {
    throw UsageError("operator system: step scale must be positive");
  }
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::classical: return "lk";
    case Method::loping: return "llk";
    case Method::embedded: return "elk";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "lk") return Method::classical;
  if (lower == "llk") return Method::loping;
  if (lower == "elk") return Method::embedded;
  throw UsageError("unknown method '" + std::string(name) + "' (expected lk, llk or elk)");
}

SolverConfig::SolverConfig(ScalarField initial) : initial_guess(std::move(initial)) {}

void SolverConfig::validate() const {
  if (!(tau >= kMinimumTau) || !std::isfinite(tau)) {
    throw UsageError("tau must be >= 2");
  }
  if (max_cycles == 0) throw UsageError("max_cycles must be positive");
  if (!(epsilon_coefficient > 0.0)) {
    throw UsageError("epsilon coefficient must be positive");
  }
  if (!(embedding_scale > 0.0 && embedding_scale <= 0.25)) {
    throw UsageError("embedding scale must lie in (0, 1/4]");
  }
  if (!initial_guess.all_finite()) throw UsageError("initial guess is not finite");
  if (truth) require_same_grid(initial_guess, *truth, "solver truth");
}

int loping_weight(double residual_norm, double noise_level, double tau) {
  return residual_norm > tau * noise_level ? 1 : 0;
}

namespace {

void check_inputs(const OperatorSystem& system, const SolverConfig& config) {
  system.validate();
  config.validate();
  if (!(config.initial_guess.grid() == *system.model->grid())) {
    throw UsageError("initial guess lives on a different grid than the model");
  }
}

class ErrorTracker {
 public:
  explicit ErrorTracker(const std::optional<ScalarField>& truth) : truth_(truth) {
    if (truth_) {
      const double n = l2_norm(*truth_);
      scale_ = n > 0.0 ? 1.0 / n : 1.0;
    }
  }
  std::optional<double> operator()(const ScalarField& x) const {
    if (!truth_) return std::nullopt;
    return l2_norm(x - *truth_) * scale_;
  }

 private:
  const std::optional<ScalarField>& truth_;
  double scale_ = 1.0;
};

[[noreturn]] void non_finite(std::size_t cycle, long equation) {
  std::ostringstream msg;
  msg << "non-finite iterate in cycle " << cycle << ", equation " << equation;
  throw NumericalError(msg.str());
}

Signal residual_of(const OperatorSystem& system, std::size_t i, const ScalarField& x) {
  Signal r = system.model->evaluate(i, x);
  const Signal& y = system.data[i];
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= y[k];
  return r;
}

// Shared sweep for LK and lLK; `gated` selects the loping weight.
SolveResult run_sweeps(const OperatorSystem& system, const SolverConfig& config,
                       bool gated) {
  check_inputs(system, config);
  const std::size_t n_eq = system.size();
  const ErrorTracker error_of(config.truth);

  SolveResult result{config.initial_guess, {}, false, 0, 0, 0};
  ScalarField& x = result.solution;
  result.trace.reserve(config.max_cycles * n_eq);
  std::size_t step = 0;

  for (std::size_t cycle = 1; cycle <= config.max_cycles; ++cycle) {
    std::size_t active = 0;
    for (std::size_t i = 0; i < n_eq; ++i) {
      const Signal r = residual_of(system, i, x);
      const double res = system.model->data_norm(i, r);
      if (!std::isfinite(res)) non_finite(cycle, static_cast<long>(i));
      const int omega =
          gated ? loping_weight(res, system.noise_levels[i], config.tau) : 1;
      if (omega == 1) {
        const ScalarField g = system.model->adjoint_derivative(i, x, r);
        x.add_scaled(-system.step_scale, g);
        if (!x.all_finite()) non_finite(cycle, static_cast<long>(i));
        ++active;
      }
      result.trace.push_back({cycle, static_cast<long>(i), step++, omega, res,
                              error_of(x), active});
    }
    result.cycles = cycle;
    result.active_steps += active;
    result.visited_steps += n_eq;
    if (config.on_cycle) {
      config.on_cycle({config.method, cycle, active, n_eq,
                       result.trace.back().error});
    }
    if (gated && active == 0) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace

SolveResult run_lk(const OperatorSystem& system, const SolverConfig& config) {
  if (config.method != Method::classical) {
    throw UsageError("run_lk requires method lk");
  }
  return run_sweeps(system, config, false);
}

SolveResult run_llk(const OperatorSystem& system, const SolverConfig& config) {
  if (config.method != Method::loping) {
    throw UsageError("run_llk requires method llk");
  }
  return run_sweeps(system, config, true);
}

StackedState::StackedState(std::size_t count, const ScalarField& fill)
    : parts_(count, fill) {
  if (count == 0) throw UsageError("stacked state needs at least one component");
}

StackedState::StackedState(std::vector<ScalarField> components)
    : parts_(std::move(components)) {
  if (parts_.empty()) throw UsageError("stacked state needs at least one component");
  for (const auto& p : parts_) require_same_grid(parts_.front(), p, "stacked state");
}

double StackedState::norm() const {
  double sum = 0.0;
  for (const auto& p : parts_) sum += l2_inner(p, p);
  return std::sqrt(sum);
}

ScalarField StackedState::average() const {
  ScalarField avg(parts_.front().grid_ptr());
  for (const auto& p : parts_) avg += p;
  avg *= 1.0 / static_cast<double>(parts_.size());
  return avg;
}

double consensus_penalty(const StackedState& x) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const ScalarField d = x[(i + 1) % n] - x[i];
    sum += l2_inner(d, d);
  }
  return sum;
}

StackedState stacked_penalty_gradient(const StackedState& x, double scale) {
  const std::size_t n = x.size();
  StackedState g(n, ScalarField(x[0].grid_ptr()));
  if (n < 2) return g;
  for (std::size_t i = 0; i < n; ++i) {
    const ScalarField& prev = x[(i + n - 1) % n];
    const ScalarField& next = x[(i + 1) % n];
    const ScalarField& cur = x[i];
    ScalarField& out = g[i];
    for (std::size_t k = 0; k < cur.size(); ++k) {
      out[k] = 2.0 * scale * (2.0 * cur[k] - prev[k] - next[k]);
    }
  }
  return g;
}

SolveResult run_elk(const OperatorSystem& system, const SolverConfig& config) {
  if (config.method != Method::embedded) {
    throw UsageError("run_elk requires method elk");
  }
  check_inputs(system, config);
  const std::size_t n_eq = system.size();
  const ErrorTracker error_of(config.truth);
  const double delta =
      *std::max_element(system.noise_levels.begin(), system.noise_levels.end());
  const double epsilon = config.epsilon_coefficient * delta;

  StackedState x(n_eq, config.initial_guess);
  SolveResult result{config.initial_guess, {}, false, 0, 0, 0};
  std::size_t step = 0;

  for (std::size_t cycle = 1; cycle <= config.max_cycles; ++cycle) {
    std::vector<Signal> residuals(n_eq);
    double stacked_sq = 0.0;
    for (std::size_t i = 0; i < n_eq; ++i) {
      residuals[i] = residual_of(system, i, x[i]);
      const double r = system.model->data_norm(i, residuals[i]);
      stacked_sq += r * r;
    }
    const double stacked = std::sqrt(stacked_sq);
    if (!std::isfinite(stacked)) non_finite(cycle, kStackedRow);
    const int omega = loping_weight(stacked, delta, config.tau);
    std::size_t active = 0;
    if (omega == 1) {
      // Components are independent here; each uses only its own equation.
      for (std::size_t i = 0; i < n_eq; ++i) {
        const ScalarField g = system.model->adjoint_derivative(i, x[i], residuals[i]);
        x[i].add_scaled(-system.step_scale, g);
        if (!x[i].all_finite()) non_finite(cycle, static_cast<long>(i));
      }
      ++active;
    }
    const bool track = config.truth.has_value();
    result.trace.push_back({cycle, kStackedRow, step++, omega, stacked,
                            track ? error_of(x.average()) : std::nullopt, active});

    const StackedState g = stacked_penalty_gradient(x, config.embedding_scale);
    const double g_norm = g.norm();
    const int omega_half = loping_weight(g_norm, epsilon, config.tau);
    if (omega_half == 1) {
      for (std::size_t i = 0; i < n_eq; ++i) x[i] -= g[i];
      ++active;
    }
    result.trace.push_back({cycle, kConsensusRow, step++, omega_half, g_norm,
                            track ? error_of(x.average()) : std::nullopt, active});

    result.cycles = cycle;
    result.active_steps += active;
    result.visited_steps += 2;
    if (config.on_cycle) {
      config.on_cycle({config.method, cycle, active, 2, result.trace.back().error});
    }
    if (active == 0) {
      result.converged = true;
      break;
    }
  }
  result.solution = x.average();
  return result;
}

SolveResult solve(const OperatorSystem& system, const SolverConfig& config) {
  switch (config.method) {
    case Method::classical: return run_lk(system, config);
    case Method::loping: return run_llk(system, config);
    case Method::embedded: return run_elk(system, config);
  }
  throw UsageError("unknown method");
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  out << "cycle,i,n,omega,residual,error_l2,active_in_cycle\n";
  out << std::setprecision(17);
  for (const TraceRow& row : trace) {
    out << row.cycle << ',' << row.equation << ',' << row.step << ','
        << row.omega << ',' << row.residual << ',';
    if (row.error) out << *row.error;
    out << ',' << row.active_in_cycle << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cols.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  cols.push_back(cur);
  return cols;
}

template <class T>
T parse_number(const std::string& text, std::size_t line_no) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    std::ostringstream msg;
    msg << "trace line " << line_no << ": bad number '" << text << "'";
    throw UsageError(msg.str());
  }
  return value;
}

}  // namespace

IterationTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw UsageError("trace: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "cycle,i,n,omega,residual,error_l2,active_in_cycle") {
    throw UsageError("trace: unexpected header '" + line + "'");
  }
  IterationTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cols = split_csv(line);
    if (cols.size() != 7) {
      std::ostringstream msg;
      msg << "trace line " << line_no << ": expected 7 columns";
      throw UsageError(msg.str());
    }
    TraceRow row;
    row.cycle = parse_number<std::size_t>(cols[0], line_no);
    row.equation = parse_number<long>(cols[1], line_no);
    row.step = parse_number<std::size_t>(cols[2], line_no);
    row.omega = parse_number<int>(cols[3], line_no);
    row.residual = parse_number<double>(cols[4], line_no);
    if (!cols[5].empty()) row.error = parse_number<double>(cols[5], line_no);
    row.active_in_cycle = parse_number<std::size_t>(cols[6], line_no);
    trace.push_back(row);
  }
  return trace;
}

}  // namespace lkreg
