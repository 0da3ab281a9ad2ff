#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lkreg/phantom.hpp"
#include "lkreg/solver.hpp"

namespace lkreg {

enum class Problem { tat, schlieren };

std::string_view problem_name(Problem p);
Problem parse_problem(std::string_view name);

/// How the Schlieren step scale is chosen.
enum class StepRule {
  /// mu from the derivative norms at c * x0, where c > 0 matches the size of
  /// F(c x0) to the data.
  matched,
  /// mu from the derivative norms at x0 itself.
  initial,
};

std::string_view step_rule_name(StepRule r);
StepRule parse_step_rule(std::string_view name);

/// Every experiment takes place in the disc of this radius.
inline constexpr double kDomainRadius = 1.0;

struct ExperimentConfig {
  Problem problem = Problem::tat;
  std::size_t grid_side = 129;
  std::size_t equations = 80;
  NoiseModel noise = NoiseModel::uniform;
  double rho = 0.05;
  std::uint64_t seed = 1;
  Method method = Method::loping;
  double tau = 2.0;
  std::size_t max_cycles = 50;
  double c_eps = 1.0;
  double embedding_scale = 0.25;
  /// Constant value of x0 inside the disc.
  double initial_value = 0.0;
  StepRule step_rule = StepRule::matched;
  std::string output_dir = "lkreg_out";

  /// Throws UsageError naming the offending key.
  void validate() const;

  /// Sets one key from its text form; throws UsageError for unknown keys or
  /// unparsable values.
  void set(std::string_view key, std::string_view value);
  /// "key=value"
  void apply_override(std::string_view assignment);

  /// Full key = value listing that parses back to an equal config.
  void write(std::ostream& out) const;

  /// Reads `key = value` lines with `#` comments. Unknown and repeated keys
  /// are errors.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);

  static const std::vector<std::string>& keys();
};

/// Writes `<base>.txt` (first line "M R", then M rows of M values) and
/// `<base>.pgm` (binary P5, min-max scaled, image top = largest y).
void export_field(const ScalarField& field, const std::filesystem::path& base);
void write_field_text(std::ostream& out, const ScalarField& field);
void write_field_pgm(std::ostream& out, const ScalarField& field);
ScalarField read_field_text(std::istream& in);
ScalarField read_field(const std::filesystem::path& path);

/// Everything needed to run a solver on synthetic data.
struct ExperimentSetup {
  ExperimentConfig config;
  ScalarField truth;
  std::shared_ptr<const ForwardModel> model;
  NoisySystemData data;
  OperatorSystem system;
  ScalarField initial_guess;
};

/// phantom -> exact data -> noise -> operator system (with step scale).
ExperimentSetup prepare_experiment(const ExperimentConfig& config);

/// Solver settings from the config, with truth tracking enabled.
SolverConfig solver_config(const ExperimentSetup& setup);

/// Quantities reported after a run; all derivable from the trace alone.
struct RunSummary {
  std::size_t cycles = 0;
  bool converged = false;
  std::size_t active_steps = 0;
  std::size_t visited_steps = 0;
  /// Residuals of the rows in the last cycle, keyed by trace row id.
  std::vector<std::pair<long, double>> final_residuals;
  std::optional<double> final_error;

  double loped_fraction() const;
};

/// Converged means every row of the last cycle has omega = 0.
RunSummary summarize_trace(const IterationTrace& trace);
void write_summary(std::ostream& out, const RunSummary& summary);

struct ExperimentResult {
  ExperimentSetup setup;
  SolveResult solve;
  RunSummary summary;
};

/// Runs the configured solver and writes phantom.{txt,pgm},
/// reconstruction.{txt,pgm}, trace.csv, summary.txt and config.txt into the
/// output directory.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::function<void(const CycleReport&)> on_cycle = {});

/// phantom.{txt,pgm} and config.txt only.
void write_phantom_outputs(const ExperimentConfig& config);

/// Phantom plus data.csv (clean and noisy samples) and noise_levels.csv.
ExperimentSetup write_simulation_outputs(const ExperimentConfig& config);

/// Recomputes the summary from `<dir>/trace.csv`.
RunSummary report_from_directory(const std::filesystem::path& dir);

}  // namespace lkreg
