#include "lkreg/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lkreg {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            std::string_view expected) {
  throw UsageError("config key '" + std::string(key) + "': bad value '" +
                   std::string(value) + "' (expected " + std::string(expected) + ")");
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || end != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite real number");
  }
  return out;
}

// Shortest text that reads back to the same double.
std::string format_real(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::ofstream open_output(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void write_config_file(const ExperimentConfig& config, const fs::path& dir) {
  const fs::path path = dir / "config.txt";
  auto out = open_output(path);
  config.write(out);
  finish(out, path);
}

PhantomSpec phantom_for(Problem p) {
  return p == Problem::tat ? default_tat_phantom(kDomainRadius) : default_schlieren_phantom();
}

}  // namespace

std::string_view problem_name(Problem p) { return p == Problem::tat ? "tat" : "schlieren"; }

Problem parse_problem(std::string_view name) {
  const std::string l = lower(name);
  if (l == "tat") return Problem::tat;
  if (l == "schlieren") return Problem::schlieren;
  throw UsageError("unknown problem '" + std::string(name) + "' (expected tat or schlieren)");
}

std::string_view step_rule_name(StepRule r) {
  return r == StepRule::matched ? "matched" : "initial";
}

StepRule parse_step_rule(std::string_view name) {
  const std::string l = lower(name);
  if (l == "matched") return StepRule::matched;
  if (l == "initial") return StepRule::initial;
  throw UsageError("unknown step rule '" + std::string(name) +
                   "' (expected matched or initial)");
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "problem", "grid_side", "equations",       "noise",         "rho",
      "seed",    "method",    "tau",             "max_cycles",    "c_eps",
      "embedding_scale",      "initial_value",   "step_rule",     "output_dir"};
  return k;
}

void ExperimentConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "problem") {
    problem = parse_problem(value);
  } else if (key == "grid_side") {
    grid_side = parse_integer<std::size_t>(key, value);
  } else if (key == "equations") {
    equations = parse_integer<std::size_t>(key, value);
  } else if (key == "noise") {
    noise = parse_noise_model(value);
  } else if (key == "rho") {
    rho = parse_real(key, value);
  } else if (key == "seed") {
    seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "method") {
    method = parse_method(value);
  } else if (key == "tau") {
    tau = parse_real(key, value);
  } else if (key == "max_cycles") {
    max_cycles = parse_integer<std::size_t>(key, value);
  } else if (key == "c_eps") {
    c_eps = parse_real(key, value);
  } else if (key == "embedding_scale") {
    embedding_scale = parse_real(key, value);
  } else if (key == "initial_value") {
    initial_value = parse_real(key, value);
  } else if (key == "step_rule") {
    step_rule = parse_step_rule(value);
  } else if (key == "output_dir") {
    if (value.empty()) bad_value(key, value, "a path");
    output_dir = std::string(value);
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw UsageError("override '" + std::string(assignment) + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void ExperimentConfig::validate() const {
  if (grid_side < 3 || grid_side % 2 == 0) {
    throw UsageError("grid_side must be odd and >= 3");
  }
  if (equations < 1) throw UsageError("equations must be >= 1");
  if (!(rho >= 0.0)) throw UsageError("rho must be >= 0");
  if (!(tau >= kMinimumTau)) throw UsageError("tau must be >= 2");
  if (max_cycles < 1) throw UsageError("max_cycles must be >= 1");
  if (!(c_eps > 0.0)) throw UsageError("c_eps must be positive");
  if (!(embedding_scale > 0.0 && embedding_scale <= 0.25)) {
    throw UsageError("embedding_scale must lie in (0, 0.25]");
  }
  if (output_dir.empty()) throw UsageError("output_dir must not be empty");
}

void ExperimentConfig::write(std::ostream& out) const {
  out << "problem = " << problem_name(problem) << '\n'
      << "grid_side = " << grid_side << '\n'
      << "equations = " << equations << '\n'
      << "noise = " << noise_model_name(noise) << '\n'
      << "rho = " << format_real(rho) << '\n'
      << "seed = " << seed << '\n'
      << "method = " << method_name(method) << '\n'
      << "tau = " << format_real(tau) << '\n'
      << "max_cycles = " << max_cycles << '\n'
      << "c_eps = " << format_real(c_eps) << '\n'
      << "embedding_scale = " << format_real(embedding_scale) << '\n'
      << "initial_value = " << format_real(initial_value) << '\n'
      << "step_rule = " << step_rule_name(step_rule) << '\n'
      << "output_dir = " << output_dir << '\n'
      << "# rng " << kRngAlgorithm << '\n';
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(text.substr(0, eq)));
    if (!seen.insert(key).second) {
      throw UsageError("config line " + std::to_string(line_no) + ": repeated key '" +
                       key + "'");
    }
    try {
      cfg.set(key, text.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  return parse(in);
}

void write_field_text(std::ostream& out, const ScalarField& field) {
  const Grid2D& g = field.grid();
  out << g.side() << ' ' << format_real(g.half_width()) << '\n';
  for (std::size_t row = 0; row < g.side(); ++row) {
    for (std::size_t col = 0; col < g.side(); ++col) {
      if (col) out << ' ';
      out << format_real(field.at(row, col));
    }
    out << '\n';
  }
}

void write_field_pgm(std::ostream& out, const ScalarField& field) {
  if (!field.all_finite()) throw NumericalError("cannot export a non-finite field");
  const Grid2D& g = field.grid();
  const auto v = field.values();
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  out << "P5\n# range " << format_real(lo) << ' ' << format_real(hi) << '\n'
      << g.side() << ' ' << g.side() << "\n255\n";
  std::string row_bytes(g.side(), '\0');
  // Image rows run from the largest y down.
  for (std::size_t r = g.side(); r-- > 0;) {
    for (std::size_t col = 0; col < g.side(); ++col) {
      const double s = hi > lo ? (field.at(r, col) - lo) / (hi - lo) : 0.0;
      row_bytes[col] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s)));
    }
    out.write(row_bytes.data(), static_cast<std::streamsize>(row_bytes.size()));
  }
}

void export_field(const ScalarField& field, const fs::path& base) {
  if (!field.all_finite()) throw NumericalError("cannot export a non-finite field");
  fs::path txt = base;
  txt += ".txt";
  fs::path pgm = base;
  pgm += ".pgm";
  {
    auto out = open_output(txt);
    write_field_text(out, field);
    finish(out, txt);
  }
  auto out = open_output(pgm, std::ios::out | std::ios::binary);
  write_field_pgm(out, field);
  finish(out, pgm);
}

ScalarField read_field_text(std::istream& in) {
  std::size_t side = 0;
  double radius = 0.0;
  if (!(in >> side >> radius)) throw UsageError("field file: bad header");
  ScalarField field(make_grid(side, radius));
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (!(in >> field[k])) throw UsageError("field file: too few values");
  }
  double extra = 0.0;
  if (in >> extra) throw UsageError("field file: too many values");
  return field;
}

ScalarField read_field(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read field '" + path.string() + "'");
  return read_field_text(in);
}

ExperimentSetup prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  GridPtr grid = make_grid(config.grid_side, kDomainRadius);
  ScalarField truth = build_phantom(phantom_for(config.problem), grid);

  std::shared_ptr<const ForwardModel> model;
  if (config.problem == Problem::tat) {
    model = std::make_shared<CircularMeanModel>(CircularMeanOperator(grid, config.equations));
  } else {
    model = std::make_shared<SchlierenModel>(SchlierenOperator(grid, config.equations));
  }
  NoisySystemData data = make_noisy_data(*model, truth, config.noise, config.rho, config.seed);

  ScalarField x0(grid, config.initial_value);
  x0.restrict_to_disc();

  double step_scale = 1.0;  // ||M_i|| <= 1
  if (config.problem == Problem::schlieren) {
    const auto& op = static_cast<const SchlierenModel&>(*model).op();
    ScalarField at = x0;
    if (config.step_rule == StepRule::matched) {
      // F is homogeneous of degree 2, so F(c x0) has the size of the data
      // when c^2 = sum ||y_i|| / sum ||F_i(x0)||.
      double ny = 0.0;
      double nf = 0.0;
      for (std::size_t i = 0; i < model->equation_count(); ++i) {
        ny += model->data_norm(i, data.noisy[i]);
        nf += model->data_norm(i, model->evaluate(i, x0));
      }
      if (!(nf > 0.0)) throw NumericalError("derivative vanishes at initial guess");
      at *= std::sqrt(ny / nf);
    }
    const double mu = op.step_scaling_mu(at);
    step_scale = mu * mu;
  }

  OperatorSystem system{model, data.noisy, data.deltas, step_scale};
  system.validate();
  return {config, std::move(truth), std::move(model), std::move(data), std::move(system),
          std::move(x0)};
}

SolverConfig solver_config(const ExperimentSetup& setup) {
  const ExperimentConfig& c = setup.config;
  SolverConfig s{setup.initial_guess};
  s.method = c.method;
  s.tau = c.tau;
  s.max_cycles = c.max_cycles;
  s.epsilon_coefficient = c.c_eps;
  s.embedding_scale = c.embedding_scale;
  s.truth = setup.truth;
  return s;
}

double RunSummary::loped_fraction() const {
  if (visited_steps == 0) return 0.0;
  return 1.0 - static_cast<double>(active_steps) / static_cast<double>(visited_steps);
}

RunSummary summarize_trace(const IterationTrace& trace) {
  RunSummary s;
  if (trace.empty()) return s;
  s.cycles = trace.back().cycle;
  s.visited_steps = trace.size();
  bool last_all_zero = true;
  for (const TraceRow& row : trace) {
    s.active_steps += static_cast<std::size_t>(row.omega);
    if (row.cycle == s.cycles) {
      s.final_residuals.emplace_back(row.equation, row.residual);
      if (row.omega != 0) last_all_zero = false;
    }
  }
  s.converged = last_all_zero;
  s.final_error = trace.back().error;
  return s;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "cycles = " << s.cycles << '\n'
      << "converged = " << (s.converged ? "true" : "false") << '\n'
      << "active_steps = " << s.active_steps << '\n'
      << "visited_steps = " << s.visited_steps << '\n'
      << "loped_fraction = " << format_real(s.loped_fraction()) << '\n'
      << "final_error = " << (s.final_error ? format_real(*s.final_error) : "") << '\n';
  for (const auto& [row, value] : s.final_residuals) {
    out << "final_residual." << row << " = " << format_real(value) << '\n';
  }
}

void write_phantom_outputs(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = config.output_dir;
  ensure_directory(dir);
  GridPtr grid = make_grid(config.grid_side, kDomainRadius);
  export_field(build_phantom(phantom_for(config.problem), grid), dir / "phantom");
  write_config_file(config, dir);
}

ExperimentSetup write_simulation_outputs(const ExperimentConfig& config) {
  ExperimentSetup setup = prepare_experiment(config);
  const fs::path dir = config.output_dir;
  ensure_directory(dir);
  export_field(setup.truth, dir / "phantom");
  {
    const fs::path path = dir / "data.csv";
    auto out = open_output(path);
    out << "i,k,node,weight,clean,noisy\n";
    for (std::size_t i = 0; i < setup.data.clean.size(); ++i) {
      const auto nodes = setup.model->data_nodes(i);
      const auto w = setup.model->data_weights(i);
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        out << i << ',' << k << ',' << format_real(nodes[k]) << ',' << format_real(w[k])
            << ',' << format_real(setup.data.clean[i][k]) << ','
            << format_real(setup.data.noisy[i][k]) << '\n';
      }
    }
    finish(out, path);
  }
  {
    const fs::path path = dir / "noise_levels.csv";
    auto out = open_output(path);
    out << "i,delta\n";
    for (std::size_t i = 0; i < setup.data.deltas.size(); ++i) {
      out << i << ',' << format_real(setup.data.deltas[i]) << '\n';
    }
    finish(out, path);
  }
  write_config_file(config, dir);
  return setup;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::function<void(const CycleReport&)> on_cycle) {
  ExperimentSetup setup = prepare_experiment(config);
  const fs::path dir = config.output_dir;
  ensure_directory(dir);

  SolverConfig sc = solver_config(setup);
  sc.on_cycle = std::move(on_cycle);
  SolveResult result = [&] {
    try {
      return solve(setup.system, sc);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(problem_name(config.problem)) + " " +
                           std::string(method_name(config.method)) + ": " + e.what());
    }
  }();
  RunSummary summary = summarize_trace(result.trace);

  export_field(setup.truth, dir / "phantom");
  export_field(result.solution, dir / "reconstruction");
  {
    const fs::path path = dir / "trace.csv";
    auto out = open_output(path);
    write_trace_csv(out, result.trace);
    finish(out, path);
  }
  {
    const fs::path path = dir / "summary.txt";
    auto out = open_output(path);
    write_summary(out, summary);
    finish(out, path);
  }
  write_config_file(config, dir);
  return {std::move(setup), std::move(result), std::move(summary)};
}

RunSummary report_from_directory(const fs::path& dir) {
  const fs::path path = dir / "trace.csv";
  std::ifstream in(path);
  if (!in) throw IoError("cannot read trace '" + path.string() + "'");
  return summarize_trace(read_trace_csv(in));
}

}  // namespace lkreg
