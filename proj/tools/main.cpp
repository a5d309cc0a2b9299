// Command-line front end: single-point phase queries, theta sweeps, the six
// figure datasets, and the cross-validation suite.  All numeric output is CSV
// with angles and phases in units of pi.
//
// Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.

#include "gphase/phase.hpp"
#include "gphase/sweep.hpp"
#include "gphase/validate.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Accepts plain radians ("1.5707") or pi-suffixed literals ("0.5pi", "pi").
double parse_angle(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (body.size() >= 2 && body.compare(body.size() - 2, 2, "pi") == 0) {
    scale = gphase::kPi;
    body = body.substr(0, body.size() - 2);
    if (body.empty()) body = "1";
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(body, &used);
  } catch (const std::exception&) {
    throw UsageError("cannot parse angle '" + text + "'");
  }
  if (used != body.size()) throw UsageError("cannot parse angle '" + text + "'");
  return value * scale;
}

struct ModelFlags {
  std::string model;
  std::optional<double> gamma2;
  std::optional<double> gamma;
  std::optional<double> gamma0;
  double omega = 1.0;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--model", model, "evolution model: markovian|correlated|memory|post")
        ->required();
    auto opt = [&cmd](const char* name, std::optional<double>& slot, const char* desc) {
      cmd.add_option_function<double>(name, [&slot](double v) { slot = v; }, desc);
    };
    opt("--gamma2", gamma2, "decay rate of the markovian model");
    opt("--gamma", gamma, "band rate (correlated) or inverse memory time (memory/post)");
    opt("--gamma0", gamma0, "dissipation constant of the memory/post models");
    cmd.add_option("--omega", omega, "transition angular frequency")->default_val(1.0);
  }

  gphase::ModelParams build() const {
    auto require = [](const std::optional<double>& v, const char* flag) {
      if (!v) throw UsageError(std::string("missing required flag ") + flag);
      return *v;
    };
    auto forbid = [](const std::optional<double>& v, const char* flag, const char* model) {
      if (v) throw UsageError(std::string(flag) + " does not apply to the " + model + " model");
    };
    try {
      if (model == "markovian") {
        forbid(gamma, "--gamma", "markovian");
        forbid(gamma0, "--gamma0", "markovian");
        return gphase::markovian(require(gamma2, "--gamma2"), omega);
      }
      if (model == "correlated") {
        forbid(gamma2, "--gamma2", "correlated");
        forbid(gamma0, "--gamma0", "correlated");
        return gphase::correlated(require(gamma, "--gamma"), omega);
      }
      if (model == "memory") {
        forbid(gamma2, "--gamma2", "memory");
        return gphase::memory_kernel(require(gamma0, "--gamma0"), require(gamma, "--gamma"), omega);
      }
      if (model == "post") {
        forbid(gamma2, "--gamma2", "post");
        return gphase::post_markovian(require(gamma0, "--gamma0"), require(gamma, "--gamma"),
                                      omega);
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    throw UsageError("unknown model '" + model + "'");
  }
};

int run_phase(const ModelFlags& flags, const std::string& theta_text, int steps) {
  const gphase::ModelParams model = flags.build();
  const double theta = parse_angle(theta_text);
  if (!(theta >= 0.0 && theta <= gphase::kPi)) throw UsageError("theta must lie in [0, pi]");
  gphase::QuadratureConfig config;
  config.steps = steps;
  const gphase::PhaseResult result = gphase::phase_closed(model, theta, config);
  std::vector<gphase::SweepRow> row = {{theta, result}};
  gphase::write_sweep_csv(std::cout, model, row);
  return 0;
}

int run_sweep_cmd(const ModelFlags& flags, const std::string& start_text,
                  const std::string& end_text, int count, int steps,
                  const std::string& output, int threads) {
  gphase::SweepSpec spec;
  spec.model = flags.build();
  spec.theta_start = parse_angle(start_text);
  spec.theta_end = parse_angle(end_text);
  spec.theta_count = count;
  spec.quadrature_steps = steps;
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::vector<gphase::SweepRow> rows = gphase::run_sweep(spec, threads);
  std::ofstream os(output, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open '" << output << "' for writing\n";
    return kExitIo;
  }
  gphase::write_sweep_csv(os, spec.model, rows);
  os.flush();
  if (!os) {
    std::cerr << "error: write failed on '" << output << "'\n";
    return kExitIo;
  }
  return 0;
}

int run_figures(const std::string& output_dir, int steps, int threads) {
  try {
    gphase::write_figure_files(output_dir, steps, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

int run_validate(const gphase::ValidationTolerances& tol) {
  const gphase::ValidationReport report = gphase::run_validation(tol);
  gphase::print_report(std::cout, report);
  return report.all_passed() ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed-state geometric phases of a dissipative two-level atom"};
  app.require_subcommand(1);

  ModelFlags phase_flags, sweep_flags;
  std::string theta_text;
  std::string theta_start_text = "0.01pi";
  std::string theta_end_text = "0.99pi";
  int theta_count = 99;
  int steps_phase = 2000, steps_sweep = 2000, steps_figures = 2000;
  int threads_sweep = 1, threads_figures = 1;
  std::string sweep_output, figures_output;
  gphase::ValidationTolerances tol;

  CLI::App* phase_cmd = app.add_subcommand("phase", "one geometric-phase evaluation as CSV");
  phase_flags.add_to(*phase_cmd);
  phase_cmd->add_option("--theta", theta_text, "initial polar angle (radians or e.g. 0.5pi)")
      ->required();
  phase_cmd->add_option("--steps", steps_phase, "quadrature step count")->default_val(2000);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "theta sweep written to a CSV file");
  sweep_flags.add_to(*sweep_cmd);
  sweep_cmd->add_option("--theta-start", theta_start_text, "sweep start angle")
      ->default_val("0.01pi");
  sweep_cmd->add_option("--theta-end", theta_end_text, "sweep end angle")->default_val("0.99pi");
  sweep_cmd->add_option("--theta-count", theta_count, "number of grid points")->default_val(99);
  sweep_cmd->add_option("--steps", steps_sweep, "quadrature step count")->default_val(2000);
  sweep_cmd->add_option("--output", sweep_output, "output CSV path")->required();
  sweep_cmd->add_option("--threads", threads_sweep, "worker threads for sweep rows")
      ->default_val(1);

  CLI::App* figures_cmd =
      app.add_subcommand("figures", "emit the six figure datasets into a directory");
  figures_cmd->add_option("--output", figures_output, "output directory")->required();
  figures_cmd->add_option("--steps", steps_figures, "quadrature step count")->default_val(2000);
  figures_cmd->add_option("--threads", threads_figures, "worker threads")->default_val(1);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "run the oracle and limit cross-checks");
  validate_cmd->add_option("--tol-markovian", tol.markovian_dev, "markovian rk4 deviation bound")
      ->default_val(1e-8);
  validate_cmd
      ->add_option("--tol-correlated", tol.correlated_dev, "correlated rk4 deviation bound")
      ->default_val(1e-8);
  validate_cmd->add_option("--tol-memory", tol.memory_dev, "memory-kernel deviation bound")
      ->default_val(1e-6);
  validate_cmd->add_option("--tol-volterra", tol.volterra_dev, "volterra deviation bound")
      ->default_val(1e-4);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (phase_cmd->parsed()) return run_phase(phase_flags, theta_text, steps_phase);
    if (sweep_cmd->parsed()) {
      return run_sweep_cmd(sweep_flags, theta_start_text, theta_end_text, theta_count,
                           steps_sweep, sweep_output, threads_sweep);
    }
    if (figures_cmd->parsed()) return run_figures(figures_output, steps_figures, threads_figures);
    if (validate_cmd->parsed()) return run_validate(tol);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
