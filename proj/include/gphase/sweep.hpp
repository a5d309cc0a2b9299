#pragma once

// Theta sweeps, CSV emission, and the figure parameter grids shared by the
// CLI, the validation suite, and the tests.
//
// CSV conventions: header row, comma separator, 12 significant digits, LF
// line endings, all angles and phases in units of pi.

#include "gphase/evolutions.hpp"
#include "gphase/phase.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace gphase {

struct SweepSpec {
  ModelParams model;
  Real theta_start = 0.01 * kPi;
  Real theta_end = 0.99 * kPi;
  int theta_count = 99;
  int quadrature_steps = 2000;

  void validate() const {
    model.validate();
    if (theta_count < 1) throw std::invalid_argument("SweepSpec: theta_count must be >= 1");
    if (!(theta_start >= 0.0 && theta_start <= kPi) ||
        !(theta_end >= 0.0 && theta_end <= kPi)) {
      throw std::invalid_argument("SweepSpec: theta range must lie within [0, pi]");
    }
    if (theta_count > 1 && !(theta_end > theta_start)) {
      throw std::invalid_argument("SweepSpec: theta_end must exceed theta_start");
    }
  }

  std::vector<Real> theta_grid() const {
    std::vector<Real> grid(theta_count);
    if (theta_count == 1) {
      grid[0] = theta_start;
      return grid;
    }
    const Real step = (theta_end - theta_start) / static_cast<Real>(theta_count - 1);
    for (int k = 0; k < theta_count; ++k) {
      grid[k] = theta_start + static_cast<Real>(k) * step;
    }
    return grid;
  }
};

struct SweepRow {
  Real theta;
  PhaseResult phase;
};

/// Evaluates the closed-form phase on the theta grid.  Rows are independent;
/// with threads > 1 they are computed concurrently and emitted in grid order,
/// so the result does not depend on the thread count.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int threads = 1) {
  spec.validate();
  const std::vector<Real> grid = spec.theta_grid();
  std::vector<SweepRow> rows(grid.size());
  QuadratureConfig config;
  config.steps = spec.quadrature_steps;

  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < grid.size(); k += stride) {
      rows[k] = SweepRow{grid[k], phase_closed(spec.model, grid[k], config)};
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1 || grid.size() < 2) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) {
      pool.emplace_back(work, static_cast<std::size_t>(i), static_cast<std::size_t>(n_threads));
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

inline std::string model_name(const ModelParams& model) {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, MarkovianProjection>) return "markovian";
        else if constexpr (std::is_same_v<F, CorrelatedProjection>) return "correlated";
        else if constexpr (std::is_same_v<F, MemoryKernel>) return "memory";
        else return "post";
      },
      model.family);
}

/// 12 significant digits; negative zero collapses to "0".
inline std::string format_sig(Real v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Comma-free key=value rate summary, e.g. "gamma0=0.1;gamma=10".
inline std::string params_label(const ModelParams& model) {
  return std::visit(
      [](const auto& f) -> std::string {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, MarkovianProjection>) {
          return "gamma2=" + format_sig(f.gamma2);
        } else if constexpr (std::is_same_v<F, CorrelatedProjection>) {
          return "gamma=" + format_sig(f.gamma);
        } else {
          return "gamma0=" + format_sig(f.gamma0) + ";gamma=" + format_sig(f.gamma);
        }
      },
      model.family);
}

inline constexpr const char* kSweepCsvHeader =
    "model,params,theta_over_pi,gp_principal_over_pi,gp_unwrapped_over_pi,visibility";

inline void write_sweep_csv(std::ostream& os, const ModelParams& model,
                            const std::vector<SweepRow>& rows) {
  const std::string name = model_name(model);
  const std::string params = params_label(model);
  os << kSweepCsvHeader << "\n";
  for (const SweepRow& row : rows) {
    os << name << ',' << params << ',' << format_sig(row.theta / kPi) << ','
       << format_sig(row.phase.principal / kPi) << ',' << format_sig(row.phase.unwrapped / kPi)
       << ',' << format_sig(row.phase.visibility) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Figure datasets: theta sweeps at the published parameter grids, omega = 1.

inline constexpr Real kFigureRates[] = {0.1, 1.0};        // markovian / correlated rates
inline constexpr Real kKernelGamma0[] = {0.1, 1.0};       // dissipation constants
inline constexpr Real kKernelGamma[] = {0.1, 1.0, 10.0};  // inverse memory times

/// All sixteen model instances appearing in the figure datasets.
inline std::vector<ModelParams> figure_parameter_sets() {
  std::vector<ModelParams> sets;
  for (Real g : kFigureRates) sets.push_back(markovian(g));
  for (Real g : kFigureRates) sets.push_back(correlated(g));
  for (Real g0 : kKernelGamma0) {
    for (Real g : kKernelGamma) sets.push_back(memory_kernel(g0, g));
  }
  for (Real g0 : kKernelGamma0) {
    for (Real g : kKernelGamma) sets.push_back(post_markovian(g0, g));
  }
  return sets;
}

namespace detail {

inline SweepSpec default_spec(const ModelParams& model, int steps) {
  SweepSpec spec;
  spec.model = model;
  spec.quadrature_steps = steps;
  return spec;
}

inline void write_multi_column_csv(std::ostream& os, const std::vector<std::string>& labels,
                                   const std::vector<std::vector<SweepRow>>& sweeps) {
  os << "theta_over_pi";
  for (const std::string& label : labels) {
    os << ",gp_principal_over_pi_" << label << ",gp_unwrapped_over_pi_" << label;
  }
  os << "\n";
  const std::size_t n = sweeps.front().size();
  for (std::size_t k = 0; k < n; ++k) {
    os << format_sig(sweeps.front()[k].theta / kPi);
    for (const auto& sweep : sweeps) {
      os << ',' << format_sig(sweep[k].phase.principal / kPi) << ','
         << format_sig(sweep[k].phase.unwrapped / kPi);
    }
    os << "\n";
  }
}

inline void write_file(const std::filesystem::path& path,
                       const std::vector<std::string>& labels,
                       const std::vector<std::vector<SweepRow>>& sweeps) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  write_multi_column_csv(os, labels, sweeps);
  if (!os) throw std::ios_base::failure("write failed on " + path.string());
}

}  // namespace detail

/// Emits the six figure datasets (fig2_top/bottom, fig3_*, fig4_*) into dir.
inline void write_figure_files(const std::filesystem::path& dir, int steps = 2000,
                               int threads = 1) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < 2; ++i) {
    const Real g = kFigureRates[i];
    const std::vector<std::vector<SweepRow>> sweeps = {
        run_sweep(detail::default_spec(markovian(g), steps), threads),
        run_sweep(detail::default_spec(correlated(g), steps), threads)};
    detail::write_file(dir / (i == 0 ? "fig2_top.csv" : "fig2_bottom.csv"),
                       {"markovian", "correlated"}, sweeps);
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const Real g0 = kKernelGamma0[i];
    std::vector<std::string> labels;
    std::vector<std::vector<SweepRow>> memory_sweeps, post_sweeps;
    for (Real g : kKernelGamma) {
      labels.push_back("gamma" + format_sig(g));
      memory_sweeps.push_back(run_sweep(detail::default_spec(memory_kernel(g0, g), steps), threads));
      post_sweeps.push_back(run_sweep(detail::default_spec(post_markovian(g0, g), steps), threads));
    }
    detail::write_file(dir / (i == 0 ? "fig3_top.csv" : "fig3_bottom.csv"), labels, memory_sweeps);
    detail::write_file(dir / (i == 0 ? "fig4_top.csv" : "fig4_bottom.csv"), labels, post_sweeps);
  }
}

}  // namespace gphase
