#include <algorithm>
#include <cmath>
#include <string>

#include "etlab/error.hpp"
#include "etlab/experiments.hpp"

namespace etlab {

StudyParam study_param_from_string(std::string_view name) {
  if (name == "eps") return StudyParam::eps;
  if (name == "delta") return StudyParam::delta;
  if (name == "tau") return StudyParam::tau;
  throw ConfigError("sweep.varied", "unsupported parameter '" + std::string(name) +
                                        "' (expected eps, delta or tau)");
}

std::string to_string(StudyParam p) {
  switch (p) {
    case StudyParam::eps:
      return "eps";
    case StudyParam::delta:
      return "delta";
    case StudyParam::tau:
    default:
      return "tau";
  }
}

std::pair<double, double> l1_errors(const Grid1D& grid, const MacroState& a, const MacroState& b) {
  if (a.rho.size() != grid.n_cells || b.rho.size() != grid.n_cells) {
    throw ShapeError("l1_errors: state length does not match grid");
  }
  double er = 0.0, ee = 0.0;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    er += std::abs(a.rho[i] - b.rho[i]);
    ee += std::abs(a.energy[i] - b.energy[i]);
  }
  return {grid.h * er, grid.h * ee};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("loglog_slope: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RegularizationStudy regularization_study(const Grid1D& grid, const MacroState& init,
                                         const SchemeParams& p, StudyParam which,
                                         const std::vector<double>& values, bool keep_runs) {
  if (values.size() < 2) throw ConfigError("sweep.values", "need at least two values");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] < values[i - 1])) {
      throw ConfigError("sweep.values", "values must be strictly decreasing");
    }
  }
  RegularizationStudy out;
  std::vector<MacroState> finals;
  for (double v : values) {
    SchemeParams q = p;
    switch (which) {
      case StudyParam::eps:
        q.eps = v;
        break;
      case StudyParam::delta:
        q.delta = v;
        break;
      case StudyParam::tau:
        q.tau = v;
        break;
    }
    TransientOptions opts;
    opts.keep_states = keep_runs;
    EntropicState first;
    opts.observer = [&](std::size_t k, double, const EntropicState& s, const StepReport*) {
      if (k == 0) first = s;
    };
    auto traj = run_transient(grid, init, q, opts);
    const auto m0 = to_primitive(first);
    auto m1 = to_primitive(traj.states.back());
    out.drift.push_back({v, std::abs(total_mass(grid, m1) - total_mass(grid, m0)),
                         std::abs(total_energy(grid, m1) - total_energy(grid, m0))});
    finals.push_back(std::move(m1));
    if (keep_runs) out.runs.push_back(std::move(traj));
  }
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const auto [er, ee] = l1_errors(grid, finals[i], finals.back());
    out.table.rows.push_back({values[i], er, ee, std::nullopt, std::nullopt});
  }
  out.table.compute_orders();
  return out;
}

KineticStudy kinetic_limit_study(const Grid1D& grid, const InitFunction& init,
                                 const KineticStudySpec& spec) {
  if (spec.eps_values.empty()) throw ConfigError("kinetic.eps_values", "must not be empty");
  for (std::size_t i = 1; i < spec.eps_values.size(); ++i) {
    if (!(spec.eps_values[i] < spec.eps_values[i - 1])) {
      throw ConfigError("kinetic.eps_values", "values must be strictly decreasing");
    }
  }
  if (spec.refine == 0) throw ConfigError("kinetic.refine", "must be a positive integer");

  KineticStudy out;
  SchemeParams q;
  q.eps = 0.0;
  q.delta = 0.0;
  q.tau = spec.macro_tau;
  q.t_final = spec.t_final;
  q.inner_mode = InnerMode::coupled_implicit;
  TransientOptions opts;
  opts.keep_states = false;
  const auto traj = run_transient(grid, init(grid), q, opts);
  out.macro_final = to_primitive(traj.states.back());

  const Grid1D fine = build_grid(grid.n_cells * spec.refine, grid.length);
  const MacroState init_fine = init(fine);
  const double theta_max = *std::max_element(init_fine.theta.begin(), init_fine.theta.end());
  const double v_max = spec.v_max > 0.0 ? spec.v_max : 8.0 * std::sqrt(theta_max);
  const auto vg = build_velocity_grid(v_max, spec.n_v);
  for (double eps : spec.eps_values) {
    const auto run =
        run_kinetic(fine, vg, init_fine.rho, init_fine.theta, eps, spec.t_final, spec.options);
    const auto& rec = run.records.back();
    std::vector<double> e(fine.n_cells);
    for (std::size_t i = 0; i < fine.n_cells; ++i) {
      e[i] = rec.theta_b[i] + rec.moments.kinetic_energy[i];
    }
    const auto err = limit_compare(grid, coarsen(rec.moments.rho, spec.refine),
                                   coarsen(e, spec.refine), out.macro_final);
    out.table.rows.push_back({eps, err.err_rho, err.err_energy, std::nullopt, std::nullopt});
  }
  out.table.compute_orders();
  return out;
}

}  // namespace etlab
