#include <cmath>
#include <numbers>

#include "etlab/error.hpp"
#include "etlab/experiments.hpp"

namespace etlab {

namespace {

double wave(const CosineField& f, double x, double length) {
  return std::numbers::pi * f.mode / length * x;
}

double k_of(const CosineField& f, double length) { return std::numbers::pi * f.mode / length; }

}  // namespace

double CosineField::value(double x, double t, double length) const {
  return mean + amp * std::cos(wave(*this, x, length)) * std::exp(-rate * t);
}

double CosineField::dt(double x, double t, double length) const {
  return -rate * amp * std::cos(wave(*this, x, length)) * std::exp(-rate * t);
}

double CosineField::dx(double x, double t, double length) const {
  return -k_of(*this, length) * amp * std::sin(wave(*this, x, length)) * std::exp(-rate * t);
}

double CosineField::dxx(double x, double t, double length) const {
  const double k = k_of(*this, length);
  return -k * k * amp * std::cos(wave(*this, x, length)) * std::exp(-rate * t);
}

void ManufacturedSolution::validate() const {
  // the cosine factor times e^{-rate t} stays in [-1, 1] for rate >= 0
  if (rho.rate < 0.0 || theta.rate < 0.0) throw DomainError("manufactured solution: negative rate");
  if (!(rho.mean - std::abs(rho.amp) > 0.0)) throw DomainError("manufactured rho is not positive");
  if (!(theta.mean - std::abs(theta.amp) > 0.0)) {
    throw DomainError("manufactured theta is not positive");
  }
}

MacroState ManufacturedSolution::exact(const Grid1D& grid, double t) const {
  std::vector<double> r(grid.n_cells), th(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    r[i] = rho.value(grid.cell_centers[i], t, grid.length);
    th[i] = theta.value(grid.cell_centers[i], t, grid.length);
  }
  return with_energy(std::move(r), std::move(th));
}

Source ManufacturedSolution::source(const Grid1D& grid, double t) const {
  Source s;
  s.mass.resize(grid.n_cells);
  s.energy.resize(grid.n_cells);
  const double L = grid.length;
  for (std::size_t i = 0; i < grid.n_cells; ++i) {
    const double x = grid.cell_centers[i];
    const double u = rho.value(x, t, L), ut = rho.dt(x, t, L), ux = rho.dx(x, t, L),
                 uxx = rho.dxx(x, t, L);
    const double v = theta.value(x, t, L), vt = theta.dt(x, t, L), vx = theta.dx(x, t, L),
                 vxx = theta.dxx(x, t, L);
    const double lap_uv = uxx * v + 2.0 * ux * vx + u * vxx;
    const double lap_uv2 = uxx * v * v + 4.0 * ux * v * vx + 2.0 * u * (vx * vx + v * vxx);
    const double et = vt * (1.0 + 1.5 * u) + 1.5 * ut * v;
    s.mass[i] = ut - lap_uv;
    s.energy[i] = et - (vxx + 2.5 * lap_uv2);
  }
  return s;
}

ManufacturedSolution time_dependent_solution() {
  ManufacturedSolution s;
  s.rho.rate = 2.0;
  s.theta.rate = 2.0;
  return s;
}

ConvergenceTable mms_convergence(const MmsSpec& spec, const SchemeParams& p) {
  spec.solution.validate();
  SchemeParams q = p;
  q.eps = 0.0;
  q.delta = 0.0;
  q.inner_mode = InnerMode::coupled_implicit;
  q.t_final = spec.t_final;
  q.fp_tol = spec.fp_tol;

  auto one_run = [&](std::size_t n, double tau) {
    const Grid1D grid = build_grid(n, spec.length);
    q.tau = tau;
    TransientOptions opts;
    opts.keep_states = false;
    opts.source = [&](double t) { return spec.solution.source(grid, t); };
    const auto traj = run_transient(grid, spec.solution.exact(grid, 0.0), q, opts);
    return l1_errors(grid, to_primitive(traj.states.back()), spec.solution.exact(grid, spec.t_final));
  };

  ConvergenceTable table;
  if (spec.refine == MmsRefine::space) {
    if (spec.resolutions.size() < 2) throw ConfigError("mms.resolutions", "need two or more entries");
    for (std::size_t n : spec.resolutions) {
      const auto [er, ee] = one_run(n, spec.tau);
      table.rows.push_back({spec.length / static_cast<double>(n), er, ee, std::nullopt, std::nullopt});
    }
  } else {
    if (spec.taus.size() < 2) throw ConfigError("mms.taus", "need two or more entries");
    for (double tau : spec.taus) {
      const auto [er, ee] = one_run(spec.n_cells, tau);
      table.rows.push_back({tau, er, ee, std::nullopt, std::nullopt});
    }
  }
  table.compute_orders();
  return table;
}

}  // namespace etlab
