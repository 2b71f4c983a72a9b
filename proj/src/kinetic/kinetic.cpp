#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "etlab/error.hpp"
#include "etlab/kinetic.hpp"
#include "etlab/linalg.hpp"
#include "kinetic/kernels.hpp"

namespace etlab {

VelocityGrid build_velocity_grid(double v_max, std::size_t n_v) {
  if (!(v_max > 0.0) || !std::isfinite(v_max)) throw DomainError("velocity grid: v_max must be positive");
  if (n_v < 2) throw DomainError("velocity grid: n_v must be at least 2");
  VelocityGrid vg;
  vg.v_max = v_max;
  vg.n_v = n_v;
  vg.nodes.resize(n_v);
  vg.weights.resize(n_v);
  const double dv = 2.0 * v_max / static_cast<double>(n_v - 1);
  for (std::size_t k = 0; k < n_v; ++k) {
    // mirror-exact nodes: v[n-1-k] == -v[k]
    const double j = static_cast<double>(k) - 0.5 * static_cast<double>(n_v - 1);
    vg.nodes[k] = j * dv;
    vg.weights[k] = dv;
  }
  vg.weights.front() *= 0.5;
  vg.weights.back() *= 0.5;
  return vg;
}

namespace {

struct VelocityTables {
  std::vector<double> v, v2, v4;
};

VelocityTables tables(const VelocityGrid& vg) {
  VelocityTables t{vg.nodes, vg.nodes, vg.nodes};
  for (std::size_t k = 0; k < vg.n_v; ++k) {
    t.v2[k] = vg.nodes[k] * vg.nodes[k];
    t.v4[k] = t.v2[k] * t.v2[k];
  }
  return t;
}

void check_state(const Grid1D& grid, const VelocityGrid& vg, const KineticState& s) {
  if (s.n_x != grid.n_cells || s.n_v != vg.n_v || s.g0.size() != s.n_x * s.n_v ||
      s.g2.size() != s.n_x * s.n_v || s.theta_b.size() != s.n_x) {
    throw ShapeError("kinetic state does not match the grids");
  }
}

// Unnormalized Gaussian with the exponent shifted by the smallest v², so
// the normalizing sum never underflows.
void maxwellian_into(const VelocityTables& t, const std::vector<double>& w, double theta,
                     double* out) {
  const double vmin2 = *std::min_element(t.v2.begin(), t.v2.end());
  double z = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    out[k] = std::exp(-(t.v2[k] - vmin2) / (2.0 * theta));
    z += w[k] * out[k];
  }
  for (std::size_t k = 0; k < w.size(); ++k) out[k] /= z;
}

// θ* with θ* + (KE + λ·KEq(θ*))/(1 + λ) = θ_b + KE, KEq(θ) = ½ρ(m₂(θ) + 2θ).
double relaxation_temperature(const kernels::KernelTable& kt, const VelocityGrid& vg,
                              const VelocityTables& t, double rho, double ke, double theta_b,
                              double lambda, std::vector<double>& m, std::size_t cell) {
  const double total = theta_b + ke;
  const double a = lambda / (1.0 + lambda);
  double lo = 0.0, hi = total;
  double x = std::min(theta_b, total);
  double mom[3];
  for (int it = 0; it < 200; ++it) {
    maxwellian_into(t, vg.weights, x, m.data());
    kt.row_moments(m.data(), vg.weights.data(), t.v2.data(), t.v4.data(), vg.n_v, mom);
    const double m2 = mom[1] / mom[0];
    const double m4 = mom[2] / mom[0];
    const double keq = 0.5 * rho * (m2 + 2.0 * x);
    const double f = x + (ke + lambda * keq) / (1.0 + lambda) - total;
    if (std::abs(f) <= 4e-16 * total) return x;
    if (f > 0.0) hi = x; else lo = x;
    if (hi - lo <= 4e-16 * hi) return x;
    const double dm2 = (m4 - m2 * m2) / (2.0 * x * x);
    const double df = 1.0 + a * 0.5 * rho * (dm2 + 2.0);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * x) return next;
    x = next;
  }
  throw SolverError("relaxation temperature solve failed at cell " + std::to_string(cell), 0.0);
}

void transport(const kernels::KernelTable& kt, const VelocityGrid& vg, std::vector<double>& g,
               std::size_t nx, double c, Reconstruction recon) {
  const std::size_t nv = vg.n_v;
  // specular ghosts: cell -1 ↔ cell 0 reversed, -2 ↔ 1, n ↔ n-1, n+1 ↔ n-2
  std::vector<double> ghost(4 * nv);
  auto mirror = [&](std::size_t src, double* dst) {
    const double* r = g.data() + src * nv;
    for (std::size_t k = 0; k < nv; ++k) dst[k] = r[nv - 1 - k];
  };
  mirror(0, ghost.data() + 1 * nv);
  mirror(nx > 1 ? 1 : 0, ghost.data());
  mirror(nx - 1, ghost.data() + 2 * nv);
  mirror(nx > 1 ? nx - 2 : 0, ghost.data() + 3 * nv);
  auto row = [&](long i) -> const double* {
    if (i == -2) return ghost.data();
    if (i == -1) return ghost.data() + nv;
    if (i == static_cast<long>(nx)) return ghost.data() + 2 * nv;
    if (i == static_cast<long>(nx) + 1) return ghost.data() + 3 * nv;
    return g.data() + static_cast<std::size_t>(i) * nv;
  };
  std::vector<double> flux((nx + 1) * nv);
  for (std::size_t f = 0; f <= nx; ++f) {
    const long k = static_cast<long>(f);
    double* out = flux.data() + f * nv;
    if (recon == Reconstruction::upwind) {
      kt.face_flux_upwind(vg.nodes.data(), row(k - 1), row(k), out, nv);
    } else {
      kt.face_flux_vanleer(vg.nodes.data(), row(k - 2), row(k - 1), row(k), row(k + 1), out, nv);
    }
  }
  for (std::size_t i = 0; i < nx; ++i) {
    kt.flux_update(g.data() + i * nv, flux.data() + i * nv, flux.data() + (i + 1) * nv, c, nv);
  }
}

}  // namespace

std::vector<double> discrete_maxwellian(const VelocityGrid& vg, double theta) {
  if (!(theta > 0.0)) throw DomainError("discrete_maxwellian: requires theta > 0");
  std::vector<double> out(vg.n_v);
  maxwellian_into(tables(vg), vg.weights, theta, out.data());
  return out;
}

KineticState init_equilibrium(const Grid1D& grid, const VelocityGrid& vg,
                              const std::vector<double>& rho0, const std::vector<double>& theta0,
                              double eps) {
  if (rho0.size() != grid.n_cells || theta0.size() != grid.n_cells) {
    throw ShapeError("init_equilibrium: initial data length does not match grid");
  }
  if (!(eps > 0.0)) throw DomainError("init_equilibrium: eps must be positive");
  KineticState s;
  s.n_x = grid.n_cells;
  s.n_v = vg.n_v;
  s.eps = eps;
  s.g0.resize(s.n_x * s.n_v);
  s.g2.resize(s.n_x * s.n_v);
  s.theta_b = theta0;
  const auto t = tables(vg);
  for (std::size_t i = 0; i < s.n_x; ++i) {
    if (!(rho0[i] > 0.0) || !(theta0[i] > 0.0)) {
      throw DomainError("init_equilibrium: nonpositive data at cell " + std::to_string(i));
    }
    double* r0 = s.row0(i);
    double* r2 = s.row2(i);
    maxwellian_into(t, vg.weights, theta0[i], r0);
    for (std::size_t k = 0; k < s.n_v; ++k) {
      r0[k] *= rho0[i];
      r2[k] = 2.0 * theta0[i] * r0[k];
    }
  }
  return s;
}

double cfl_limit(const Grid1D& grid, const VelocityGrid& vg, double eps) {
  return eps * grid.h / vg.v_max;
}

KineticState kinetic_step(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state,
                          double dt, const KineticOptions& options) {
  check_state(grid, vg, state);
  if (!(dt > 0.0)) throw DomainError("kinetic_step: dt must be positive");
  if (dt > cfl_limit(grid, vg, state.eps) * (1.0 + 1e-12)) {
    throw DomainError("kinetic_step: CFL violation, dt exceeds eps*h/v_max");
  }
  const auto& kt = kernels::select(options.simd);
  const auto t = tables(vg);
  const std::size_t nx = state.n_x;
  const std::size_t nv = state.n_v;
  KineticState s = state;

  // (a) transport
  const double c = dt / (state.eps * grid.h);
  transport(kt, vg, s.g0, nx, c, options.reconstruction);
  transport(kt, vg, s.g2, nx, c, options.reconstruction);

  // (b) heat, implicit Neumann
  {
    linalg::BandedSymmetricMatrix<double> a(nx, 1);
    const double r = dt / (grid.h * grid.h);
    for (std::size_t i = 0; i < nx; ++i) a.at(i, i) = 1.0;
    for (std::size_t j = 0; j + 1 < nx; ++j) {
      a.at(j, j) += r;
      a.at(j + 1, j + 1) += r;
      a.at(j + 1, j) = -r;
    }
    s.theta_b = linalg::solve_banded_spd<double>(a, s.theta_b);
  }

  // (c) relaxation
  const double lambda = dt / (state.eps * state.eps);
  const double keep = 1.0 / (1.0 + lambda);
  const double share = lambda / (1.0 + lambda);
  std::vector<double> m(nv), target(nv);
  double mom0[3], mom2[3];
  for (std::size_t i = 0; i < nx; ++i) {
    kt.row_moments(s.row0(i), vg.weights.data(), t.v.data(), t.v2.data(), nv, mom0);
    kt.row_moments(s.row2(i), vg.weights.data(), t.v.data(), t.v2.data(), nv, mom2);
    const double rho = mom0[0];
    const double ke = 0.5 * (mom0[2] + mom2[0]);
    const double th =
        relaxation_temperature(kt, vg, t, rho, ke, s.theta_b[i], lambda, m, i);
    maxwellian_into(t, vg.weights, th, m.data());
    kt.relax_row(s.row0(i), m.data(), keep, share * rho, nv);
    kt.relax_row(s.row2(i), m.data(), keep, share * 2.0 * th * rho, nv);
    s.theta_b[i] = th;
  }
  return s;
}

KineticMoments moments(const VelocityGrid& vg, const KineticState& state) {
  const auto& kt = kernels::select(SimdChoice::automatic);
  const auto t = tables(vg);
  KineticMoments out;
  out.rho.resize(state.n_x);
  out.kinetic_energy.resize(state.n_x);
  out.mass_flux.resize(state.n_x);
  double a[3], b[3];
  for (std::size_t i = 0; i < state.n_x; ++i) {
    kt.row_moments(state.row0(i), vg.weights.data(), t.v.data(), t.v2.data(), state.n_v, a);
    kt.row_moments(state.row2(i), vg.weights.data(), t.v.data(), t.v2.data(), state.n_v, b);
    out.rho[i] = a[0];
    out.kinetic_energy[i] = 0.5 * (a[2] + b[0]);
    out.mass_flux[i] = a[1] / state.eps;
  }
  return out;
}

double energy_total(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state) {
  check_state(grid, vg, state);
  const auto mo = moments(vg, state);
  std::vector<double> e(state.n_x);
  for (std::size_t i = 0; i < state.n_x; ++i) e[i] = state.theta_b[i] + mo.kinetic_energy[i];
  return integrate(grid, e);
}

double kinetic_mass(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state) {
  check_state(grid, vg, state);
  return integrate(grid, moments(vg, state).rho);
}

KineticRun run_kinetic(const Grid1D& grid, const VelocityGrid& vg,
                       const std::vector<double>& rho0, const std::vector<double>& theta0,
                       double eps, double t_final, const KineticOptions& options,
                       std::size_t record_stride) {
  if (!(t_final > 0.0)) throw DomainError("run_kinetic: t_final must be positive");
  if (!(options.cfl > 0.0 && options.cfl <= 1.0)) throw DomainError("run_kinetic: cfl must lie in (0, 1]");
  KineticState s = init_equilibrium(grid, vg, rho0, theta0, eps);
  const double dt0 = options.cfl * cfl_limit(grid, vg, eps);
  KineticRun run;
  run.steps = static_cast<std::size_t>(std::ceil(t_final / dt0 - 1e-9));
  if (run.steps == 0) run.steps = 1;
  run.dt = t_final / static_cast<double>(run.steps);
  auto record = [&](double time) { run.records.push_back({time, moments(vg, s), s.theta_b}); };
  record(0.0);
  for (std::size_t k = 1; k <= run.steps; ++k) {
    try {
      s = kinetic_step(grid, vg, s, run.dt, options);
    } catch (const SolverError& e) {
      throw SolverError("kinetic step " + std::to_string(k) + ": " + e.what(), e.last_residual());
    }
    const bool last = k == run.steps;
    if (last || (record_stride > 0 && k % record_stride == 0)) {
      record(last ? t_final : static_cast<double>(k) * run.dt);
    }
  }
  return run;
}

ClosureReport reduced_closure_check(double theta, MomentQuadrature quad) {
  if (!(theta > 0.0)) throw DomainError("reduced_closure_check: requires theta > 0");
  const double half = quad.half_width > 0.0 ? quad.half_width : 8.0 * std::sqrt(theta);
  const std::size_t n = quad.nodes_per_axis;
  if (n < 2) throw DomainError("reduced_closure_check: need at least 2 nodes per axis");
  const auto vg = build_velocity_grid(half, n);
  ClosureReport rep;
  const double st = std::sqrt(theta);
  for (double v1 : {0.0, 0.5 * st, st, 2.0 * st, 3.0 * st}) {
    double z = 0.0, s2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double va = vg.nodes[a], vb = vg.nodes[b];
        const double m = maxwellian_3d(theta, {v1, va, vb}) * vg.weights[a] * vg.weights[b];
        z += m;
        s2 += (va * va + vb * vb) * m;
      }
    }
    const double m1 = maxwellian_1d(theta, v1);
    rep.max_err_zeroth = std::max(rep.max_err_zeroth, std::abs(z - m1));
    rep.max_err_second = std::max(rep.max_err_second, std::abs(s2 - 2.0 * theta * m1));
  }
  return rep;
}

std::vector<double> coarsen(const std::vector<double>& fine, std::size_t factor) {
  if (factor == 0 || fine.size() % factor != 0) {
    throw ShapeError("coarsen: length is not a multiple of the refinement factor");
  }
  std::vector<double> out(fine.size() / factor, 0.0);
  for (std::size_t i = 0; i < fine.size(); ++i) out[i / factor] += fine[i];
  for (double& v : out) v /= static_cast<double>(factor);
  return out;
}

LimitError limit_compare(const Grid1D& grid, const std::vector<double>& kinetic_rho,
                         const std::vector<double>& kinetic_energy, const MacroState& macro) {
  const std::size_t n = grid.n_cells;
  if (kinetic_rho.size() != n || kinetic_energy.size() != n || macro.rho.size() != n ||
      macro.energy.size() != n) {
    throw ShapeError("limit_compare: mismatched grids");
  }
  LimitError e;
  for (std::size_t i = 0; i < n; ++i) {
    e.err_rho += std::abs(kinetic_rho[i] - macro.rho[i]);
    e.err_energy += std::abs(kinetic_energy[i] - macro.energy[i]);
  }
  e.err_rho *= grid.h;
  e.err_energy *= grid.h;
  return e;
}

}  // namespace etlab
