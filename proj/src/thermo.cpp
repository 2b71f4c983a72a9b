#include "etlab/thermo.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace etlab {

namespace {

void require_positive(double rho, double theta, const char* what) {
  if (!(rho > 0.0) || !(theta > 0.0)) {
    throw DomainError(std::string(what) + ": requires rho > 0 and theta > 0");
  }
}

}  // namespace

double OnsagerMatrix::min_eigenvalue() const noexcept {
  const double mean = 0.5 * (m11 + m22);
  const double half_diff = 0.5 * (m11 - m22);
  return mean - std::hypot(half_diff, m12);
}

MacroState to_primitive(const EntropicState& state, double cap) {
  if (state.phi.size() != state.w.size()) throw ShapeError("to_primitive: phi/w length mismatch");
  const std::size_t n = state.size();
  MacroState m;
  m.rho.resize(n);
  m.theta.resize(n);
  m.energy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = state.phi[i];
    const double w = state.w[i];
    if (!std::isfinite(phi) || !std::isfinite(w) || std::abs(phi) > cap || std::abs(w) > cap) {
      throw OverflowError("to_primitive: entropic variables out of range at cell " +
                              std::to_string(i),
                          i);
    }
    m.rho[i] = thermo::rho_of(phi, w);
    m.theta[i] = std::exp(w);
    m.energy[i] = thermo::energy_of(m.rho[i], m.theta[i]);
    if (!std::isfinite(m.rho[i]) || !std::isfinite(m.energy[i]) || !(m.rho[i] > 0.0)) {
      throw OverflowError("to_primitive: non-representable state at cell " + std::to_string(i), i);
    }
  }
  return m;
}

EntropicState to_entropic(std::span<const double> rho, std::span<const double> theta) {
  if (rho.size() != theta.size()) throw ShapeError("to_entropic: rho/theta length mismatch");
  EntropicState s;
  s.phi.resize(rho.size());
  s.w.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || !(theta[i] > 0.0)) {
      throw DomainError("to_entropic: nonpositive rho or theta at cell " + std::to_string(i));
    }
    s.w[i] = std::log(theta[i]);
    s.phi[i] = std::log(rho[i]) - 1.5 * s.w[i] + 2.5;
  }
  return s;
}

double entropy_density(double rho, double theta) {
  require_positive(rho, theta, "entropy_density");
  const double lt = std::log(theta);
  return rho * (std::log(rho) - 1.5 * lt) - lt;
}

double entropy_tilde(double rho, double energy) {
  require_positive(rho, energy, "entropy_tilde");
  const double c = 1.0 + 1.5 * rho;
  return rho * std::log(rho) - c * std::log(energy / c);
}

double gibbs(double rho, double theta) {
  require_positive(rho, theta, "gibbs");
  const double lt = std::log(theta);
  return rho * theta * (std::log(rho) - 1.5 * lt) + 1.5 * rho * theta - theta * (lt - 1.0);
}

Potentials potentials(double rho, double theta) {
  require_positive(rho, theta, "potentials");
  Potentials p;
  p.phi = std::log(rho) - 1.5 * std::log(theta) + 2.5;
  p.mu = theta * p.phi;
  p.neg_inv_theta = -1.0 / theta;
  return p;
}

OnsagerMatrix onsager(double rho, double theta) {
  if (rho < 0.0 || theta < 0.0) throw DomainError("onsager: requires rho >= 0 and theta >= 0");
  const auto m = thermo::onsager_of(rho, theta);
  return {m.m11, m.m12, m.m22};
}

HessianHtilde hessian_htilde(double rho, double energy) {
  require_positive(rho, energy, "hessian_htilde");
  const double c = 1.0 + 1.5 * rho;
  HessianHtilde out;
  out.matrix[0][0] = 1.0 / rho + 2.25 / c;
  out.matrix[0][1] = out.matrix[1][0] = -1.5 / energy;
  out.matrix[1][1] = c / (energy * energy);
  out.det = c / (rho * energy * energy);
  return out;
}

double maxwellian_3d(double theta, const std::array<double, 3>& v) {
  if (!(theta > 0.0)) throw DomainError("maxwellian_3d: requires theta > 0");
  const double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  return std::pow(2.0 * std::numbers::pi * theta, -1.5) * std::exp(-v2 / (2.0 * theta));
}

double maxwellian_1d(double theta, double v) {
  if (!(theta > 0.0)) throw DomainError("maxwellian_1d: requires theta > 0");
  return std::exp(-v * v / (2.0 * theta)) / std::sqrt(2.0 * std::numbers::pi * theta);
}

MomentReport maxwellian_moments_check(double theta, MomentQuadrature quad) {
  if (!(theta > 0.0)) throw DomainError("maxwellian_moments_check: requires theta > 0");
  if (quad.nodes_per_axis < 2) throw DomainError("maxwellian_moments_check: need >= 2 nodes");
  const double recommended = 8.0 * std::sqrt(theta);
  const double a = quad.half_width > 0.0 ? quad.half_width : recommended;
  const std::size_t n = quad.nodes_per_axis;
  const double dv = 2.0 * a / static_cast<double>(n - 1);

  std::vector<double> v(n), wt(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = -a + dv * static_cast<double>(k);
    wt[k] = (k == 0 || k + 1 == n) ? 0.5 * dv : dv;
  }

  MomentReport r;
  r.theta = theta;
  r.box_too_small = a < recommended * (1.0 - 1e-12);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const std::array<double, 3> u{v[i], v[j], v[k]};
        const double m = wt[i] * wt[j] * wt[k] * maxwellian_3d(theta, u);
        const double u2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        r.zeroth += m;
        for (int p = 0; p < 3; ++p) {
          r.first[p] += u[p] * m;
          r.third[p] += u[p] * u2 * m;
          for (int q = 0; q < 3; ++q) {
            r.second[p][q] += u[p] * u[q] * m;
            r.fourth[p][q] += u[p] * u[q] * u2 * m;
          }
        }
      }
    }
  }

  double err = std::abs(r.zeroth - 1.0);
  for (int p = 0; p < 3; ++p) {
    err = std::max({err, std::abs(r.first[p]), std::abs(r.third[p])});
    for (int q = 0; q < 3; ++q) {
      const double delta = p == q ? 1.0 : 0.0;
      err = std::max(err, std::abs(r.second[p][q] - theta * delta));
      err = std::max(err, std::abs(r.fourth[p][q] - 5.0 * theta * theta * delta));
    }
  }
  r.max_abs_error = err;
  return r;
}

FluxConsistency flux_consistency(const Grid1D& grid, const EntropicState& state, EdgeMean mean) {
  if (state.phi.size() != grid.n_cells || state.w.size() != grid.n_cells) {
    throw ShapeError("flux_consistency: state does not match grid");
  }
  const MacroState m = to_primitive(state);
  const std::size_t n = grid.n_cells;
  const double h = grid.h;
  FluxConsistency out;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double rb = thermo::edge_mean(m.rho[j], m.rho[j + 1], mean);
    const double tb = thermo::edge_mean(m.theta[j], m.theta[j + 1], mean);
    const auto M = thermo::onsager_of(rb, tb);
    const double dphi = (state.phi[j + 1] - state.phi[j]) / h;
    const double dq = (std::exp(-state.w[j]) - std::exp(-state.w[j + 1])) / h;
    const double f_mass = M.m11 * dphi + M.m12 * dq;
    const double f_energy = M.m12 * dphi + M.m22 * dq;

    auto pressure = [&](std::size_t i) { return m.rho[i] * m.theta[i]; };
    auto heat = [&](std::size_t i) {
      return m.theta[i] + 2.5 * m.rho[i] * m.theta[i] * m.theta[i];
    };
    const double c_mass = (pressure(j + 1) - pressure(j)) / h;
    const double c_energy = (heat(j + 1) - heat(j)) / h;
    out.residual_mass = std::max(out.residual_mass, std::abs(f_mass - c_mass));
    out.residual_energy = std::max(out.residual_energy, std::abs(f_energy - c_energy));
  }
  return out;
}

}  // namespace etlab
