#include <cmath>
#include <limits>

#include "scheme/residual_impl.hpp"

namespace etlab {

namespace {

constexpr double kBudgetTol = 1e-10;

std::vector<double> lap(const Grid1D& g, const std::vector<double>& u) {
  std::vector<double> out(u.size());
  ops::lap<double>(g.h, u, out);
  return out;
}

// Terms of the exact discrete entropy identity
//   (H_next - H_prev)/τ + Σ terms ≤ (residual)·(φ, 1 - e^{-w}),
// evaluated at the new state.
std::map<std::string, double> dissipation_terms(const Grid1D& g, const EntropicState& s,
                                                const SchemeParams& p) {
  const std::size_t n = g.n_cells;
  const double h = g.h;
  const auto& phi = s.phi;
  const auto& w = s.w;
  std::vector<double> th(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = std::exp(w[i]);
    q[i] = -std::exp(-w[i]);
  }
  std::map<std::string, double> out;
  double i2 = 0.0;
  for (double e : edge_dissipation(g, s, p.edge_mean)) i2 += e;
  out["I2_flux"] = h * i2;

  double d_mass = 0.0, e_mass = 0.0, e_cross = 0.0, e_zero = 0.0, d_grad = 0.0, d_zero = 0.0;
  if (p.delta > 0.0) {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double dphi = (phi[j + 1] - phi[j]) / h;
      const double dw = (w[j + 1] - w[j]) / h;
      const double dq = (q[j + 1] - q[j]) / h;
      a += dphi * dphi;
      c += std::exp(1.5 * (w[j] + w[j + 1])) * dw * dq;
    }
    for (std::size_t i = 0; i < n; ++i) {
      b += phi[i] * phi[i];
      d += std::exp(-p.n_exp * w[i]) * w[i] * (1.0 - std::exp(-w[i]));
    }
    d_mass = p.delta * h * (a + b);
    d_grad = p.delta * h * c;
    d_zero = p.delta * h * d;
  }
  if (p.eps > 0.0) {
    const auto lphi = lap(g, phi);
    const auto lw = lap(g, w);
    const auto lq = lap(g, q);
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a += lphi[i] * lphi[i];
      b += th[i] * lw[i] * lq[i];
      c += 2.0 * w[i] * std::sinh(w[i]);
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double dw = (w[j + 1] - w[j]) / h;
      const double dq = (q[j + 1] - q[j]) / h;
      b += std::exp(0.5 * (w[j] + w[j + 1])) * dw * dw * dw * dq;
    }
    e_mass = p.eps * h * a;
    e_cross = p.eps * h * b;
    e_zero = p.eps * h * c;
  }
  out["delta_mass"] = d_mass;
  out["delta_energy_grad"] = d_grad;
  out["delta_energy_zero"] = d_zero;
  out["eps_mass"] = e_mass;
  out["eps_energy_cross"] = e_cross;
  out["eps_energy_zero"] = e_zero;
  return out;
}

// Quadratures of the reformulated inequality's gradient terms (reported only).
void add_reformulated_terms(const Grid1D& g, const EntropicState& s, EdgeMean mean,
                            std::map<std::string, double>& out) {
  const auto m = to_primitive(s);
  const double h = g.h;
  double a = 0.0, b = 0.0, c = 0.0;
  for (std::size_t j = 0; j + 1 < g.n_cells; ++j) {
    const double dlt = (s.w[j + 1] - s.w[j]) / h;
    const double dsr = (std::sqrt(m.rho[j + 1]) - std::sqrt(m.rho[j])) / h;
    const double dsrt = (std::sqrt(m.rho[j + 1] * m.theta[j + 1]) -
                         std::sqrt(m.rho[j] * m.theta[j])) /
                        h;
    const double tb = thermo::edge_mean(m.theta[j], m.theta[j + 1], mean);
    a += dlt * dlt;
    b += tb * dsr * dsr;
    c += dsrt * dsrt;
  }
  out["grad_log_theta_sq"] = h * a;
  out["theta_grad_sqrt_rho_sq_over_8"] = h * b / 8.0;
  out["grad_sqrt_rho_theta_sq_over_64"] = h * c / 64.0;
}

}  // namespace

double total_mass(const Grid1D& grid, const MacroState& m) { return integrate(grid, m.rho); }

double total_energy(const Grid1D& grid, const MacroState& m) {
  return integrate(grid, m.energy);
}

double total_entropy(const Grid1D& grid, const EntropicState& state) {
  const auto m = to_primitive(state);
  std::vector<double> dens(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    dens[i] = entropy_tilde(m.rho[i], m.energy[i]) + m.energy[i];
  }
  return integrate(grid, dens);
}

std::vector<double> edge_dissipation(const Grid1D& grid, const EntropicState& state,
                                     EdgeMean mean) {
  if (state.phi.size() != grid.n_cells || state.w.size() != grid.n_cells) {
    throw ShapeError("edge_dissipation: state length does not match grid");
  }
  const auto m = to_primitive(state);
  const double h = grid.h;
  std::vector<double> out(grid.n_edges());
  for (std::size_t j = 0; j + 1 < grid.n_cells; ++j) {
    const double rb = thermo::edge_mean(m.rho[j], m.rho[j + 1], mean);
    const double tb = thermo::edge_mean(m.theta[j], m.theta[j + 1], mean);
    const double dphi = (state.phi[j + 1] - state.phi[j]) / h;
    const double dq = (std::exp(-state.w[j]) - std::exp(-state.w[j + 1])) / h;
    out[j] = thermo::onsager_form(rb, tb, dphi, dq);
  }
  return out;
}

EntropyAudit entropy_audit(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& next, const SchemeParams& p) {
  return entropy_audit(grid, prev, next, p, p.tau);
}

EntropyAudit entropy_audit(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& next, const SchemeParams& p, double tau_used) {
  EntropyAudit a;
  a.h_prev = total_entropy(grid, prev);
  a.h_next = total_entropy(grid, next);
  a.slack = tau_used * p.delta * std::exp(2.0 * (p.n_exp + 1.0)) * grid.length;
  a.tolerance = p.tol_ent * (1.0 + std::abs(a.h_prev));
  a.dissipation = dissipation_terms(grid, next, p);
  add_reformulated_terms(grid, next, p.edge_mean, a.dissipation);
  const auto edges = edge_dissipation(grid, next, p.edge_mean);
  a.edge_form_min = edges.empty() ? 0.0 : *std::min_element(edges.begin(), edges.end());
  a.pass = a.h_next <= a.h_prev + a.slack + a.tolerance && a.edge_form_min >= 0.0;
  return a;
}

BudgetAudit budget_audit(const Grid1D& grid, const EntropicState& prev, const EntropicState& next,
                         const SchemeParams& p) {
  return budget_audit(grid, prev, next, p, p.tau);
}

BudgetAudit budget_audit(const Grid1D& grid, const EntropicState& prev, const EntropicState& next,
                         const SchemeParams& p, double tau_used) {
  const auto m0 = to_primitive(prev);
  const auto m1 = to_primitive(next);
  const std::size_t n = grid.n_cells;
  BudgetAudit b;
  b.mass_lhs = total_mass(grid, m1) - total_mass(grid, m0);
  b.mass_rhs = -tau_used * p.delta * integrate(grid, next.phi);
  std::vector<double> eps_part(n), delta_part(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = next.w[i];
    eps_part[i] = (1.0 + std::exp(w)) * w;
    delta_part[i] = std::exp(-p.n_exp * w) * w;
  }
  b.energy_lhs = total_energy(grid, m1) - total_energy(grid, m0);
  b.energy_rhs =
      -tau_used * (p.eps * integrate(grid, eps_part) + p.delta * integrate(grid, delta_part));
  b.mass_pass = std::abs(b.mass_lhs - b.mass_rhs) <= kBudgetTol * (1.0 + std::abs(b.mass_lhs));
  b.energy_pass =
      std::abs(b.energy_lhs - b.energy_rhs) <= kBudgetTol * (1.0 + std::abs(b.energy_lhs));
  return b;
}

std::map<std::string, double> diagnostic_norms(const Grid1D& grid, const EntropicState& state,
                                               double n_exp) {
  const auto m = to_primitive(state);
  const std::size_t n = grid.n_cells;
  std::map<std::string, std::vector<double>> cells;
  auto put = [&](const char* key, auto f) {
    auto& v = cells[key];
    v.resize(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(m.rho[i], m.theta[i]);
  };
  put("rho_log_rho", [](double r, double) { return std::abs(r * std::log(r)); });
  put("theta", [](double, double t) { return t; });
  put("rho_theta", [](double r, double t) { return r * t; });
  put("abs_log_theta", [](double, double t) { return std::abs(std::log(t)); });
  put("rho2_theta", [](double r, double t) { return r * r * t; });
  put("rho_theta2", [](double r, double t) { return r * t * t; });
  put("rho_theta3", [](double r, double t) { return r * t * t * t; });
  put("rho2_theta3", [](double r, double t) { return r * r * t * t * t; });
  put("theta2", [](double, double t) { return t * t; });
  put("theta4", [](double, double t) { return t * t * t * t; });
  put("theta_pow_neg_n1", [&](double, double t) { return std::pow(t, -(n_exp + 1.0)); });
  std::map<std::string, double> out;
  for (const auto& [k, v] : cells) out[k] = integrate(grid, v);

  std::map<std::string, double> grads;
  add_reformulated_terms(grid, state, EdgeMean::arithmetic, grads);
  out["grad_log_theta_sq"] = grads["grad_log_theta_sq"];
  out["theta_grad_sqrt_rho_sq"] = 8.0 * grads["theta_grad_sqrt_rho_sq_over_8"];
  out["grad_sqrt_rho_theta_sq"] = 64.0 * grads["grad_sqrt_rho_theta_sq_over_64"];
  return out;
}

}  // namespace etlab
