#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "etlab/error.hpp"
#include "etlab/grid.hpp"
#include "etlab/scheme.hpp"
#include "etlab/thermo.hpp"

namespace etlab::detail {

using cplx = std::complex<double>;

inline double re(double x) { return x; }
inline double re(const cplx& x) { return x.real(); }

/// Residual split into the transport part (time difference, flux
/// divergence, source) and the regularization part. R = T + Q; the
/// σ-homotopy residual is σT + Q, whose zero is a fixed point of S(·, σ).
template <class T>
struct ResidualParts {
  std::vector<T> transport_mass, transport_energy;
  std::vector<T> reg_mass, reg_energy;

  void resize(std::size_t n) {
    transport_mass.resize(n);
    transport_energy.resize(n);
    reg_mass.resize(n);
    reg_energy.resize(n);
  }
};

/// Previous-level data needed by the time difference.
struct PrevLevel {
  std::vector<double> rho;
  std::vector<double> energy;
};

inline PrevLevel make_prev_level(const EntropicState& prev, double cap) {
  MacroState m = to_primitive(prev, cap);
  return {std::move(m.rho), std::move(m.energy)};
}

template <class T>
void check_cap(std::span<const T> phi, std::span<const T> w, double cap) {
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = re(phi[i]);
    const double b = re(w[i]);
    if (!std::isfinite(a) || !std::isfinite(b) || std::abs(a) > cap || std::abs(b) > cap) {
      throw OverflowError("entropic variables exceed the overflow cap at cell " + std::to_string(i),
                          i);
    }
  }
}

template <class T>
void assemble_transport(const Grid1D& g, const PrevLevel& prev, std::span<const T> phi,
                        std::span<const T> w, const SchemeParams& p, const Source* src,
                        std::span<T> out_mass, std::span<T> out_energy) {
  using std::exp;
  const std::size_t n = g.n_cells;
  const double h = g.h;
  std::vector<T> rho(n), th(n), q(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = thermo::rho_of(phi[i], w[i]);
    th[i] = exp(w[i]);
    q[i] = -exp(-w[i]);
  }
  std::vector<T> fm(n - 1), fe(n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const T rb = thermo::edge_mean(rho[j], rho[j + 1], p.edge_mean);
    const T tb = thermo::edge_mean(th[j], th[j + 1], p.edge_mean);
    const auto M = thermo::onsager_of(rb, tb);
    const T dphi = (phi[j + 1] - phi[j]) / h;
    const T dq = (q[j + 1] - q[j]) / h;
    fm[j] = M.m11 * dphi + M.m12 * dq;
    fe[j] = M.m12 * dphi + M.m22 * dq;
  }
  std::vector<T> dm(n), de(n);
  ops::div<T>(h, fm, dm);
  ops::div<T>(h, fe, de);
  const double inv_tau = 1.0 / p.tau;
  for (std::size_t i = 0; i < n; ++i) {
    const T e = thermo::energy_of(rho[i], th[i]);
    out_mass[i] = (rho[i] - prev.rho[i]) * inv_tau - dm[i];
    out_energy[i] = (e - prev.energy[i]) * inv_tau - de[i];
    if (src) {
      out_mass[i] -= src->mass[i];
      out_energy[i] -= src->energy[i];
    }
  }
}

template <class T>
void assemble_regularization(const Grid1D& g, std::span<const T> phi, std::span<const T> w,
                             const SchemeParams& p, std::span<T> out_mass,
                             std::span<T> out_energy) {
  using std::exp;
  const std::size_t n = g.n_cells;
  const double h = g.h;
  for (std::size_t i = 0; i < n; ++i) {
    out_mass[i] = T(0);
    out_energy[i] = T(0);
  }
  std::vector<T> a(n), b(n), edge(n - 1), c(n);
  if (p.eps > 0.0) {
    // mass: ε L²φ
    ops::lap<T>(h, phi, a);
    ops::lap<T>(h, std::span<const T>(a), b);
    for (std::size_t i = 0; i < n; ++i) out_mass[i] += p.eps * b[i];
    // energy: ε [L(e^w Lw) - div(e^{w̄}(Dw)³) + (1 + e^w) w]
    ops::lap<T>(h, w, a);
    for (std::size_t i = 0; i < n; ++i) a[i] *= exp(w[i]);
    ops::lap<T>(h, std::span<const T>(a), b);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const T dw = (w[j + 1] - w[j]) / h;
      edge[j] = exp(0.5 * (w[j] + w[j + 1])) * dw * dw * dw;
    }
    ops::div<T>(h, std::span<const T>(edge), c);
    for (std::size_t i = 0; i < n; ++i) {
      out_energy[i] += p.eps * (b[i] - c[i] + (1.0 + exp(w[i])) * w[i]);
    }
  }
  if (p.delta > 0.0) {
    // mass: δ(-Lφ + φ)
    ops::lap<T>(h, phi, a);
    for (std::size_t i = 0; i < n; ++i) out_mass[i] += p.delta * (phi[i] - a[i]);
    // energy: δ[-div(e^{3w̄} Dw) + e^{-Nw} w]
    for (std::size_t j = 0; j + 1 < n; ++j) {
      edge[j] = exp(1.5 * (w[j] + w[j + 1])) * (w[j + 1] - w[j]) / h;
    }
    ops::div<T>(h, std::span<const T>(edge), c);
    for (std::size_t i = 0; i < n; ++i) {
      out_energy[i] += p.delta * (exp(-p.n_exp * w[i]) * w[i] - c[i]);
    }
  }
}

template <class T>
void assemble_parts(const Grid1D& g, const PrevLevel& prev, std::span<const T> phi,
                    std::span<const T> w, const SchemeParams& p, const Source* src,
                    ResidualParts<T>& out) {
  check_cap(phi, w, p.overflow_cap);
  out.resize(g.n_cells);
  assemble_transport<T>(g, prev, phi, w, p, src, out.transport_mass, out.transport_energy);
  assemble_regularization<T>(g, phi, w, p, out.reg_mass, out.reg_energy);
}

/// σT + Q written into (mass, energy).
template <class T>
void sigma_residual(const Grid1D& g, const PrevLevel& prev, std::span<const T> phi,
                    std::span<const T> w, const SchemeParams& p, const Source* src, double sigma,
                    std::span<T> mass, std::span<T> energy) {
  ResidualParts<T> parts;
  assemble_parts<T>(g, prev, phi, w, p, src, parts);
  for (std::size_t i = 0; i < g.n_cells; ++i) {
    mass[i] = sigma * parts.transport_mass[i] + parts.reg_mass[i];
    energy[i] = sigma * parts.transport_energy[i] + parts.reg_energy[i];
  }
}

inline double max_abs(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  for (double v : b) m = std::max(m, std::abs(v));
  return m;
}

/// Newton outcome shared by both inner modes.
struct InnerResult {
  EntropicState state;
  int iterations = 0;
  double residual = 0.0;
};

InnerResult solve_coupled(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                          const Source* src, double sigma, EntropicState x);

InnerResult solve_picard(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                         const Source* src, double sigma, EntropicState x);

}  // namespace etlab::detail
