#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "etlab/grid.hpp"

namespace etlab {

/// Scheme unknowns: thermo-chemical potential φ and w = log θ per cell.
/// Any finite (φ, w) maps to strictly positive ρ and θ.
struct EntropicState {
  std::vector<double> phi;
  std::vector<double> w;

  std::size_t size() const noexcept { return phi.size(); }
};

/// Observable fields derived from an EntropicState.
struct MacroState {
  std::vector<double> rho;
  std::vector<double> theta;
  std::vector<double> energy;

  std::size_t size() const noexcept { return rho.size(); }
};

/// Symmetric 2×2 Onsager matrix at one evaluation point.
struct OnsagerMatrix {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  double det() const noexcept { return m11 * m22 - m12 * m12; }
  double min_eigenvalue() const noexcept;
};

struct HessianHtilde {
  std::array<std::array<double, 2>, 2> matrix{};
  double det = 0.0;
};

inline constexpr double kDefaultOverflowCap = 300.0;

MacroState to_primitive(const EntropicState& state, double cap = kDefaultOverflowCap);
EntropicState to_entropic(std::span<const double> rho, std::span<const double> theta);

double entropy_density(double rho, double theta);
double entropy_tilde(double rho, double energy);
double gibbs(double rho, double theta);

struct Potentials {
  double mu = 0.0;
  double phi = 0.0;
  double neg_inv_theta = 0.0;
};
Potentials potentials(double rho, double theta);

OnsagerMatrix onsager(double rho, double theta);
HessianHtilde hessian_htilde(double rho, double energy);

/// 3D Maxwellian with zero mean velocity and temperature θ.
double maxwellian_3d(double theta, const std::array<double, 3>& v);

/// 1D marginal (2πθ)^{-1/2} exp(-v²/(2θ)).
double maxwellian_1d(double theta, double v);

/// Tensor trapezoidal rule on [-half_width, half_width]^3.
struct MomentQuadrature {
  double half_width = 0.0;  ///< 0 selects 8·sqrt(θ)
  std::size_t nodes_per_axis = 64;
};

struct MomentReport {
  double theta = 0.0;
  double zeroth = 0.0;                          ///< ∫M
  std::array<double, 3> first{};                ///< ∫v_i M
  std::array<std::array<double, 3>, 3> second{};  ///< ∫v_i v_j M
  std::array<std::array<double, 3>, 3> fourth{};  ///< ∫v_i v_j |v|² M
  std::array<double, 3> third{};                ///< ∫v_i |v|² M
  double max_abs_error = 0.0;
  bool box_too_small = false;
};

MomentReport maxwellian_moments_check(double theta, MomentQuadrature quad = {});

enum class EdgeMean { arithmetic, geometric, harmonic };

struct FluxConsistency {
  double residual_mass = 0.0;
  double residual_energy = 0.0;
};

/// Sup-norm gap between Onsager-form edge fluxes M̄·Dq and the conservative
/// differences D(ρθ), D(θ + 5/2 ρθ²). Diagnostic only; never throws on size
/// of the gap.
FluxConsistency flux_consistency(const Grid1D& grid, const EntropicState& state,
                                 EdgeMean mean = EdgeMean::arithmetic);

namespace thermo {

// Generic closed forms shared by the scheme (real and complex-step paths).

template <class T>
T rho_of(const T& phi, const T& w) {
  using std::exp;
  return exp(phi + 1.5 * w - 2.5);
}

template <class T>
T energy_of(const T& rho, const T& theta) {
  return theta * (1.0 + 1.5 * rho);
}

template <class T>
T edge_mean(const T& a, const T& b, EdgeMean kind) {
  using std::sqrt;
  switch (kind) {
    case EdgeMean::geometric:
      return sqrt(a * b);
    case EdgeMean::harmonic:
      return 2.0 * a * b / (a + b);
    case EdgeMean::arithmetic:
    default:
      return 0.5 * (a + b);
  }
}

template <class T>
struct OnsagerT {
  T m11, m12, m22;
};

template <class T>
OnsagerT<T> onsager_of(const T& rho, const T& theta) {
  const T rt = rho * theta;
  return {rt, 2.5 * rt * theta, theta * theta * (1.0 + 8.75 * rt)};
}

/// Edge quadratic form aᵀ M(ρ,θ) a for a = (Dφ, Dq), written as the sum of
/// squares ρθ[(a₁ + 5/2 θ a₂)² + 5/2 θ² a₂²] + θ² a₂² so it is nonnegative
/// in floating point as well.
inline double onsager_form(double rho, double theta, double a1, double a2) {
  const double s = a1 + 2.5 * theta * a2;
  const double t2 = theta * theta * a2 * a2;
  return rho * theta * (s * s + 2.5 * t2) + t2;
}

}  // namespace thermo

}  // namespace etlab
