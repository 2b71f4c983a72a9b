#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "etlab/grid.hpp"
#include "etlab/thermo.hpp"

namespace etlab {

/// Uniform trapezoidal velocity grid on [-v_max, v_max].
struct VelocityGrid {
  double v_max = 0.0;
  std::size_t n_v = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

VelocityGrid build_velocity_grid(double v_max, std::size_t n_v);

/// Reduced distributions on an (x-cell × v-node) row-major layout:
/// g0 = ∫∫ f dv⊥, g2 = ∫∫ |v⊥|² f dv⊥.
struct KineticState {
  std::size_t n_x = 0;
  std::size_t n_v = 0;
  std::vector<double> g0;
  std::vector<double> g2;
  std::vector<double> theta_b;
  double eps = 0.0;

  double* row0(std::size_t i) { return g0.data() + i * n_v; }
  double* row2(std::size_t i) { return g2.data() + i * n_v; }
  const double* row0(std::size_t i) const { return g0.data() + i * n_v; }
  const double* row2(std::size_t i) const { return g2.data() + i * n_v; }
};

enum class Reconstruction { upwind, van_leer };

enum class SimdChoice { automatic, scalar, avx2 };

struct KineticOptions {
  Reconstruction reconstruction = Reconstruction::van_leer;
  double cfl = 0.5;  ///< dt = cfl · ε h / v_max
  SimdChoice simd = SimdChoice::automatic;
};

/// Name of the kernel set a SimdChoice resolves to ("scalar" or "avx2"). The
/// ETLAB_SIMD environment variable overrides `automatic`.
std::string resolve_simd(SimdChoice choice);

/// Discrete 1D Maxwellian on the velocity grid, normalized so that its
/// quadrature is exactly 1.
std::vector<double> discrete_maxwellian(const VelocityGrid& vg, double theta);

KineticState init_equilibrium(const Grid1D& grid, const VelocityGrid& vg,
                              const std::vector<double>& rho0, const std::vector<double>& theta0,
                              double eps);

/// Largest transport-stable step ε h / v_max.
double cfl_limit(const Grid1D& grid, const VelocityGrid& vg, double eps);

/// One split step: transport (flux form, specular walls), implicit Neumann
/// heat step for θ_b, implicit BGK relaxation with energy-matched θ_b*.
KineticState kinetic_step(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state,
                          double dt, const KineticOptions& options = {});

struct KineticMoments {
  std::vector<double> rho;
  std::vector<double> kinetic_energy;  ///< ½∫(v₁² g0 + g2) dv₁
  std::vector<double> mass_flux;       ///< (1/ε)∫ v₁ g0 dv₁
};

KineticMoments moments(const VelocityGrid& vg, const KineticState& state);

/// ∫(θ_b + kinetic energy) dx.
double energy_total(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state);

double kinetic_mass(const Grid1D& grid, const VelocityGrid& vg, const KineticState& state);

struct KineticRecord {
  double time = 0.0;
  KineticMoments moments;
  std::vector<double> theta_b;
};

struct KineticRun {
  std::vector<KineticRecord> records;  ///< first and last always present
  double dt = 0.0;
  std::size_t steps = 0;
};

/// Integrate to t_final with dt = cfl·ε h / v_max shortened so that an
/// integer number of steps lands on t_final. record_stride = 0 keeps only the
/// initial and final records.
KineticRun run_kinetic(const Grid1D& grid, const VelocityGrid& vg,
                       const std::vector<double>& rho0, const std::vector<double>& theta0,
                       double eps, double t_final, const KineticOptions& options = {},
                       std::size_t record_stride = 0);

/// Reduced-closure identities ∫∫M dv⊥ = M₁ and ∫∫|v⊥|² M dv⊥ = 2θM₁ checked by
/// a 2D trapezoidal rule at a set of v₁ values.
struct ClosureReport {
  double max_err_zeroth = 0.0;
  double max_err_second = 0.0;
};

ClosureReport reduced_closure_check(double theta, MomentQuadrature quad = {});

/// Average a fine cell field onto a grid coarser by an integer factor.
std::vector<double> coarsen(const std::vector<double>& fine, std::size_t factor);

struct LimitError {
  double err_rho = 0.0;
  double err_energy = 0.0;
};

/// L¹ differences on `grid` between kinetic observables (ρ and total energy
/// density θ_b + kinetic energy) and a macroscopic state.
LimitError limit_compare(const Grid1D& grid, const std::vector<double>& kinetic_rho,
                         const std::vector<double>& kinetic_energy, const MacroState& macro);

}  // namespace etlab
