#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "etlab/grid.hpp"
#include "etlab/kinetic.hpp"
#include "etlab/scheme.hpp"
#include "etlab/thermo.hpp"

namespace etlab {

/// Initial data as a function of the grid, so studies can evaluate it on
/// refined grids.
using InitFunction = std::function<MacroState(const Grid1D&)>;

/// "equilibrium", "gauss-bump" or "temp-step"; throws ConfigError
/// ("init.preset") for anything else.
InitFunction preset(std::string_view name);

const std::vector<std::string>& preset_names();

/// Explicit cell data on `n` cells; on a grid refined by an integer factor
/// the values are repeated piecewise constant.
InitFunction explicit_init(std::vector<double> rho0, std::vector<double> theta0);

/// Fill E = θ(1 + 3ρ/2) from ρ, θ.
MacroState with_energy(std::vector<double> rho, std::vector<double> theta);

struct ConvergenceRow {
  double param = 0.0;
  double err_rho = 0.0;
  double err_energy = 0.0;
  std::optional<double> order_rho;
  std::optional<double> order_energy;

  bool operator==(const ConvergenceRow&) const = default;
};

/// Rows ordered from coarse to fine. The order of row k > 0 is
/// log(e_{k-1}/e_k) / log(p_{k-1}/p_k), i.e. log₂ of the error ratio when
/// the parameter halves.
struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;

  void compute_orders();
  bool operator==(const ConvergenceTable&) const = default;
};

inline constexpr std::string_view kTableHeader = "param,err_rho_L1,err_E_L1,order_rho,order_E";

std::string table_to_csv(const ConvergenceTable& table);
ConvergenceTable table_from_csv(std::string_view text);

/// L¹(Ω) distance of ρ and E between two states on the same grid.
std::pair<double, double> l1_errors(const Grid1D& grid, const MacroState& a, const MacroState& b);

enum class StudyParam { eps, delta, tau };

StudyParam study_param_from_string(std::string_view name);
std::string to_string(StudyParam p);

struct DriftRow {
  double param = 0.0;
  double mass_drift = 0.0;    ///< |mass(t_final) - mass(0)|
  double energy_drift = 0.0;  ///< |energy(t_final) - energy(0)|
};

struct RegularizationStudy {
  ConvergenceTable table;  ///< errors against the smallest value (which gets no row)
  std::vector<DriftRow> drift;  ///< one row per value, including the reference
  std::vector<Trajectory> runs;
};

/// Self-convergence study: one run_transient per value (strictly
/// decreasing), errors at t_final against the run with the smallest value.
RegularizationStudy regularization_study(const Grid1D& grid, const MacroState& init,
                                         const SchemeParams& p, StudyParam which,
                                         const std::vector<double>& values,
                                         bool keep_runs = false);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// f(x, t) = mean + amp · cos(mode·πx/L) · e^{-rate·t}; zero flux at both walls.
struct CosineField {
  double mean = 1.0;
  double amp = 0.0;
  double mode = 1.0;
  double rate = 0.0;

  double value(double x, double t, double length) const;
  double dt(double x, double t, double length) const;
  double dx(double x, double t, double length) const;
  double dxx(double x, double t, double length) const;
};

struct ManufacturedSolution {
  CosineField rho{1.0, 0.3, 1.0, 0.0};
  CosineField theta{1.0, -0.2, 1.0, 0.0};

  /// Exact fields at cell centres.
  MacroState exact(const Grid1D& grid, double t) const;
  /// Sources of ∂tρ = ∂xx(ρθ), ∂tE = ∂xx(θ + 5/2 ρθ²) at cell centres.
  Source source(const Grid1D& grid, double t) const;
  /// Throws DomainError when ρ or θ can become nonpositive.
  void validate() const;
};

enum class MmsRefine { space, time };

struct MmsSpec {
  ManufacturedSolution solution;
  MmsRefine refine = MmsRefine::space;
  std::vector<std::size_t> resolutions{16, 32, 64, 128};  ///< space refinement
  double tau = 0.05;                                      ///< space refinement
  std::vector<double> taus{0.04, 0.02, 0.01, 0.005};      ///< time refinement
  std::size_t n_cells = 256;                              ///< time refinement
  double t_final = 0.2;
  double length = 1.0;
  /// Step tolerance for these runs. The strong-form residual carries
  /// roundoff of order 1e-16/h², which exceeds 1e-10 on the finest grids.
  double fp_tol = 1e-8;
};

/// Cosine solution decaying in time, used for temporal refinement.
ManufacturedSolution time_dependent_solution();

/// The regularization terms are switched off (ε = δ = 0); the remaining
/// SchemeParams fields are used as given.
ConvergenceTable mms_convergence(const MmsSpec& spec, const SchemeParams& p);

struct KineticStudySpec {
  std::vector<double> eps_values{0.4, 0.2, 0.1, 0.05};
  double t_final = 0.1;
  double v_max = 8.0;
  std::size_t n_v = 64;
  std::size_t refine = 2;    ///< kinetic cells per macroscopic cell
  double macro_tau = 1e-4;   ///< step of the unregularized reference run
  KineticOptions options;
};

struct KineticStudy {
  ConvergenceTable table;
  MacroState macro_final;
};

/// Kinetic runs for each ε against an ε = δ = 0 coupled_implicit macro
/// reference; kinetic observables are cell-averaged onto `grid`.
KineticStudy kinetic_limit_study(const Grid1D& grid, const InitFunction& init,
                                 const KineticStudySpec& spec);

}  // namespace etlab
