#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "etlab/grid.hpp"
#include "etlab/thermo.hpp"

namespace etlab {

enum class InnerMode { paper_picard, coupled_implicit };

/// How the paper_picard mode finds the fixed point of the linearized map S.
enum class PicardSolver {
  newton,      ///< Newton on x - S(x, σ), S' by complex step
  successive,  ///< x ← (1 - β)x + β S(x, σ), β = fp_damping
};

struct SchemeParams {
  double tau = 1e-3;
  double eps = 1e-6;
  double delta = 1e-4;
  double n_exp = 2.0;  ///< exponent N of the δ θ^{-N} log θ term
  double t_final = 0.1;
  double fp_tol = 1e-10;
  int fp_max_iter = 100;
  double fp_damping = 1.0;
  int tau_backoff_limit = 10;
  InnerMode inner_mode = InnerMode::coupled_implicit;
  std::vector<double> sigma_ramp;
  PicardSolver picard_solver = PicardSolver::newton;
  EdgeMean edge_mean = EdgeMean::arithmetic;
  double overflow_cap = kDefaultOverflowCap;
  double positivity_floor = 1e-12;
  double tol_ent = 1e-8;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

std::string to_string(InnerMode m);
std::string to_string(PicardSolver s);
std::string to_string(EdgeMean m);

/// Manufactured source terms added to the right-hand side of the mass and
/// energy equations (cell values at the new time level).
struct Source {
  std::vector<double> mass;
  std::vector<double> energy;
};

struct Residual {
  std::vector<double> mass;
  std::vector<double> energy;

  double max_norm() const;
};

/// Strong-form nodal residual of the discrete weak forms with `cand` inserted
/// everywhere. Row i of the mass residual is
///   (ρ_i - ρ_i^prev)/τ - div(M̄₁₁Dφ + M̄₁₂Dq)_i + ε L²φ_i + δ(-Lφ + φ)_i
/// with q = -e^{-w}, L the reflected second difference and M̄ the Onsager
/// matrix at edge means of ρ, θ. The energy row follows the same pattern.
Residual assemble_residual(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& cand, const SchemeParams& p,
                           const Source* source = nullptr);

/// One application of the linearized map S(frozen, σ): solves the two
/// decoupled SPD systems a₁(φ)=σF₁, a₂(w)=σF₂ with all transport and time
/// terms taken from `frozen`. Requires ε > 0 and δ > 0.
EntropicState linearized_solve(const Grid1D& grid, const EntropicState& prev,
                               const EntropicState& frozen, const SchemeParams& p, double sigma,
                               const Source* source = nullptr);

struct EntropyAudit {
  double h_prev = 0.0;
  double h_next = 0.0;
  double slack = 0.0;      ///< τδ e^{2(N+1)} |Ω|
  double tolerance = 0.0;  ///< tol_ent (1 + |H_prev|)
  std::map<std::string, double> dissipation;
  double edge_form_min = 0.0;  ///< smallest per-edge I₂ contribution
  bool pass = false;
};

struct BudgetAudit {
  double mass_lhs = 0.0;
  double mass_rhs = 0.0;
  double energy_lhs = 0.0;
  double energy_rhs = 0.0;
  bool mass_pass = false;
  bool energy_pass = false;
  bool pass() const noexcept { return mass_pass && energy_pass; }
};

struct StepReport {
  int iterations = 0;  ///< iterates examined, the accepted one included
  double residual = 0.0;
  double tau_used = 0.0;
  int backoffs = 0;
  double entropy_before = 0.0;
  double entropy_after = 0.0;
  std::map<std::string, double> dissipation_terms;
  double diss_total = 0.0;
  double mass_lhs = 0.0, mass_rhs = 0.0;
  double energy_lhs = 0.0, energy_rhs = 0.0;
  bool entropy_pass = false;
  bool budget_pass = false;
};

struct StepResult {
  EntropicState state;
  StepReport report;
};

/// One implicit step: solve the nonlinear step equations to fp_tol in the
/// max norm, halving τ on failure up to tau_backoff_limit times. Throws
/// SolverError once backoff is exhausted.
StepResult fixed_point_step(const Grid1D& grid, const EntropicState& prev, const SchemeParams& p,
                            const Source* source = nullptr);

/// Same as fixed_point_step but with an explicit initial iterate.
StepResult fixed_point_step(const Grid1D& grid, const EntropicState& prev, const SchemeParams& p,
                            const EntropicState& initial_guess, const Source* source);

struct Trajectory {
  std::vector<double> times;
  std::vector<EntropicState> states;
  std::vector<StepReport> reports;  ///< reports[k] describes states[k] → states[k+1]
};

/// Source callback for manufactured problems: cell values at time t.
using SourceFunction = std::function<Source(double t)>;

struct TransientOptions {
  SourceFunction source;
  /// Called with (step index, time, state, report) for the initial state
  /// (report = nullptr) and after every accepted step.
  std::function<void(std::size_t, double, const EntropicState&, const StepReport*)> observer;
  bool keep_states = true;
};

/// March from `init` to p.t_final. Cells with ρ or θ below
/// p.positivity_floor are raised to it (with a warning on stderr) before the
/// entropic chart is entered.
Trajectory run_transient(const Grid1D& grid, const MacroState& init, const SchemeParams& p,
                         const TransientOptions& options = {});

/// Entropic state for the given macro data after applying the positivity floor.
/// `clipped` (optional) receives the number of raised cells.
EntropicState entropic_initial_state(const MacroState& init, double floor,
                                     std::size_t* clipped = nullptr);

EntropyAudit entropy_audit(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& next, const SchemeParams& p);

/// Same, with the actual step size when it differs from p.tau.
EntropyAudit entropy_audit(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& next, const SchemeParams& p, double tau_used);

BudgetAudit budget_audit(const Grid1D& grid, const EntropicState& prev, const EntropicState& next,
                         const SchemeParams& p);
BudgetAudit budget_audit(const Grid1D& grid, const EntropicState& prev, const EntropicState& next,
                         const SchemeParams& p, double tau_used);

/// Discrete entropy H = ∫(h̃(ρ,E) + E).
double total_entropy(const Grid1D& grid, const EntropicState& state);

/// Per-edge I₂ contributions Dqᵀ M̄ Dq (nonnegative by construction).
std::vector<double> edge_dissipation(const Grid1D& grid, const EntropicState& state,
                                     EdgeMean mean = EdgeMean::arithmetic);

/// Monitored quadratures (reported, never asserted).
std::map<std::string, double> diagnostic_norms(const Grid1D& grid, const EntropicState& state,
                                               double n_exp = 2.0);

double total_mass(const Grid1D& grid, const MacroState& m);
double total_energy(const Grid1D& grid, const MacroState& m);

}  // namespace etlab
