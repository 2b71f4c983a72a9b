#include <cmath>
#include <iostream>
#include <string>

#include "scheme/residual_impl.hpp"

namespace etlab {

EntropicState entropic_initial_state(const MacroState& init, double floor, std::size_t* clipped) {
  const std::size_t n = init.rho.size();
  if (init.theta.size() != n) throw ShapeError("entropic_initial_state: rho/theta length mismatch");
  std::vector<double> rho(init.rho), theta(init.theta);
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rho[i]) || !std::isfinite(theta[i])) {
      throw DomainError("entropic_initial_state: non-finite initial data at cell " +
                        std::to_string(i));
    }
    if (rho[i] < floor) {
      rho[i] = floor;
      ++count;
    }
    if (theta[i] < floor) {
      theta[i] = floor;
      ++count;
    }
  }
  if (count > 0) {
    std::cerr << "warning: raised " << count << " initial values to the positivity floor "
              << floor << "\n";
  }
  if (clipped) *clipped = count;
  return to_entropic(rho, theta);
}

namespace {

void merge(StepReport& acc, const StepReport& r, bool first) {
  if (first) {
    acc = r;
    return;
  }
  acc.iterations += r.iterations;
  acc.residual = std::max(acc.residual, r.residual);
  acc.tau_used = std::min(acc.tau_used, r.tau_used);
  acc.backoffs += r.backoffs;
  acc.entropy_after = r.entropy_after;
  for (const auto& [k, v] : r.dissipation_terms) acc.dissipation_terms[k] = v;
  acc.diss_total = r.diss_total;
  acc.mass_lhs += r.mass_lhs;
  acc.mass_rhs += r.mass_rhs;
  acc.energy_lhs += r.energy_lhs;
  acc.energy_rhs += r.energy_rhs;
  acc.entropy_pass = acc.entropy_pass && r.entropy_pass;
  acc.budget_pass = acc.budget_pass && r.budget_pass;
}

}  // namespace

Trajectory run_transient(const Grid1D& grid, const MacroState& init, const SchemeParams& p,
                         const TransientOptions& options) {
  p.validate();
  if (init.rho.size() != grid.n_cells) throw ShapeError("run_transient: init length mismatch");
  EntropicState state = entropic_initial_state(init, p.positivity_floor);

  const double ratio = p.t_final / p.tau;
  auto steps = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    steps = static_cast<std::size_t>(std::ceil(ratio));
  }

  Trajectory traj;
  traj.times.push_back(0.0);
  if (options.keep_states) traj.states.push_back(state);
  if (options.observer) options.observer(0, 0.0, state, nullptr);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t0 = static_cast<double>(k) * p.tau;
    const double t1 = k + 1 == steps ? std::max(p.t_final, t0) : static_cast<double>(k + 1) * p.tau;
    // a backed-off step is completed with further sub-steps so the recorded
    // times stay on the τ lattice
    double t = t0;
    StepReport acc;
    bool first = true;
    while (t1 - t > 1e-12 * p.tau) {
      SchemeParams q = p;
      q.tau = t1 - t;
      Source src;
      const Source* sp = nullptr;
      if (options.source) {
        src = options.source(t + q.tau);
        sp = &src;
      }
      StepResult r;
      try {
        r = fixed_point_step(grid, state, q, sp);
      } catch (const SolverError& e) {
        throw SolverError("step " + std::to_string(k + 1) + ": " + e.what(), e.last_residual());
      }
      if (r.report.tau_used < q.tau && options.source) {
        // the source must sit at the actual new time level
        src = options.source(t + r.report.tau_used);
        SchemeParams q2 = q;
        q2.tau = r.report.tau_used;
        q2.tau_backoff_limit = 0;
        r = fixed_point_step(grid, state, q2, r.state, &src);
      }
      t += r.report.tau_used;
      state = std::move(r.state);
      merge(acc, r.report, first);
      first = false;
    }
    acc.tau_used = std::min(acc.tau_used, p.tau);
    traj.times.push_back(t1);
    if (options.keep_states) traj.states.push_back(state);
    traj.reports.push_back(std::move(acc));
    if (options.observer) options.observer(k + 1, t1, state, &traj.reports.back());
  }
  if (!options.keep_states) traj.states.push_back(state);
  return traj;
}

}  // namespace etlab
