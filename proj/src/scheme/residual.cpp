#include <cmath>
#include <string>

#include "scheme/residual_impl.hpp"

namespace etlab {

void SchemeParams::validate() const {
  auto fail = [](const char* path, const std::string& what) { throw ConfigError(path, what); };
  if (!(tau > 0.0) || !std::isfinite(tau)) fail("scheme.tau", "must be a positive real");
  if (!(eps >= 0.0) || !std::isfinite(eps)) fail("scheme.eps", "must be a nonnegative real");
  if (!(delta >= 0.0) || !std::isfinite(delta)) fail("scheme.delta", "must be a nonnegative real");
  if (!(n_exp > 0.0 && n_exp < 5.0)) fail("scheme.n_exp", "must lie in (0, 5)");
  if (!(t_final > 0.0) || !std::isfinite(t_final)) fail("scheme.t_final", "must be a positive real");
  if (!(fp_tol > 0.0)) fail("scheme.fp_tol", "must be a positive real");
  if (fp_max_iter < 1) fail("scheme.fp_max_iter", "must be a positive integer");
  if (!(fp_damping > 0.0 && fp_damping <= 1.0)) fail("scheme.fp_damping", "must lie in (0, 1]");
  if (tau_backoff_limit < 0) fail("scheme.tau_backoff_limit", "must be a nonnegative integer");
  double last = 0.0;
  for (double s : sigma_ramp) {
    if (!(s > 0.0 && s <= 1.0)) fail("scheme.sigma_ramp", "entries must lie in (0, 1]");
    if (!(s > last)) fail("scheme.sigma_ramp", "entries must be strictly increasing");
    last = s;
  }
  if (inner_mode == InnerMode::paper_picard && !(eps > 0.0 && delta > 0.0)) {
    fail("scheme.inner_mode", "paper_picard requires eps > 0 and delta > 0");
  }
  if (!(overflow_cap > 0.0)) fail("scheme.overflow_cap", "must be positive");
  if (!(positivity_floor > 0.0)) fail("scheme.positivity_floor", "must be positive");
  if (!(tol_ent >= 0.0)) fail("scheme.tol_ent", "must be nonnegative");
}

std::string to_string(InnerMode m) {
  return m == InnerMode::paper_picard ? "paper_picard" : "coupled_implicit";
}

std::string to_string(PicardSolver s) {
  return s == PicardSolver::newton ? "newton" : "successive";
}

std::string to_string(EdgeMean m) {
  switch (m) {
    case EdgeMean::geometric:
      return "geometric";
    case EdgeMean::harmonic:
      return "harmonic";
    case EdgeMean::arithmetic:
    default:
      return "arithmetic";
  }
}

double Residual::max_norm() const { return detail::max_abs(mass, energy); }

namespace {

void check_shapes(const Grid1D& g, const EntropicState& s, const char* what) {
  if (s.phi.size() != g.n_cells || s.w.size() != g.n_cells) {
    throw ShapeError(std::string(what) + ": state length does not match grid");
  }
}

}  // namespace

Residual assemble_residual(const Grid1D& grid, const EntropicState& prev,
                           const EntropicState& cand, const SchemeParams& p,
                           const Source* source) {
  check_shapes(grid, prev, "assemble_residual(prev)");
  check_shapes(grid, cand, "assemble_residual(cand)");
  if (source && (source->mass.size() != grid.n_cells || source->energy.size() != grid.n_cells)) {
    throw ShapeError("assemble_residual: source length does not match grid");
  }
  const auto pl = detail::make_prev_level(prev, p.overflow_cap);
  Residual r;
  r.mass.resize(grid.n_cells);
  r.energy.resize(grid.n_cells);
  detail::sigma_residual<double>(grid, pl, cand.phi, cand.w, p, source, 1.0, r.mass, r.energy);
  return r;
}

}  // namespace etlab
