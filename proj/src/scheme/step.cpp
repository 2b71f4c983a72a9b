#include <cmath>
#include <limits>
#include <vector>

#include "etlab/linalg.hpp"
#include "scheme/residual_impl.hpp"

namespace etlab::detail {

namespace {

constexpr double kStep = 1e-20;
constexpr std::size_t kColors = 5;  // rows couple cells i-2 .. i+2

double eval_norm(const Grid1D& g, const PrevLevel& prev, const EntropicState& x,
                 const SchemeParams& p, const Source* src, double sigma, std::vector<double>& m,
                 std::vector<double>& e) {
  sigma_residual<double>(g, prev, x.phi, x.w, p, src, sigma, m, e);
  return max_abs(m, e);
}

// Banded Jacobian of σT + Q in interleaved ordering (2i + var), one complex
// residual evaluation per (color, var).
linalg::BandedMatrix jacobian(const Grid1D& g, const PrevLevel& prev, const EntropicState& x,
                              const SchemeParams& p, const Source* src, double sigma) {
  const std::size_t n = g.n_cells;
  linalg::BandedMatrix jac(2 * n, 5, 5);
  std::vector<cplx> zp(n), zw(n), rm(n), re_(n);
  for (std::size_t var = 0; var < 2; ++var) {
    for (std::size_t c = 0; c < kColors; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        zp[i] = x.phi[i];
        zw[i] = x.w[i];
      }
      auto& z = var == 0 ? zp : zw;
      for (std::size_t j = c; j < n; j += kColors) z[j] += cplx(0.0, kStep);
      sigma_residual<cplx>(g, prev, zp, zw, p, src, sigma, rm, re_);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = std::min(n - 1, i + 2);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j % kColors != c) continue;
          jac.at(2 * i, 2 * j + var) = rm[i].imag() / kStep;
          jac.at(2 * i + 1, 2 * j + var) = re_[i].imag() / kStep;
        }
      }
    }
  }
  return jac;
}

}  // namespace

InnerResult solve_coupled(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                          const Source* src, double sigma, EntropicState x) {
  const std::size_t n = g.n_cells;
  std::vector<double> m(n), e(n);
  double norm = eval_norm(g, prev, x, p, src, sigma, m, e);
  for (int it = 1;; ++it) {
    if (norm <= p.fp_tol) return {std::move(x), it, norm};
    if (it >= p.fp_max_iter) break;
    const auto jac = jacobian(g, prev, x, p, src, sigma);
    std::vector<double> rhs(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      rhs[2 * i] = -m[i];
      rhs[2 * i + 1] = -e[i];
    }
    const auto dx = linalg::solve_banded_lu(jac, rhs);
    for (double v : dx) {
      if (!std::isfinite(v)) throw SolverError("newton: singular Jacobian", norm);
    }
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> mt(n), et(n);
    while (alpha >= 1.0 / 1024.0) {
      EntropicState trial = x;
      for (std::size_t i = 0; i < n; ++i) {
        trial.phi[i] += alpha * dx[2 * i];
        trial.w[i] += alpha * dx[2 * i + 1];
      }
      double nt = std::numeric_limits<double>::infinity();
      try {
        nt = eval_norm(g, prev, trial, p, src, sigma, mt, et);
      } catch (const OverflowError&) {
      }
      if (std::isfinite(nt) && nt <= (1.0 - 1e-4 * alpha) * norm) {
        x = std::move(trial);
        m.swap(mt);
        e.swap(et);
        norm = nt;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw SolverError("newton: line search failed", norm);
  }
  throw SolverError("newton: no convergence within fp_max_iter", norm);
}

}  // namespace etlab::detail

namespace etlab {

namespace {

detail::InnerResult solve_sigma(const Grid1D& g, const detail::PrevLevel& prev,
                                const SchemeParams& p, const Source* src, double sigma,
                                EntropicState x) {
  if (p.inner_mode == InnerMode::paper_picard) {
    return detail::solve_picard(g, prev, p, src, sigma, std::move(x));
  }
  return detail::solve_coupled(g, prev, p, src, sigma, std::move(x));
}

}  // namespace

StepResult fixed_point_step(const Grid1D& grid, const EntropicState& prev, const SchemeParams& p,
                            const Source* source) {
  return fixed_point_step(grid, prev, p, prev, source);
}

StepResult fixed_point_step(const Grid1D& grid, const EntropicState& prev, const SchemeParams& p,
                            const EntropicState& initial_guess, const Source* source) {
  const std::size_t n = grid.n_cells;
  if (prev.phi.size() != n || prev.w.size() != n || initial_guess.phi.size() != n ||
      initial_guess.w.size() != n) {
    throw ShapeError("fixed_point_step: state length does not match grid");
  }
  if (source && (source->mass.size() != n || source->energy.size() != n)) {
    throw ShapeError("fixed_point_step: source length does not match grid");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(prev.phi[i]) || !std::isfinite(prev.w[i])) {
      throw DomainError("fixed_point_step: previous state is not finite");
    }
  }
  const auto pl = detail::make_prev_level(prev, p.overflow_cap);

  double last = std::numeric_limits<double>::infinity();
  SchemeParams q = p;
  for (int attempt = 0; attempt <= p.tau_backoff_limit; ++attempt) {
    try {
      EntropicState x = initial_guess;
      int iterations = 0;
      for (double sigma : q.sigma_ramp) {
        if (sigma >= 1.0) break;
        auto r = solve_sigma(grid, pl, q, source, sigma, std::move(x));
        x = std::move(r.state);
        iterations += r.iterations;
      }
      auto r = solve_sigma(grid, pl, q, source, 1.0, std::move(x));
      iterations += r.iterations;

      StepResult out;
      out.state = std::move(r.state);
      StepReport& rep = out.report;
      rep.iterations = iterations;
      rep.residual = r.residual;
      rep.tau_used = q.tau;
      rep.backoffs = attempt;
      const auto ea = entropy_audit(grid, prev, out.state, q, q.tau);
      const auto ba = budget_audit(grid, prev, out.state, q, q.tau);
      rep.entropy_before = ea.h_prev;
      rep.entropy_after = ea.h_next;
      rep.dissipation_terms = ea.dissipation;
      rep.diss_total = 0.0;
      for (const char* k : {"I2_flux", "delta_mass", "delta_energy_grad", "delta_energy_zero",
                            "eps_mass", "eps_energy_cross", "eps_energy_zero"}) {
        rep.diss_total += ea.dissipation.at(k);
      }
      rep.mass_lhs = ba.mass_lhs;
      rep.mass_rhs = ba.mass_rhs;
      rep.energy_lhs = ba.energy_lhs;
      rep.energy_rhs = ba.energy_rhs;
      rep.entropy_pass = ea.pass;
      rep.budget_pass = ba.pass();
      return out;
    } catch (const SolverError& e) {
      last = e.last_residual();
    } catch (const OverflowError&) {
    } catch (const NotSpdError&) {
    }
    q.tau *= 0.5;
  }
  throw SolverError("fixed_point_step: no convergence after " +
                        std::to_string(p.tau_backoff_limit) + " step halvings",
                    last);
}

}  // namespace etlab
