#include <cmath>
#include <limits>
#include <vector>

#include "etlab/linalg.hpp"
#include "scheme/residual_impl.hpp"

namespace etlab::detail {

namespace {

using linalg::BandedSymmetricMatrix;

// A += c_L · L diag(c) L, with L the reflected second difference.
template <class T>
void add_lcl(BandedSymmetricMatrix<T>& a, std::span<const T> c, double h, double scale) {
  const std::size_t n = c.size();
  const double ih2 = 1.0 / (h * h);
  auto l = [&](std::size_t i, std::size_t k) -> double {
    if (i == k) {
      const int nb = (i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0);
      return -nb * ih2;
    }
    return (i + 1 == k || k + 1 == i) ? ih2 : 0.0;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k > 0 ? k - 1 : 0;
    const std::size_t hi = std::min(n - 1, k + 1);
    for (std::size_t i = lo; i <= hi; ++i) {
      for (std::size_t j = lo; j <= i; ++j) {
        a.at(i, j) += scale * l(i, k) * c[k] * l(k, j);
      }
    }
  }
}

// A += scale · Dᵀ diag(k) D in strong form, i.e. the matrix of -div(k D u).
template <class T>
void add_dkd(BandedSymmetricMatrix<T>& a, std::span<const T> k, double h, double scale) {
  const double ih2 = 1.0 / (h * h);
  for (std::size_t j = 0; j < k.size(); ++j) {
    const T v = scale * k[j] * ih2;
    a.at(j, j) += v;
    a.at(j + 1, j + 1) += v;
    a.at(j + 1, j) -= v;
  }
}

template <class T>
struct FieldPair {
  std::vector<T> phi, w;
};

// S(frozen, σ): the two SPD solves with transport and time terms frozen.
template <class T>
FieldPair<T> apply_s(const Grid1D& g, const PrevLevel& prev, std::span<const T> phi,
                     std::span<const T> w, const SchemeParams& p, const Source* src,
                     double sigma) {
  using std::exp;
  const std::size_t n = g.n_cells;
  const double h = g.h;
  check_cap(phi, w, p.overflow_cap);
  std::vector<T> f1(n), f2(n);
  assemble_transport<T>(g, prev, phi, w, p, src, f1, f2);
  for (std::size_t i = 0; i < n; ++i) {
    f1[i] *= -sigma;
    f2[i] *= -sigma;
  }

  BandedSymmetricMatrix<T> a1(n, 2);
  BandedSymmetricMatrix<T> a2(n, 2);
  std::vector<T> ones(n, T(1.0));
  std::vector<T> edge_ones(n - 1, T(1.0));
  add_lcl<T>(a1, ones, h, p.eps);
  add_dkd<T>(a1, edge_ones, h, p.delta);
  for (std::size_t i = 0; i < n; ++i) a1.at(i, i) += p.delta;

  std::vector<T> th(n), cubic(n - 1), grad3(n - 1);
  for (std::size_t i = 0; i < n; ++i) th[i] = exp(w[i]);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const T dw = (w[j + 1] - w[j]) / h;
    const T wb = 0.5 * (w[j] + w[j + 1]);
    cubic[j] = exp(wb) * dw * dw;
    grad3[j] = exp(3.0 * wb);
  }
  add_lcl<T>(a2, th, h, p.eps);
  add_dkd<T>(a2, cubic, h, p.eps);
  add_dkd<T>(a2, grad3, h, p.delta);
  for (std::size_t i = 0; i < n; ++i) {
    a2.at(i, i) += p.eps * (1.0 + th[i]) + p.delta * exp(-p.n_exp * w[i]);
  }
  FieldPair<T> out;
  out.phi = linalg::solve_banded_spd<T>(a1, f1);
  out.w = linalg::solve_banded_spd<T>(a2, f2);
  return out;
}

double residual_norm(const Grid1D& g, const PrevLevel& prev, const EntropicState& x,
                     const SchemeParams& p, const Source* src, double sigma) {
  std::vector<double> m(g.n_cells), e(g.n_cells);
  sigma_residual<double>(g, prev, x.phi, x.w, p, src, sigma, m, e);
  return max_abs(m, e);
}

// G(x) = x - S(x, σ), stacked as (φ, w).
std::vector<double> g_map(const Grid1D& g, const PrevLevel& prev, const EntropicState& x,
                          const SchemeParams& p, const Source* src, double sigma) {
  const std::size_t n = g.n_cells;
  auto s = apply_s<double>(g, prev, x.phi, x.w, p, src, sigma);
  std::vector<double> out(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = x.phi[i] - s.phi[i];
    out[n + i] = x.w[i] - s.w[i];
  }
  return out;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

InnerResult picard_newton(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                          const Source* src, double sigma, EntropicState x) {
  const std::size_t n = g.n_cells;
  constexpr double kStep = 1e-20;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= p.fp_max_iter; ++it) {
    last = residual_norm(g, prev, x, p, src, sigma);
    if (last <= p.fp_tol) return {std::move(x), it, last};
    if (it == p.fp_max_iter) break;

    const auto gx = g_map(g, prev, x, p, src, sigma);
    // J = I - S'(x), columns by complex step
    linalg::DenseMatrix jac(2 * n, 2 * n);
    std::vector<cplx> zp(n), zw(n);
    for (std::size_t i = 0; i < n; ++i) {
      zp[i] = x.phi[i];
      zw[i] = x.w[i];
    }
    for (std::size_t k = 0; k < 2 * n; ++k) {
      cplx& slot = k < n ? zp[k] : zw[k - n];
      slot += cplx(0.0, kStep);
      const auto s = apply_s<cplx>(g, prev, zp, zw, p, src, sigma);
      slot = cplx(slot.real(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        jac(i, k) = -s.phi[i].imag() / kStep;
        jac(n + i, k) = -s.w[i].imag() / kStep;
      }
      jac(k, k) += 1.0;
    }
    std::vector<double> rhs(gx.size());
    for (std::size_t i = 0; i < gx.size(); ++i) rhs[i] = -gx[i];
    const auto dx = linalg::solve_dense_lu(std::move(jac), rhs);

    const double g0 = norm2(gx);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1.0 / 1024.0) {
      EntropicState trial = x;
      for (std::size_t i = 0; i < n; ++i) {
        trial.phi[i] += alpha * dx[i];
        trial.w[i] += alpha * dx[n + i];
      }
      double gt = std::numeric_limits<double>::infinity();
      try {
        gt = norm2(g_map(g, prev, trial, p, src, sigma));
      } catch (const OverflowError&) {
      } catch (const NotSpdError&) {
      }
      if (std::isfinite(gt) && gt <= (1.0 - 1e-4 * alpha) * g0) {
        x = std::move(trial);
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) throw SolverError("picard newton: line search failed", last);
  }
  throw SolverError("picard newton: no convergence within fp_max_iter", last);
}

InnerResult picard_successive(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                              const Source* src, double sigma, EntropicState x) {
  const std::size_t n = g.n_cells;
  const double beta = p.fp_damping;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= p.fp_max_iter; ++it) {
    last = residual_norm(g, prev, x, p, src, sigma);
    if (last <= p.fp_tol) return {std::move(x), it, last};
    const auto s = apply_s<double>(g, prev, x.phi, x.w, p, src, sigma);
    for (std::size_t i = 0; i < n; ++i) {
      x.phi[i] = (1.0 - beta) * x.phi[i] + beta * s.phi[i];
      x.w[i] = (1.0 - beta) * x.w[i] + beta * s.w[i];
    }
  }
  throw SolverError("picard: no convergence within fp_max_iter", last);
}

}  // namespace

InnerResult solve_picard(const Grid1D& g, const PrevLevel& prev, const SchemeParams& p,
                         const Source* src, double sigma, EntropicState x) {
  if (p.picard_solver == PicardSolver::successive) {
    return picard_successive(g, prev, p, src, sigma, std::move(x));
  }
  return picard_newton(g, prev, p, src, sigma, std::move(x));
}

}  // namespace etlab::detail

namespace etlab {

EntropicState linearized_solve(const Grid1D& grid, const EntropicState& prev,
                               const EntropicState& frozen, const SchemeParams& p, double sigma,
                               const Source* source) {
  if (prev.size() != grid.n_cells || frozen.size() != grid.n_cells ||
      prev.w.size() != grid.n_cells || frozen.w.size() != grid.n_cells) {
    throw ShapeError("linearized_solve: state length does not match grid");
  }
  if (!(p.eps > 0.0 && p.delta > 0.0)) {
    throw DomainError("linearized_solve: requires eps > 0 and delta > 0");
  }
  if (!(sigma >= 0.0 && sigma <= 1.0)) throw DomainError("linearized_solve: sigma outside [0, 1]");
  const auto pl = detail::make_prev_level(prev, p.overflow_cap);
  auto s = detail::apply_s<double>(grid, pl, frozen.phi, frozen.w, p, source, sigma);
  return {std::move(s.phi), std::move(s.w)};
}

}  // namespace etlab
