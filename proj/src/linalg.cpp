#include "etlab/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace etlab::linalg {

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), width_(2 * kl + ku + 1), data_(n * width_, 0.0) {}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const noexcept {
  return i < n_ && j < n_ && j + kl_ >= i && j <= i + ku_;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
  if (!in_band(i, j)) throw ShapeError("BandedMatrix::at: entry outside band");
  return raw(i, j);
}

double BandedMatrix::get(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return 0.0;
  return data_[i * width_ + (j + kl_ - i)];
}

void BandedMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i >= kl_ ? i - kl_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += get(i, j) * x[j];
    y[i] = s;
  }
}

std::vector<double> solve_banded_lu(BandedMatrix a, std::span<const double> rhs) {
  const std::size_t n = a.n_;
  if (rhs.size() != n) throw ShapeError("solve_banded_lu: rhs length mismatch");
  const std::size_t kl = a.kl_;
  const std::size_t reach = a.kl_ + a.ku_;  // row extent after fill-in
  std::vector<double> x(rhs.begin(), rhs.end());

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i_hi = std::min(n - 1, k + kl);
    std::size_t p = k;
    double best = std::abs(a.raw(k, k));
    for (std::size_t i = k + 1; i <= i_hi; ++i) {
      const double v = std::abs(a.raw(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best)) {
      throw SolverError("solve_banded_lu: singular matrix at column " + std::to_string(k), best);
    }
    const std::size_t j_hi = std::min(n - 1, k + reach);
    if (p != k) {
      for (std::size_t j = k; j <= j_hi; ++j) std::swap(a.raw(k, j), a.raw(p, j));
      std::swap(x[k], x[p]);
    }
    const double pivot = a.raw(k, k);
    for (std::size_t i = k + 1; i <= i_hi; ++i) {
      const double l = a.raw(i, k) / pivot;
      if (l == 0.0) continue;
      a.raw(i, k) = 0.0;
      for (std::size_t j = k + 1; j <= j_hi; ++j) a.raw(i, j) -= l * a.raw(k, j);
      x[i] -= l * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t j_hi = std::min(n - 1, i + reach);
    double s = x[i];
    for (std::size_t j = i + 1; j <= j_hi; ++j) s -= a.raw(i, j) * x[j];
    x[i] = s / a.raw(i, i);
  }
  return x;
}

std::vector<double> solve_dense_lu(DenseMatrix a, std::span<const double> rhs) {
  const std::size_t n = a.rows;
  if (a.cols != n || rhs.size() != n) throw ShapeError("solve_dense_lu: shape mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    const double best = std::abs(a(p, k));
    if (!(best > 0.0) || !std::isfinite(best)) {
      throw SolverError("solve_dense_lu: singular matrix at column " + std::to_string(k), best);
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(x[k], x[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = a(i, k) / a(k, k);
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
      x[i] -= l * x[k];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> rhs, double tol,
                            int max_iter, std::span<const double> x0) {
  const std::size_t n = rhs.size();
  CgResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) {
    if (x0.size() != n) throw ShapeError("conjugate_gradient: x0 length mismatch");
    std::copy(x0.begin(), x0.end(), res.x.begin());
  }
  std::vector<double> r(n), p(n), ap(n);
  apply(res.x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
  double rr = dot(r, r);
  res.residual_norm = std::sqrt(rr);
  if (res.residual_norm <= tol) return res;
  p = r;
  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) {
      throw SolverError("conjugate_gradient: operator is not positive definite", res.residual_norm);
    }
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_new = dot(r, r);
    res.iterations = it;
    res.residual_norm = std::sqrt(rr_new);
    if (res.residual_norm <= tol) {
      // recursive residual can drift from the true one; confirm before returning
      apply(res.x, ap);
      double true_rr = 0.0;
      for (std::size_t i = 0; i < n; ++i) true_rr += (rhs[i] - ap[i]) * (rhs[i] - ap[i]);
      if (std::sqrt(true_rr) <= tol) {
        res.residual_norm = std::sqrt(true_rr);
        return res;
      }
      for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
      p = r;
      rr = true_rr;
      continue;
    }
    const double beta = rr_new / rr;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    rr = rr_new;
  }
  throw SolverError("conjugate_gradient: max_iter exceeded", res.residual_norm);
}

}  // namespace etlab::linalg
