#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "etlab/error.hpp"

namespace etlab::linalg {

namespace detail {
inline double real_part(double x) { return x; }
inline double real_part(const std::complex<double>& x) { return x.real(); }
}  // namespace detail

/// Symmetric banded matrix storing the diagonal and `bandwidth` lower bands:
/// bands[k][j] = A(j + k, j).
template <class T>
class BandedSymmetricMatrix {
 public:
  BandedSymmetricMatrix(std::size_t n, std::size_t bandwidth)
      : n_(n), bandwidth_(bandwidth), bands_(bandwidth + 1) {
    for (std::size_t k = 0; k <= bandwidth; ++k) bands_[k].assign(n > k ? n - k : 0, T(0));
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return bandwidth_; }

  /// Entry (i, j) with |i - j| <= bandwidth; (i, j) and (j, i) alias.
  T& at(std::size_t i, std::size_t j) {
    if (i < j) std::swap(i, j);
    return bands_[i - j][j];
  }
  T get(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    return i - j <= bandwidth_ ? bands_[i - j][j] : T(0);
  }

  void multiply(std::span<const T> x, std::span<T> y) const {
    for (std::size_t i = 0; i < n_; ++i) {
      T s(0);
      const std::size_t lo = i >= bandwidth_ ? i - bandwidth_ : 0;
      const std::size_t hi = std::min(n_ - 1, i + bandwidth_);
      for (std::size_t j = lo; j <= hi; ++j) s += get(i, j) * x[j];
      y[i] = s;
    }
  }

 private:
  std::size_t n_;
  std::size_t bandwidth_;
  std::vector<std::vector<T>> bands_;
};

/// Banded Cholesky solve. Works for real SPD matrices and for complex
/// symmetric (non-Hermitian) perturbations of them, which is what the
/// complex-step derivative of an SPD solve needs. Throws NotSpdError on a
/// pivot whose real part is not positive.
template <class T>
std::vector<T> solve_banded_spd(const BandedSymmetricMatrix<T>& m, std::span<const T> rhs) {
  using std::sqrt;
  const std::size_t n = m.size();
  const std::size_t b = m.bandwidth();
  if (rhs.size() != n) throw ShapeError("solve_banded_spd: rhs length mismatch");

  // factor L stored with the same band layout as m
  BandedSymmetricMatrix<T> L(n, b);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k0 = j >= b ? j - b : 0;
    T d = m.get(j, j);
    for (std::size_t k = k0; k < j; ++k) d -= L.get(j, k) * L.get(j, k);
    const double dr = detail::real_part(d);
    if (!(dr > 0.0) || !std::isfinite(dr)) {
      throw NotSpdError("solve_banded_spd: non-positive pivot at row " + std::to_string(j), j);
    }
    const T ljj = sqrt(d);
    L.at(j, j) = ljj;
    const std::size_t i_hi = std::min(n - 1, j + b);
    for (std::size_t i = j + 1; i <= i_hi; ++i) {
      T s = m.get(i, j);
      const std::size_t kk = i >= b ? i - b : 0;
      for (std::size_t k = std::max(k0, kk); k < j; ++k) s -= L.get(i, k) * L.get(j, k);
      L.at(i, j) = s / ljj;
    }
  }

  std::vector<T> x(rhs.begin(), rhs.end());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k0 = i >= b ? i - b : 0;
    for (std::size_t k = k0; k < i; ++k) x[i] -= L.get(i, k) * x[k];
    x[i] /= L.get(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const std::size_t hi = std::min(n - 1, ii + b);
    for (std::size_t k = ii + 1; k <= hi; ++k) x[ii] -= L.get(k, ii) * x[k];
    x[ii] /= L.get(ii, ii);
  }
  return x;
}

/// General banded matrix with kl sub- and ku super-diagonals, row storage
/// padded by kl extra super-diagonals for pivoting fill-in.
class BandedMatrix {
 public:
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  std::size_t size() const noexcept { return n_; }
  std::size_t lower() const noexcept { return kl_; }
  std::size_t upper() const noexcept { return ku_; }

  /// Entry (i, j); requires -kl <= j - i <= ku.
  double& at(std::size_t i, std::size_t j);
  double get(std::size_t i, std::size_t j) const;
  bool in_band(std::size_t i, std::size_t j) const noexcept;

  void multiply(std::span<const double> x, std::span<double> y) const;

 private:
  friend std::vector<double> solve_banded_lu(BandedMatrix a, std::span<const double> rhs);
  double& raw(std::size_t i, std::size_t j) { return data_[i * width_ + (j + kl_ - i)]; }

  std::size_t n_, kl_, ku_, width_;
  std::vector<double> data_;
};

/// Gaussian elimination with partial pivoting inside the band.
std::vector<double> solve_banded_lu(BandedMatrix a, std::span<const double> rhs);

/// Row-major dense matrix.
struct DenseMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

std::vector<double> solve_dense_lu(DenseMatrix a, std::span<const double> rhs);

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual_norm = 0.0;
};

/// Conjugate gradients for an SPD operator, stopping on ‖b - Ax‖₂ <= tol.
/// Throws SolverError when max_iter is exhausted.
CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> rhs, double tol,
                            int max_iter, std::span<const double> x0 = {});

}  // namespace etlab::linalg
