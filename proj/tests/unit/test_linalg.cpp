#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "etlab/linalg.hpp"
#include "oracles.hpp"

using namespace etlab;
using namespace etlab::linalg;

namespace {

BandedSymmetricMatrix<double> random_spd(std::size_t n, std::size_t b, std::mt19937_64& rng) {
  BandedSymmetricMatrix<double> m(n, b);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (std::size_t k = 1; k <= b; ++k)
    for (std::size_t j = 0; j + k < n; ++j) m.at(j + k, j) = d(rng);
  // diagonal dominance
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 2.0 * static_cast<double>(b) + 0.5 + std::abs(d(rng));
  return m;
}

oracle::Dense to_dense(const BandedSymmetricMatrix<double>& m) {
  oracle::Dense a(m.size(), std::vector<double>(m.size(), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) a[i][j] = m.get(i, j);
  return a;
}

double inf_norm(const std::vector<double>& v) {
  double r = 0.0;
  for (double x : v) r = std::max(r, std::abs(x));
  return r;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("banded spd: identity and Neumann Laplacian") {
    BandedSymmetricMatrix<double> id(5, 2);
    for (std::size_t i = 0; i < 5; ++i) id.at(i, i) = 1.0;
    const std::vector<double> b{1, -2, 3, 0.5, 7};
    CHECK(solve_banded_spd<double>(id, b) == b);

    const std::size_t n = 12;
    BandedSymmetricMatrix<double> a(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double deg = (i == 0 || i + 1 == n) ? 1.0 : 2.0;
      a.at(i, i) = deg + 1.0;
      if (i + 1 < n) a.at(i + 1, i) = -1.0;
    }
    const auto x = solve_banded_spd<double>(a, std::vector<double>(n, 1.0));
    for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("banded spd vs dense Cholesky oracle") {
    auto rng = oracle::rng(21);
    for (std::size_t b : {0u, 1u, 2u, 4u}) {
      for (std::size_t n : {1u, 3u, 10u, 60u}) {
        const auto m = random_spd(n, b, rng);
        const auto rhs = oracle::uniform(rng, n, -3.0, 3.0);
        const auto x = solve_banded_spd<double>(m, rhs);
        const auto ref = oracle::cholesky_solve(to_dense(m), rhs);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - ref[i]) < 1e-12 * (1 + std::abs(ref[i])));
        std::vector<double> ax(n);
        m.multiply(x, ax);
        for (std::size_t i = 0; i < n; ++i) ax[i] -= rhs[i];
        CHECK(inf_norm(ax) <= 1e-12 * (1 + inf_norm(rhs)));
      }
    }
  }

  TEST_CASE("banded spd rejects indefinite matrices") {
    BandedSymmetricMatrix<double> m(3, 1);
    m.at(0, 0) = 1;
    m.at(1, 1) = 1;
    m.at(2, 2) = 1;
    m.at(1, 0) = 2;  // leading 2x2 minor negative
    try {
      solve_banded_spd<double>(m, std::vector<double>{1, 1, 1});
      FAIL("expected NotSpdError");
    } catch (const NotSpdError& e) {
      CHECK(e.pivot() == 1);
    }
    CHECK_THROWS_AS(solve_banded_spd<double>(m, std::vector<double>{1, 1}), ShapeError);
  }

  TEST_CASE("banded spd complex step gives the derivative of the solve") {
    // d/ds A(s)^{-1} b with A(s) = A + sE equals -A^{-1} E A^{-1} b
    auto rng = oracle::rng(22);
    const std::size_t n = 8;
    const auto a = random_spd(n, 2, rng);
    const auto b = oracle::uniform(rng, n, -1, 1);
    BandedSymmetricMatrix<std::complex<double>> ac(n, 2);
    const double hs = 1e-20;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= i; ++j)
        ac.at(i, j) = {a.get(i, j), i == j ? hs : 0.0};
    std::vector<std::complex<double>> bc(b.begin(), b.end());
    const auto xc = solve_banded_spd<std::complex<double>>(ac, bc);
    const auto x = solve_banded_spd<double>(a, b);
    const auto dx = solve_banded_spd<double>(a, x);  // E = I
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(xc[i].real() == doctest::Approx(x[i]).epsilon(1e-13));
      CHECK(xc[i].imag() / hs == doctest::Approx(-dx[i]).epsilon(1e-10));
    }
  }

  TEST_CASE("banded LU vs Gaussian elimination oracle") {
    auto rng = oracle::rng(23);
    for (std::size_t n : {1u, 4u, 17u, 50u}) {
      const std::size_t kl = 3, ku = 2;
      BandedMatrix m(n, kl, ku);
      oracle::Dense d(n, std::vector<double>(n, 0.0));
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (m.in_band(i, j)) d[i][j] = m.at(i, j) = u(rng);
      const auto rhs = oracle::uniform(rng, n, -1, 1);
      const auto x = solve_banded_lu(m, rhs);
      const auto ref = oracle::gauss_solve(d, rhs);
      for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("dense LU") {
    auto rng = oracle::rng(24);
    const std::size_t n = 9;
    DenseMatrix a(n, n);
    oracle::Dense d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = a(i, j) = oracle::uniform(rng, 1, -1, 1)[0];
    const auto rhs = oracle::uniform(rng, n, -1, 1);
    const auto x = solve_dense_lu(a, rhs);
    const auto ref = oracle::gauss_solve(d, rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
  }

  TEST_CASE("conjugate gradient") {
    const std::vector<double> diag{1, 2, 3, 4, 5, 6};
    auto apply = [&](std::span<const double> x, std::span<double> y) {
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = diag[i] * x[i];
    };
    const std::vector<double> b{1, 1, 1, 1, 1, 1};
    const auto r = conjugate_gradient(apply, b, 1e-13, 6);
    CHECK(r.iterations <= 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(r.x[i] == doctest::Approx(1.0 / diag[i]).epsilon(1e-12));

    auto rng = oracle::rng(25);
    const auto m = random_spd(40, 2, rng);
    const auto rhs = oracle::uniform(rng, 40, -1, 1);
    auto op = [&](std::span<const double> x, std::span<double> y) { m.multiply(x, y); };
    const auto direct = solve_banded_spd<double>(m, rhs);
    double prev = 1e300;
    for (double tol : {1e-4, 1e-8, 1e-12}) {
      const auto cg = conjugate_gradient(op, rhs, tol, 500);
      CHECK(cg.residual_norm <= tol);
      CHECK(cg.residual_norm <= prev);
      prev = cg.residual_norm;
      if (tol == 1e-12)
        for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(cg.x[i] - direct[i]) < 1e-10);
    }
    CHECK_THROWS_AS(conjugate_gradient(op, rhs, 1e-14, 2), SolverError);
  }
}
