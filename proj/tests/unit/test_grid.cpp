#include <cmath>
#include <vector>

#include "doctest.h"
#include "etlab/grid.hpp"
#include "oracles.hpp"

using namespace etlab;

TEST_SUITE("grid") {
  TEST_CASE("build_grid partitions the interval") {
    const auto g = build_grid(4, 1.0);
    CHECK(g.h == doctest::Approx(0.25));
    REQUIRE(g.cell_centers.size() == 4);
    const std::vector<double> expect{0.125, 0.375, 0.625, 0.875};
    for (std::size_t i = 0; i < 4; ++i) CHECK(g.cell_centers[i] == doctest::Approx(expect[i]));
    CHECK(build_grid(10, 2.0).h == doctest::Approx(0.2));
    CHECK_THROWS(build_grid(2, 1.0));
    CHECK_THROWS(build_grid(8, 0.0));
    CHECK_THROWS(build_grid(8, -1.0));
  }

  TEST_CASE("grid invariants") {
    for (std::size_t n : {3u, 7u, 64u, 1000u}) {
      const auto g = build_grid(n, 2.7);
      CHECK(std::abs(g.h * static_cast<double>(n) - 2.7) < 1e-14);
      CHECK(integrate(g, std::vector<double>(n, 1.0)) == doctest::Approx(2.7).epsilon(1e-14));
    }
  }

  TEST_CASE("grad_edge") {
    const auto g = build_grid(5, 1.0);
    for (double v : grad_edge(g, std::vector<double>(5, 3.0))) CHECK(v == 0.0);
    std::vector<double> lin;
    for (double x : g.cell_centers) lin.push_back(1.7 * x);
    const auto d = grad_edge(g, lin);
    REQUIRE(d.size() == 4);
    for (double v : d) CHECK(v == doctest::Approx(1.7).epsilon(1e-12));
    const auto g3 = build_grid(3, 1.0);
    const auto e = grad_edge(g3, std::vector<double>{0, 1, 0});
    CHECK(e[0] == doctest::Approx(3.0));
    CHECK(e[1] == doctest::Approx(-3.0));
    CHECK_THROWS_AS(grad_edge(g, std::vector<double>(4, 0.0)), ShapeError);
  }

  TEST_CASE("div_edge is the negative adjoint of grad_edge") {
    auto rng = oracle::rng(7);
    for (std::size_t n : {3u, 10u, 57u}) {
      const auto g = build_grid(n, 1.3);
      for (int trial = 0; trial < 50; ++trial) {
        const auto psi = oracle::uniform(rng, n, -2.0, 2.0);
        const auto flux = oracle::uniform(rng, n - 1, -2.0, 2.0);
        const auto div = div_edge(g, flux);
        const auto grad = grad_edge(g, psi);
        double lhs = 0.0, rhs = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) lhs += g.h * div[i] * psi[i];
        for (std::size_t j = 0; j + 1 < n; ++j) {
          rhs -= g.h * flux[j] * grad[j];
          scale += std::abs(flux[j] * grad[j]) * g.h;
        }
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + scale));
        CHECK(std::abs(integrate(g, div)) <= 1e-12 * (1.0 + scale));
      }
    }
    const auto g = build_grid(6, 1.0);
    for (double v : div_edge(g, std::vector<double>(5, 0.0))) CHECK(v == 0.0);
    CHECK_THROWS_AS(div_edge(g, std::vector<double>(6, 0.0)), ShapeError);
  }

  TEST_CASE("second_diff") {
    const auto g = build_grid(20, 1.0);
    for (double v : second_diff(g, std::vector<double>(20, -4.0))) CHECK(v == 0.0);
    std::vector<double> quad;
    for (double x : g.cell_centers) quad.push_back(x * x);
    const auto d2 = second_diff(g, quad);
    for (std::size_t i = 1; i + 1 < 20; ++i) CHECK(d2[i] == doctest::Approx(2.0).epsilon(1e-9));
    // b(u, const) = 0 exactly
    auto rng = oracle::rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const auto u = oracle::uniform(rng, 20, -5.0, 5.0);
      const auto lu = second_diff(g, u);
      const auto lc = second_diff(g, std::vector<double>(20, 0.37));
      double b = 0.0;
      for (std::size_t i = 0; i < 20; ++i) b += g.h * lu[i] * lc[i];
      CHECK(b == 0.0);
    }
    CHECK_THROWS_AS(second_diff(g, std::vector<double>(19, 0.0)), ShapeError);
  }

  TEST_CASE("integrate") {
    CHECK(integrate(build_grid(8, 2.0), std::vector<double>(8, 1.0)) == doctest::Approx(2.0));
    CHECK(integrate(build_grid(3, 3.0), std::vector<double>{1, 2, 3}) == doctest::Approx(6.0));
    auto rng = oracle::rng(11);
    const auto g = build_grid(33, 1.0);
    const auto f = oracle::uniform(rng, 33, -1.0, 1.0);
    std::vector<double> cf(f);
    for (auto& v : cf) v *= -3.25;
    CHECK(integrate(g, cf) == doctest::Approx(-3.25 * integrate(g, f)).epsilon(1e-13));
    CHECK_THROWS_AS(integrate(g, std::vector<double>(32, 0.0)), ShapeError);
  }
}
