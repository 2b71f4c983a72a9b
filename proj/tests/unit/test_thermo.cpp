#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "etlab/grid.hpp"
#include "etlab/thermo.hpp"
#include "oracles.hpp"

using namespace etlab;
using std::numbers::e;
using std::numbers::pi;

namespace {
EntropicState single(double phi, double w) { return {{phi}, {w}}; }
}  // namespace

TEST_SUITE("thermo") {
  TEST_CASE("to_primitive") {
    auto m = to_primitive(single(2.5, 0.0));
    CHECK(m.rho[0] == doctest::Approx(1.0));
    CHECK(m.theta[0] == doctest::Approx(1.0));
    CHECK(m.energy[0] == doctest::Approx(2.5));
    m = to_primitive(single(2.5 - std::log(2.0), 0.0));
    CHECK(m.rho[0] == doctest::Approx(0.5));
    CHECK(m.energy[0] == doctest::Approx(1.75));
    for (double c : {-3.0, -0.5, 0.7, 4.0}) {
      const auto p = to_primitive(single(2.5, c));
      CHECK(p.rho[0] == doctest::Approx(std::exp(1.5 * c)).epsilon(1e-14));
      const auto back = to_entropic(p.rho, p.theta);
      CHECK(back.phi[0] == doctest::Approx(2.5).epsilon(1e-13));
      CHECK(back.w[0] == doctest::Approx(c).epsilon(1e-13));
    }
    CHECK_THROWS_AS(to_primitive(EntropicState{{0.0, 400.0}, {0.0, 0.0}}), OverflowError);
    try {
      to_primitive(EntropicState{{0.0, 0.0, 1.0}, {0.0, 0.0, -301.0}});
      FAIL("expected overflow");
    } catch (const OverflowError& err) {
      CHECK(err.cell() == 2);
    }
  }

  TEST_CASE("to_entropic") {
    auto s = to_entropic(std::vector<double>{1.0}, std::vector<double>{1.0});
    CHECK(s.phi[0] == doctest::Approx(2.5));
    CHECK(s.w[0] == 0.0);
    s = to_entropic(std::vector<double>{e}, std::vector<double>{1.0});
    CHECK(s.phi[0] == doctest::Approx(3.5));
    CHECK_THROWS(to_entropic(std::vector<double>{1.0}, std::vector<double>{0.0}));
    CHECK_THROWS(to_entropic(std::vector<double>{-1.0}, std::vector<double>{1.0}));
  }

  TEST_CASE("round trip on random entropic states") {
    auto rng = oracle::rng(1);
    const auto phi = oracle::uniform(rng, 10000, -10.0, 10.0);
    const auto w = oracle::uniform(rng, 10000, -5.0, 5.0);
    const auto m = to_primitive({phi, w});
    for (std::size_t i = 0; i < phi.size(); ++i) {
      CHECK(m.energy[i] == doctest::Approx(m.theta[i] * (1 + 1.5 * m.rho[i])).epsilon(1e-14));
    }
    const auto back = to_entropic(m.rho, m.theta);
    double worst = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      worst = std::max({worst, std::abs(back.phi[i] - phi[i]), std::abs(back.w[i] - w[i])});
    }
    CHECK(worst < 1e-12);
  }

  TEST_CASE("entropy_density") {
    CHECK(entropy_density(1, 1) == doctest::Approx(0.0));
    CHECK(entropy_density(e, 1) == doctest::Approx(e));
    CHECK(entropy_density(1, e) == doctest::Approx(-2.5));
    CHECK_THROWS_AS(entropy_density(0, 1), DomainError);
    CHECK_THROWS_AS(entropy_density(1, -1), DomainError);
  }

  TEST_CASE("entropy_tilde") {
    CHECK(std::abs(entropy_tilde(1, 2.5)) < 1e-15);
    // h̃ = h(ρ, E/c): at (1, 1), θ = 2/5, so h = −(5/2) log(2/5) ≈ +2.29073.
    CHECK(entropy_tilde(1, 1) == doctest::Approx(-2.5 * std::log(0.4)).epsilon(1e-14));
    CHECK(entropy_tilde(1, 1) == doctest::Approx(2.29073).epsilon(1e-6));
    auto rng = oracle::rng(2);
    const auto r = oracle::uniform(rng, 1000, 1e-3, 10.0);
    const auto en = oracle::uniform(rng, 1000, 1e-3, 20.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double ref = entropy_density(r[i], en[i] / (1 + 1.5 * r[i]));
      CHECK(std::abs(entropy_tilde(r[i], en[i]) - ref) <= 1e-12 * (1 + std::abs(ref)));
      CHECK(entropy_tilde(r[i], en[i]) == doctest::Approx(oracle::h_tilde(r[i], en[i])).epsilon(1e-12));
    }
    CHECK_THROWS_AS(entropy_tilde(1, 0), DomainError);
  }

  TEST_CASE("gibbs and potentials") {
    CHECK(gibbs(1, 1) == doctest::Approx(2.5));
    const double d = 1e-6;
    CHECK((gibbs(1 + d, 1) - gibbs(1 - d, 1)) / (2 * d) == doctest::Approx(2.5).epsilon(1e-8));
    CHECK(std::abs((gibbs(1, 1 + d) - gibbs(1, 1 - d)) / (2 * d)) < 1e-8);
    const auto p = potentials(1, 1);
    CHECK(p.mu == doctest::Approx(2.5));
    CHECK(p.phi == doctest::Approx(2.5));
    CHECK(p.neg_inv_theta == doctest::Approx(-1.0));
    auto rng = oracle::rng(4);
    const auto r = oracle::uniform(rng, 1000, 0.1, 5.0);
    const auto t = oracle::uniform(rng, 1000, 0.1, 5.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto q = potentials(r[i], t[i]);
      CHECK(q.mu / t[i] == doctest::Approx(q.phi).epsilon(1e-14));
      const double hr = 1e-5 * r[i], ht = 1e-5 * t[i];
      const double dg_r = (gibbs(r[i] + hr, t[i]) - gibbs(r[i] - hr, t[i])) / (2 * hr);
      const double dg_t = (gibbs(r[i], t[i] + ht) - gibbs(r[i], t[i] - ht)) / (2 * ht);
      CHECK(std::abs(dg_r - q.mu) <= 1e-6 * (1 + std::abs(q.mu)));
      const double h = oracle::h_rho_theta(r[i], t[i]);
      CHECK(std::abs(dg_t - h) <= 1e-5 * (1 + std::abs(h)));
      // φ = ∂h/∂ρ at fixed E, −1/θ = ∂h̃/∂E
      const double en = t[i] * (1 + 1.5 * r[i]);
      const double dh_r = (oracle::h_tilde(r[i] + hr, en) - oracle::h_tilde(r[i] - hr, en)) / (2 * hr);
      const double he = 1e-5 * en;
      const double dh_e = (oracle::h_tilde(r[i], en + he) - oracle::h_tilde(r[i], en - he)) / (2 * he);
      CHECK(std::abs(dh_r - q.phi) <= 1e-5 * (1 + std::abs(q.phi)));
      CHECK(std::abs(dh_e - q.neg_inv_theta) <= 1e-5 * (1 + std::abs(q.neg_inv_theta)));
    }
  }

  TEST_CASE("onsager") {
    const auto m = onsager(1, 1);
    CHECK(m.m11 == 1.0);
    CHECK(m.m12 == 2.5);
    CHECK(m.m22 == 9.75);
    CHECK(m.det() == doctest::Approx(3.5));
    const auto z = onsager(0, 3.0);
    CHECK(z.m11 == 0.0);
    CHECK(z.m12 == 0.0);
    CHECK(z.min_eigenvalue() >= 0.0);
    const auto zt = onsager(2.0, 0);
    CHECK(zt.m11 == 0.0);
    CHECK(zt.m12 == 0.0);
    CHECK(zt.m22 == 0.0);
    CHECK_THROWS_AS(onsager(-1, 1), DomainError);
    CHECK_THROWS_AS(onsager(1, -1), DomainError);
  }

  TEST_CASE("onsager PSD and determinant identity on 1e4 samples") {
    auto rng = oracle::rng(5);
    const auto r = oracle::uniform(rng, 10000, 0.0, 10.0);
    const auto t = oracle::uniform(rng, 10000, 0.0, 10.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto m = onsager(r[i], t[i]);
      REQUIRE(m.min_eigenvalue() >= -1e-12);
      const double ref = r[i] * std::pow(t[i], 3) + 2.5 * r[i] * r[i] * std::pow(t[i], 4);
      REQUIRE(std::abs(m.det() - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("hessian_htilde") {
    const auto h = hessian_htilde(1, 1);
    CHECK(h.det == doctest::Approx(2.5));
    auto rng = oracle::rng(6);
    const auto r = oracle::uniform(rng, 1000, 0.05, 8.0);
    const auto en = oracle::uniform(rng, 1000, 0.05, 8.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const auto hs = hessian_htilde(r[i], en[i]);
      const double det_ref = (1 + 1.5 * r[i]) / (r[i] * en[i] * en[i]);
      CHECK(hs.det == doctest::Approx(det_ref).epsilon(1e-12));
      CHECK(hs.det > 0.0);
      CHECK(hs.matrix[0][1] == hs.matrix[1][0]);
      CHECK(hs.matrix[0][0] > 0.0);
      const double a = hs.matrix[0][0], b = hs.matrix[0][1], c = hs.matrix[1][1];
      CHECK(a * c - b * b == doctest::Approx(det_ref).epsilon(1e-10));
      // finite-difference Hessian of the oracle entropy
      const double dr = 1e-4 * r[i], de = 1e-4 * en[i];
      auto f = [](double x, double y) { return oracle::h_tilde(x, y); };
      const double frr = (f(r[i] + dr, en[i]) - 2 * f(r[i], en[i]) + f(r[i] - dr, en[i])) / (dr * dr);
      const double fee = (f(r[i], en[i] + de) - 2 * f(r[i], en[i]) + f(r[i], en[i] - de)) / (de * de);
      const double fre = (f(r[i] + dr, en[i] + de) - f(r[i] + dr, en[i] - de) -
                          f(r[i] - dr, en[i] + de) + f(r[i] - dr, en[i] - de)) /
                         (4 * dr * de);
      const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
      CHECK(std::abs(frr - a) <= 1e-5 * scale);
      CHECK(std::abs(fre - b) <= 1e-5 * scale);
      CHECK(std::abs(fee - c) <= 1e-5 * scale);
    }
    CHECK_THROWS_AS(hessian_htilde(0, 1), DomainError);
  }

  TEST_CASE("maxwellian_3d") {
    CHECK(maxwellian_3d(1, {0, 0, 0}) == doctest::Approx(std::pow(2 * pi, -1.5)));
    CHECK(maxwellian_3d(1, {0, 0, 0}) == doctest::Approx(0.063494).epsilon(1e-5));
    CHECK(maxwellian_3d(1.7, {1.0, 2.0, 2.0}) == doctest::Approx(maxwellian_3d(1.7, {3.0, 0.0, 0.0})));
    CHECK(maxwellian_3d(1.7, {0.0, -3.0, 0.0}) == doctest::Approx(maxwellian_3d(1.7, {0.0, 0.0, 3.0})));
    // ∫M = 1 via a product of independent 1D Simpson rules
    const double th = 1.3;
    const double one_d = oracle::simpson([&](double v) { return maxwellian_1d(th, v); }, -12, 12, 400);
    CHECK(one_d == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(maxwellian_3d(th, {0.3, 0.1, -0.4}) ==
          doctest::Approx(maxwellian_1d(th, 0.3) * maxwellian_1d(th, 0.1) * maxwellian_1d(th, -0.4)));
    CHECK_THROWS_AS(maxwellian_3d(0, {0, 0, 0}), DomainError);
  }

  TEST_CASE("maxwellian moments") {
    for (double th : {0.5, 1.0, 2.0}) {
      const auto rep = maxwellian_moments_check(th);
      CHECK(rep.max_abs_error < 1e-8);
      CHECK_FALSE(rep.box_too_small);
      CHECK(rep.zeroth == doctest::Approx(1.0).epsilon(1e-10));
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(rep.first[i]) < 1e-12);
        CHECK(std::abs(rep.third[i]) < 1e-12);
        CHECK(rep.second[i][i] == doctest::Approx(th).epsilon(1e-9));
        CHECK(rep.fourth[i][i] == doctest::Approx(5 * th * th).epsilon(1e-9));
        for (int j = 0; j < 3; ++j) {
          if (i != j) CHECK(std::abs(rep.second[i][j]) < 1e-12);
        }
      }
    }
    CHECK(maxwellian_moments_check(2.0).fourth[0][0] == doctest::Approx(20.0).epsilon(1e-9));
    const auto small = maxwellian_moments_check(1.0, {2.0, 64});
    CHECK(small.box_too_small);
    CHECK(small.max_abs_error > 1e-8);
  }

  TEST_CASE("flux_consistency") {
    const auto g = build_grid(16, 1.0);
    EntropicState c{std::vector<double>(16, 1.3), std::vector<double>(16, -0.2)};
    const auto r0 = flux_consistency(g, c);
    CHECK(r0.residual_mass == 0.0);
    CHECK(r0.residual_energy == 0.0);
    auto residual = [](std::size_t n) {
      const auto gr = build_grid(n, 1.0);
      std::vector<double> rho, th;
      for (double x : gr.cell_centers) {
        rho.push_back(1.0 + 0.4 * std::sin(2 * pi * x));
        th.push_back(1.0 + 0.3 * std::cos(2 * pi * x));
      }
      return flux_consistency(gr, to_entropic(rho, th));
    };
    double prev_m = 0, prev_e = 0;
    for (std::size_t n : {16u, 32u, 64u, 128u}) {
      const auto r = residual(n);
      CHECK(r.residual_mass > 0.0);
      if (prev_m > 0) {
        CHECK(std::log2(prev_m / r.residual_mass) == doctest::Approx(2.0).epsilon(0.1));
        CHECK(std::log2(prev_e / r.residual_energy) == doctest::Approx(2.0).epsilon(0.1));
      }
      prev_m = r.residual_mass;
      prev_e = r.residual_energy;
    }
  }
}
