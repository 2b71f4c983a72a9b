#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "etlab/experiments.hpp"
#include "etlab/kinetic.hpp"
#include "kinetic/kernels.hpp"
#include "oracles.hpp"

using namespace etlab;

namespace {

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]) / (1e-300 + std::abs(b[i]) + 1.0));
  return r;
}

KineticState bump_state(const Grid1D& g, const VelocityGrid& vg, double eps) {
  const auto m = preset("gauss-bump")(g);
  std::vector<double> th(g.n_cells);
  for (std::size_t i = 0; i < g.n_cells; ++i) th[i] = 1.0 + 0.5 * std::sin(3.0 * g.cell_centers[i]);
  return init_equilibrium(g, vg, m.rho, th, eps);
}

}  // namespace

TEST_SUITE("kinetic") {
  TEST_CASE("velocity grid") {
    const auto vg = build_velocity_grid(8.0, 64);
    REQUIRE(vg.nodes.size() == 64);
    for (std::size_t j = 0; j < 64; ++j) {
      CHECK(vg.nodes[j] == doctest::Approx(-vg.nodes[63 - j]).epsilon(1e-15));
      CHECK(vg.weights[j] == vg.weights[63 - j]);
    }
    double odd = 0.0;
    for (std::size_t j = 0; j < 64; ++j) odd += vg.weights[j] * vg.nodes[j] * std::exp(-vg.nodes[j] * vg.nodes[j]);
    CHECK(std::abs(odd) < 1e-14);
    CHECK_THROWS(build_velocity_grid(0.0, 64));
    CHECK_THROWS(build_velocity_grid(8.0, 1));
  }

  TEST_CASE("reduced closure identities") {
    for (double th : {0.5, 1.0, 2.0}) {
      const auto r = reduced_closure_check(th);
      CHECK(r.max_err_zeroth < 1e-8);
      CHECK(r.max_err_second < 1e-8);
    }
  }

  TEST_CASE("discrete Maxwellian") {
    const auto vg = build_velocity_grid(8.0, 64);
    for (double th : {0.3, 1.0, 2.5}) {
      const auto m = discrete_maxwellian(vg, th);
      double s = 0.0;
      for (std::size_t j = 0; j < 64; ++j) s += vg.weights[j] * m[j];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
      // close to the continuous marginal
      const double c = std::pow(2 * std::numbers::pi * th, -0.5);
      CHECK(m[32] == doctest::Approx(c * std::exp(-vg.nodes[32] * vg.nodes[32] / (2 * th))).epsilon(1e-6));
    }
  }

  TEST_CASE("init_equilibrium and moments") {
    const auto g = build_grid(8, 1.0);
    const auto vg = build_velocity_grid(8.0, 64);
    const auto s = init_equilibrium(g, vg, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0), 0.1);
    const auto mo = moments(vg, s);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(mo.rho[i] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(mo.kinetic_energy[i] == doctest::Approx(1.5).epsilon(1e-8));
      CHECK(std::abs(mo.mass_flux[i]) < 1e-13);
      for (std::size_t j = 0; j < 64; ++j) CHECK(s.row2(i)[j] == doctest::Approx(2.0 * s.row0(i)[j]));
    }
    CHECK(energy_total(g, vg, s) == doctest::Approx(2.5).epsilon(1e-8));
    KineticState d = s;
    for (auto& x : d.g0) x *= 2;
    for (auto& x : d.g2) x *= 2;
    const auto md = moments(vg, d);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(md.rho[i] == doctest::Approx(2 * mo.rho[i]));
      CHECK(md.kinetic_energy[i] == doctest::Approx(2 * mo.kinetic_energy[i]));
    }
    CHECK_THROWS(init_equilibrium(g, vg, std::vector<double>(8, 0.0), std::vector<double>(8, 1.0), 0.1));
    CHECK_THROWS(init_equilibrium(g, vg, std::vector<double>(7, 1.0), std::vector<double>(7, 1.0), 0.1));
  }

  TEST_CASE("energy_total is additive over subintervals") {
    const auto g = build_grid(10, 1.0);
    const auto vg = build_velocity_grid(8.0, 32);
    const auto s = bump_state(g, vg, 0.2);
    const auto mo = moments(vg, s);
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < 10; ++i) (i < 4 ? left : right) += g.h * (s.theta_b[i] + mo.kinetic_energy[i]);
    CHECK(left + right == doctest::Approx(energy_total(g, vg, s)).epsilon(1e-14));
  }

  TEST_CASE("equilibrium is a fixed point") {
    const auto g = build_grid(16, 1.0);
    const auto vg = build_velocity_grid(8.0, 64);
    const auto s = init_equilibrium(g, vg, std::vector<double>(16, 0.7), std::vector<double>(16, 1.3), 0.1);
    const double dt = cfl_limit(g, vg, 0.1) * 0.5;
    for (auto rec : {Reconstruction::upwind, Reconstruction::van_leer}) {
      KineticOptions o;
      o.reconstruction = rec;
      const auto n = kinetic_step(g, vg, s, dt, o);
      CHECK(max_rel(n.g0, s.g0) < 1e-12);
      CHECK(max_rel(n.g2, s.g2) < 1e-12);
      CHECK(max_rel(n.theta_b, s.theta_b) < 1e-12);
    }
  }

  TEST_CASE("conservation and nonnegativity per step") {
    const auto g = build_grid(24, 1.0);
    const auto vg = build_velocity_grid(8.0, 48);
    for (double eps : {0.5, 0.05}) {
      auto s = bump_state(g, vg, eps);
      const double dt = cfl_limit(g, vg, eps) * 0.5;
      for (int k = 0; k < 50; ++k) {
        const double m0 = kinetic_mass(g, vg, s), e0 = energy_total(g, vg, s);
        s = kinetic_step(g, vg, s, dt);
        CHECK(std::abs(kinetic_mass(g, vg, s) - m0) <= 1e-12 * m0);
        CHECK(std::abs(energy_total(g, vg, s) - e0) <= 1e-10 * e0);
        for (double x : s.g0) REQUIRE(x >= 0.0);
      }
    }
  }

  TEST_CASE("CFL violation is rejected") {
    const auto g = build_grid(8, 1.0);
    const auto vg = build_velocity_grid(8.0, 16);
    const auto s = bump_state(g, vg, 0.1);
    CHECK_THROWS(kinetic_step(g, vg, s, 1.5 * cfl_limit(g, vg, 0.1)));
    CHECK_NOTHROW(kinetic_step(g, vg, s, cfl_limit(g, vg, 0.1)));
  }

  TEST_CASE("run_kinetic") {
    const auto g = build_grid(12, 1.0);
    const auto vg = build_velocity_grid(8.0, 32);
    const auto run = run_kinetic(g, vg, std::vector<double>(12, 1.0), std::vector<double>(12, 1.0), 0.2, 0.01);
    REQUIRE(run.records.size() == 2);
    CHECK(run.records.back().time == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(static_cast<double>(run.steps) * run.dt == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(run.dt <= 0.5 * cfl_limit(g, vg, 0.2) * (1 + 1e-12));
    CHECK(max_rel(run.records.back().moments.rho, run.records.front().moments.rho) < 1e-12);
    const auto strided = run_kinetic(g, vg, std::vector<double>(12, 1.0), std::vector<double>(12, 1.0), 0.2, 0.01, {}, 5);
    CHECK(strided.records.size() > 2);

    // halving dt moves observables by a first-order amount
    const auto m = preset("gauss-bump")(g);
    KineticOptions a, b;
    b.cfl = 0.25;
    const auto ra = run_kinetic(g, vg, m.rho, m.theta, 0.2, 0.02, a);
    const auto rb = run_kinetic(g, vg, m.rho, m.theta, 0.2, 0.02, b);
    double diff = 0.0;
    for (std::size_t i = 0; i < 12; ++i)
      diff += g.h * std::abs(ra.records.back().moments.rho[i] - rb.records.back().moments.rho[i]);
    CHECK(diff < 10 * ra.dt);
  }

  TEST_CASE("coarsen and limit_compare") {
    CHECK(coarsen({1, 3, 5, 7}, 2) == std::vector<double>{2, 6});
    CHECK_THROWS(coarsen({1, 2, 3}, 2));
    const auto g = build_grid(4, 1.0);
    const auto m = with_energy({1, 2, 1, 2}, {1, 1, 2, 2});
    const auto z = limit_compare(g, m.rho, m.energy, m);
    CHECK(z.err_rho == 0.0);
    CHECK(z.err_energy == 0.0);
    CHECK_THROWS(limit_compare(g, {1, 2}, {1, 2}, m));
  }

  TEST_CASE("SIMD kernels match the scalar reference") {
    const auto* avx = kernels::avx2_table();
    if (!avx || !kernels::cpu_has_avx2()) {
      MESSAGE("AVX2 kernels unavailable; equivalence test skipped");
      return;
    }
    const auto& sc = kernels::scalar_table();
    auto rng = oracle::rng(41);
    for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 64u, 101u}) {
      const auto v = oracle::uniform(rng, n, -8, 8);
      const auto a = oracle::uniform(rng, n, 0, 1), b = oracle::uniform(rng, n, 0, 1);
      auto c = oracle::uniform(rng, n, 0, 1), d = oracle::uniform(rng, n, 0, 1);
      // exercise the limiter's zero-slope branch
      for (std::size_t j = 0; j < n; j += 3) c[j] = b[j];
      std::vector<double> o1(n), o2(n);
      sc.face_flux_upwind(v.data(), a.data(), b.data(), o1.data(), n);
      avx->face_flux_upwind(v.data(), a.data(), b.data(), o2.data(), n);
      CHECK(max_rel(o1, o2) == 0.0);
      sc.face_flux_vanleer(v.data(), a.data(), b.data(), c.data(), d.data(), o1.data(), n);
      avx->face_flux_vanleer(v.data(), a.data(), b.data(), c.data(), d.data(), o2.data(), n);
      CHECK(max_rel(o1, o2) < 1e-14);
      auto g1 = a, g2 = a;
      sc.flux_update(g1.data(), b.data(), c.data(), 0.37, n);
      avx->flux_update(g2.data(), b.data(), c.data(), 0.37, n);
      CHECK(max_rel(g1, g2) < 1e-15);
      sc.relax_row(g1.data(), d.data(), 0.25, 0.75, n);
      avx->relax_row(g2.data(), d.data(), 0.25, 0.75, n);
      CHECK(max_rel(g1, g2) < 1e-15);
      std::vector<double> v2(n);
      for (std::size_t j = 0; j < n; ++j) v2[j] = v[j] * v[j];
      double m1[3], m2[3];
      sc.row_moments(a.data(), b.data(), v.data(), v2.data(), n, m1);
      avx->row_moments(a.data(), b.data(), v.data(), v2.data(), n, m2);
      for (int k = 0; k < 3; ++k) CHECK(m1[k] == doctest::Approx(m2[k]).epsilon(1e-13));
    }
    // whole-step equivalence
    const auto g = build_grid(20, 1.0);
    const auto vg = build_velocity_grid(8.0, 64);
    auto s1 = bump_state(g, vg, 0.1), s2 = s1;
    KineticOptions o1, o2;
    o1.simd = SimdChoice::scalar;
    o2.simd = SimdChoice::avx2;
    const double dt = 0.5 * cfl_limit(g, vg, 0.1);
    for (int k = 0; k < 20; ++k) {
      s1 = kinetic_step(g, vg, s1, dt, o1);
      s2 = kinetic_step(g, vg, s2, dt, o2);
    }
    CHECK(max_rel(s1.g0, s2.g0) < 1e-12);
    CHECK(max_rel(s1.theta_b, s2.theta_b) < 1e-12);
  }

  TEST_CASE("SIMD selection") {
    CHECK(resolve_simd(SimdChoice::scalar) == "scalar");
    CHECK(std::string(kernels::select(SimdChoice::scalar).name) == "scalar");
    setenv("ETLAB_SIMD", "scalar", 1);
    CHECK(resolve_simd(SimdChoice::automatic) == "scalar");
    unsetenv("ETLAB_SIMD");
    if (kernels::avx2_table() && kernels::cpu_has_avx2()) {
      CHECK(resolve_simd(SimdChoice::automatic) == "avx2");
      CHECK(resolve_simd(SimdChoice::avx2) == "avx2");
    }
  }
}
