#include <doctest.h>

#include "dirac/direct.hpp"

#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace dirac;

namespace {

Potential constant_potential(cxd c, int grid_n = 8) {
  return Potential::constant(c * Mat::Identity(1, 1), UniformGrid(0.0, 1.0, grid_n));
}

}  // namespace

TEST_CASE("propagate: free operator at lambda = pi, x = 1 gives -I") {
  const CharacteristicEvaluator ev(Potential::zero(2, UniformGrid(0.0, 1.0, 8)), 64);
  const Mat u = ev.propagate(kPi, 1.0);
  CHECK((u + Mat::Identity(4, 4)).norm() < 1e-13);
}

TEST_CASE("propagate: initial condition is the identity") {
  const CharacteristicEvaluator ev(
      oracles::random_smooth_potential(2, 32, 3, 0.5, 7), 128);
  CHECK((ev.propagate(cxd(1.3, 0.4), 0.0) - Mat::Identity(4, 4)).norm() == 0.0);
  CHECK_THROWS_AS(ev.propagate(1.0, 1.5), Error);
  CHECK_THROWS_AS(ev.propagate(1.0, -0.5), Error);
}

TEST_CASE("propagate: constant potential matches the matrix exponential") {
  // Constant coefficients make every midpoint step exact, so the propagated
  // solution must equal exp(x A) for A = i diag(I,-I)(lambda I - Q).
  const cxd c(0.7, 0.0);
  const CharacteristicEvaluator ev(constant_potential(c), 37);
  for (cxd lambda : {cxd(2.0, 0.0), cxd(0.3, -0.2), cxd(-5.0, 0.1)}) {
    Mat a(2, 2);
    a << lambda, -c, std::conj(c), -lambda;
    a *= cxd(0.0, 1.0);
    for (double x : {0.31, 1.0}) {
      const Mat expxa = Mat(x * a).exp();
      CHECK((ev.propagate(lambda, x) - expxa).norm() < 1e-12);
    }
  }
}

TEST_CASE("propagate: r=2 constant potential matches the matrix exponential") {
  Mat c(2, 2);
  c << cxd(0.4, 0.1), cxd(-0.2, 0.3), cxd(0.1, 0.0), cxd(0.0, -0.5);
  const Potential q = Potential::constant(c, UniformGrid(0.0, 1.0, 8));
  const CharacteristicEvaluator ev(q, 21);
  const cxd lambda(1.7, 0.2);
  Mat a = Mat::Zero(4, 4);
  a.topLeftCorner(2, 2) = lambda * Mat::Identity(2, 2);
  a.topRightCorner(2, 2) = -c;
  a.bottomLeftCorner(2, 2) = c.adjoint();
  a.bottomRightCorner(2, 2) = -lambda * Mat::Identity(2, 2);
  a *= cxd(0.0, 1.0);
  CHECK((ev.propagate(lambda, 1.0) - Mat(a.exp())).norm() < 1e-12);
}

TEST_CASE("propagate: theta-unitarity holds for real lambda") {
  const Potential q = oracles::random_smooth_potential(2, 64, 4, 0.6, 11);
  const CharacteristicEvaluator ev(q, 256);
  const Mat theta = theta_matrix(2);
  for (double lambda : {0.0, 1.0, 7.3}) {
    for (double x : {0.25, 0.5, 1.0}) {
      const Mat u = ev.propagate(lambda, x);
      CHECK((u.adjoint() * theta * u - theta).norm() < 1e-12);
    }
  }
}

TEST_CASE("propagate: halving the step contracts the error ~4x on a varying q") {
  const Potential q = oracles::random_smooth_potential(1, 512, 3, 0.8, 3);
  const cxd lambda(3.0, 0.0);
  const Mat ref = CharacteristicEvaluator(q, 8192).propagate(lambda, 1.0);
  const double err_a = (CharacteristicEvaluator(q, 128).propagate(lambda, 1.0) - ref).norm();
  const double err_b = (CharacteristicEvaluator(q, 256).propagate(lambda, 1.0) - ref).norm();
  CHECK(err_a / err_b > 3.0);
  CHECK(err_a / err_b < 5.0);
}

TEST_CASE("char_functions: free operator gives sin and cos") {
  const CharacteristicEvaluator ev(Potential::zero(1, UniformGrid(0.0, 1.0, 4)), 16);
  for (cxd lambda : {cxd(0.7, 0.0), cxd(2.0, 0.5), cxd(kPi / 2.0, 0.0)}) {
    const CharFns f = ev.char_functions(lambda);
    CHECK(std::abs(f.s(0, 0) - std::sin(lambda)) < 1e-13);
    CHECK(std::abs(f.c(0, 0) - std::cos(lambda)) < 1e-13);
  }
  const CharFns f = ev.char_functions(kPi / 2.0);
  CHECK(std::abs(f.s(0, 0) - 1.0) < 1e-14);
  CHECK(std::abs(f.c(0, 0)) < 1e-14);
}

TEST_CASE("char_functions: constant-q closed form") {
  const cxd c(0.7, 0.0);
  const oracles::ConstantPotential oracle{c};
  const CharacteristicEvaluator ev(constant_potential(c), 32);
  for (cxd lambda : {cxd(0.4, 0.0), cxd(3.3, 0.0), cxd(1.0, 0.3)}) {
    const CharFns f = ev.char_functions(lambda);
    CHECK(std::abs(f.s(0, 0) - oracle.s(lambda)) < 1e-12);
    CHECK(std::abs(f.c(0, 0) - oracle.cfun(lambda)) < 1e-12);
  }
}

TEST_CASE("Wronskian relation -psi phi* + phi psi* = theta") {
  const Mat theta = theta_matrix(2);
  const Mat a = boundary_a(2);
  for (uint64_t seed : {1u, 2u, 3u}) {
    const Potential q = oracles::random_smooth_potential(2, 64, 3, 0.7, seed);
    const CharacteristicEvaluator ev(q, 512);
    for (double lambda : {0.0, 1.0, 5.0}) {
      for (double x : {0.25, 0.5, 1.0}) {
        const Mat u = ev.propagate(lambda, x);
        const Mat phi = u * theta * a.adjoint();
        const Mat psi = u * a.adjoint();
        CHECK((-psi * phi.adjoint() + phi * psi.adjoint() - theta).norm() < 1e-8);
      }
    }
  }
}

TEST_CASE("weyl_m: free operator") {
  const CharacteristicEvaluator ev(Potential::zero(1, UniformGrid(0.0, 1.0, 4)), 16);
  CHECK(std::abs(ev.weyl_m(kPi / 4.0)(0, 0) + 1.0) < 1e-12);  // -cot(pi/4) = -1
  CHECK(std::abs(ev.weyl_m(kPi / 2.0)(0, 0)) < 1e-12);        // cot(pi/2) = 0
  CHECK_THROWS_AS(ev.weyl_m(kPi), Error);                     // pole at pi n
  CHECK_THROWS_AS(ev.weyl_m(0.0), Error);
}

TEST_CASE("weyl_m: asymptotic approach to -cot lambda for small q") {
  // max over a lambda-grid in O of ||m_q + cot lambda I|| decreases per octave
  const Potential q = oracles::random_smooth_potential(1, 64, 2, 0.25, 5);
  const CharacteristicEvaluator ev(q, 2048);
  auto octave_max = [&](double lo, double hi) {
    double worst = 0.0;
    for (double lambda = lo; lambda <= hi; lambda += 0.37) {
      bool in_domain = true;
      for (int n = -20; n <= 20; ++n)
        if (std::abs(lambda - kPi * n) <= 1.0) in_domain = false;
      if (!in_domain) continue;
      const cxd cot = std::cos(lambda) / std::sin(lambda);
      worst = std::max(worst, std::abs(ev.weyl_m(lambda)(0, 0) + cot));
    }
    return worst;
  };
  const double a = octave_max(5.0, 10.0);
  const double b = octave_max(10.0, 20.0);
  const double c = octave_max(20.0, 40.0);
  CHECK(b < a);
  CHECK(c < b);
}

TEST_CASE("find_eigenvalues: free operator hits pi n with full deficiency") {
  const CharacteristicEvaluator ev(Potential::zero(2, UniformGrid(0.0, 1.0, 4)), 32);
  const auto roots = find_eigenvalues(ev, 3);
  REQUIRE(roots.size() == 7);
  for (int j = 0; j < 7; ++j) {
    CHECK(std::abs(roots[j].lambda - kPi * (j - 3)) < 1e-9);
    CHECK(roots[j].deficiency == 2);
  }
}

TEST_CASE("find_eigenvalues: constant-q roots match the closed form") {
  const cxd c(0.7, 0.0);
  const oracles::ConstantPotential oracle{c};
  const CharacteristicEvaluator ev(constant_potential(c), 64);
  const auto roots = find_eigenvalues(ev, 4);
  const auto expected = oracle.eigenvalues(4);
  REQUIRE(roots.size() == expected.size());
  for (size_t j = 0; j < expected.size(); ++j)
    CHECK(std::abs(roots[j].lambda - expected[j]) < 1e-8);
}

TEST_CASE("find_eigenvalues: one root per window for a small random q") {
  const Potential q = oracles::random_smooth_potential(1, 64, 3, 0.3, 9);
  const CharacteristicEvaluator ev(q, 512);
  const auto roots = find_eigenvalues(ev, 5);
  CHECK(roots.size() == 11);
  for (const auto& root : roots) CHECK(root.deficiency == 1);
}

TEST_CASE("norming_matrix: free operator residues are the identity") {
  const CharacteristicEvaluator ev(Potential::zero(2, UniformGrid(0.0, 1.0, 4)), 32);
  for (double lambda : {0.0, kPi, -2.0 * kPi}) {
    const Mat alpha = norming_matrix(ev, lambda, 0.1, 32);
    CHECK((alpha - Mat::Identity(2, 2)).norm() < 1e-10);
  }
}

TEST_CASE("norming_matrix: constant-q residues match the closed form") {
  const cxd c(0.7, 0.0);
  const oracles::ConstantPotential oracle{c};
  const CharacteristicEvaluator ev(constant_potential(c), 64);
  for (double lambda : oracle.eigenvalues(3)) {
    const Mat alpha = norming_matrix(ev, lambda, 0.08, 32);
    CHECK(std::abs(alpha(0, 0).real() - oracle.alpha(lambda)) < 1e-8);
  }
}

TEST_CASE("norming_matrix: guards") {
  const CharacteristicEvaluator ev(Potential::zero(1, UniformGrid(0.0, 1.0, 4)), 16);
  const double neighbors[] = {0.0, kPi};
  CHECK_THROWS_AS(norming_matrix(ev, 0.0, 2.0, 32, neighbors), Error);  // pi within 2 rho
  CHECK_NOTHROW(norming_matrix(ev, 0.0, 0.1, 32, neighbors));
}

TEST_CASE("spectral_data: free operator") {
  const CharacteristicEvaluator ev(Potential::zero(1, UniformGrid(0.0, 1.0, 4)), 32);
  const SpectralData data = spectral_data(ev, 3);
  REQUIRE(data.records.size() == 7);
  CHECK(data.index_of_lambda0() == 3);
  for (int j = 0; j < 7; ++j) {
    CHECK(std::abs(data.records[j].lambda - kPi * (j - 3)) < 1e-9);
    CHECK((data.records[j].alpha - Mat::Identity(1, 1)).norm() < 1e-9);
    CHECK(data.records[j].multiplicity == 1);
  }
  CHECK_NOTHROW(data.validate());
}

TEST_CASE("spectral_data: rank sum satisfies the (A2) count") {
  const Potential q = oracles::random_smooth_potential(2, 64, 3, 0.4, 21);
  const CharacteristicEvaluator ev(q, 512);
  const SpectralData data = spectral_data(ev, 3);
  long total = 0;
  for (const auto& rec : data.records) total += rec.multiplicity;
  CHECK(total == 7 * 2);
}
