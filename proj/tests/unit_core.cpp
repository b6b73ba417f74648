#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dirac/core.hpp"

#include <random>

using namespace dirac;

namespace {

std::mt19937_64 rng(12345);

Mat random_matrix(int rows, int cols) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = cxd(dist(rng), dist(rng));
  return m;
}

}  // namespace

TEST_CASE("hermitian_part_check") {
  CHECK(hermitian_part_check(Mat::Identity(3, 3), 1e-12));

  Mat m(2, 2);
  m << cxd(0, 0), cxd(0, 1), cxd(0, 1), cxd(0, 0);  // [[0, i],[i, 0]]
  CHECK_FALSE(hermitian_part_check(m, 1e-12));

  const Mat a = random_matrix(4, 4);
  CHECK(hermitian_part_check(0.5 * (a + a.adjoint()), 1e-12));

  CHECK_THROWS_AS(hermitian_part_check(random_matrix(2, 3), 1e-12), Error);
}

TEST_CASE("psd_check") {
  CHECK(psd_check(Mat::Identity(3, 3), 1e-12));

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  CHECK_FALSE(psd_check(d, 1e-12));

  const Mat a = random_matrix(3, 3);
  CHECK(psd_check(a * a.adjoint(), 1e-10));  // Gram matrices are PSD
}

TEST_CASE("kernel_apply: zero kernel") {
  const UniformGrid grid(0.0, 1.0, 16);
  TriangularKernel K = TriangularKernel::zero(2, grid);
  std::vector<Mat> f(grid.node_count(), Mat::Ones(2, 1));
  for (const Mat& v : kernel_apply(K, f)) CHECK(v.norm() == 0.0);
}

TEST_CASE("kernel_apply: identity kernel integrates a constant exactly") {
  // K = I, f = c: (Kf)(x) = x c, and the trapezoid rule is exact for constants.
  const UniformGrid grid(0.0, 1.0, 32);
  TriangularKernel K = TriangularKernel::zero(1, grid);
  for (auto& row : K.rows)
    for (auto& blk : row) blk = Mat::Identity(1, 1);
  const cxd c(0.7, -0.3);
  std::vector<Mat> f(grid.node_count(), c * Mat::Ones(1, 1));
  const auto out = kernel_apply(K, f);
  for (int i = 0; i < grid.node_count(); ++i)
    CHECK(std::abs(out[i](0, 0) - grid.node(i) * c) < 1e-14);
}

TEST_CASE("kernel_apply: grid-refinement oracle shows order-2 quadrature") {
  // Smooth kernel and density evaluated on n and 2n grids; the relative
  // difference from the refined result contracts by about 4x per doubling.
  auto kernel = [](double x, double t) { return cxd(std::sin(3.0 * x + t), 0.2 * x * t); };
  auto density = [](double t) { return cxd(std::cos(2.0 * t), t); };

  auto apply_at_one = [&](int n) {
    const UniformGrid grid(0.0, 1.0, n);
    TriangularKernel K = TriangularKernel::zero(1, grid);
    std::vector<Mat> f(grid.node_count());
    for (int i = 0; i <= n; ++i) {
      f[i] = density(grid.node(i)) * Mat::Ones(1, 1);
      for (int k = 0; k <= i; ++k)
        K.rows[i][k] = kernel(grid.node(i), grid.node(k)) * Mat::Ones(1, 1);
    }
    return kernel_apply(K, f).back()(0, 0);
  };

  const cxd fine = apply_at_one(512);
  const double err_a = std::abs(apply_at_one(32) - fine);
  const double err_b = std::abs(apply_at_one(64) - fine);
  CHECK(err_a / err_b > 3.0);
  CHECK(err_a / err_b < 5.0);
}

TEST_CASE("TriangularKernel reports zero above the diagonal") {
  const UniformGrid grid(0.0, 1.0, 8);
  TriangularKernel K = TriangularKernel::zero(2, grid);
  for (auto& row : K.rows)
    for (auto& blk : row) blk = Mat::Ones(2, 2);
  CHECK(K.value(3, 5).norm() == 0.0);
  CHECK(K.value(5, 3).norm() > 0.0);
}

TEST_CASE("UniformGrid validation") {
  CHECK_THROWS_AS(UniformGrid(1.0, 0.0, 4), Error);
  CHECK_THROWS_AS(UniformGrid(0.0, 1.0, 1), Error);
  const UniformGrid g(-1.0, 1.0, 10);
  CHECK(g.symmetric());
  CHECK(g.node(0) == -1.0);
  CHECK(g.node(10) == 1.0);
  CHECK(g.step() == doctest::Approx(0.2));
}
