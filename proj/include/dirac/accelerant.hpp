#pragma once

#include "dirac/core.hpp"
#include "dirac/spectra.hpp"

#include <span>
#include <vector>

namespace dirac {

/// Grid-sampled accelerant kernel on [-1, 1].
struct Accelerant {
  int r = 1;
  UniformGrid grid{-1.0, 1.0, 2};
  std::vector<Mat> samples;
  int n_max = 0;      // window truncation used when built from spectral data
  double tail = 0.0;  // magnitude of the partial sums between n_max and n_max/2

  static Accelerant zero(int r, int grid_n);
  static Accelerant constant(const Mat& value, int grid_n);

  /// Linear interpolation; x clamped to [-1, 1].
  Mat value_at(double x) const;

  /// max over paired nodes of ||H(x)* - H(-x)||_F (requires a symmetric grid).
  double symmetry_residual() const;
};

/// H(x) = sum over |n| <= n_max of
///   (sum_{lambda_j in window n} e^{2 i lambda_j x} alpha_j) - e^{2 i pi n x} I,
/// evaluated at the grid nodes.  Empty windows inside the truncation still
/// contribute their free term.
Accelerant accelerant_from_data(const SpectralData& data, const UniformGrid& grid);

/// Samples of x -> H(-x)* (equals H itself when H(x)* = H(-x)).
Accelerant flip_adjoint(const Accelerant& H);

/// 2r x 2r kernel F_H(x, t) on grid01 x grid01:
///   (1/2) [ H((x-t)/2)   H((x+t)/2)  ]
///         [ Hs((x+t)/2)  Hs((x-t)/2) ]   with Hs(x) = H(-x).
struct BlockKernelF {
  int r = 1;
  UniformGrid grid{0.0, 1.0, 2};
  std::vector<Mat> samples;  // (n+1)^2 blocks, row-major

  const Mat& at(int i, int k) const { return samples[static_cast<size_t>(i) * grid.node_count() + k]; }
  Mat& at(int i, int k) { return samples[static_cast<size_t>(i) * grid.node_count() + k]; }
};

BlockKernelF assemble_f(const Accelerant& H, const UniformGrid& grid01);

struct A3Report {
  bool pass = false;
  double min_eigenvalue = 0.0;
};

/// Smallest eigenvalue of the Nystrom discretization of I + F_H on
/// L2((0,1), C^{2r}); (A3) holds at truncation scale iff it stays positive.
A3Report check_a3(const Accelerant& H, const UniformGrid& grid01, double margin = 1e-3);

struct AccelerantTestReport {
  bool pass = false;
  std::vector<std::pair<double, double>> sigma_by_a;  // (a, sigma_min of I + H restricted to [0,a])
};

/// Discrete surrogate of the accelerant property: for each a the operator
/// f -> f + integral_0^a H(x-t) f(t) dt must be boundedly invertible.
AccelerantTestReport accelerant_test(const Accelerant& H, std::span<const double> a_samples,
                                     int grid_n = 128, double inv_tol = 1e-6);

/// Smallest eigenvalue of I + the convolution operator with kernel H(x-t)
/// on L2((0,1), C^r); unitarily equivalent to I + F_H.
double wiener_hopf_min_eig(const Accelerant& H, const UniformGrid& grid01);

}  // namespace dirac
