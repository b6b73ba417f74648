#pragma once

#include "dirac/core.hpp"

#include <utility>
#include <vector>

namespace dirac {

/// One eigenvalue with its norming matrix.
struct EigenRecord {
  double lambda = 0.0;
  Mat alpha;             // r x r, PSD, nonzero
  int multiplicity = 1;  // numerical rank of alpha
  double residual = 0.0; // sigma_min of s(lambda) at the located root
};

/// Ordered spectral data covering the windows |n| <= n_max.
struct SpectralData {
  int r = 1;
  int n_max = 0;
  std::vector<EigenRecord> records;  // lambda strictly increasing

  /// Data of the unperturbed operator: (pi*n, I) for |n| <= n_max.
  static SpectralData free_data(int r, int n_max);

  void validate(double psd_tol = 1e-8) const;
  /// Index into records of lambda_0 (the largest non-positive eigenvalue).
  int index_of_lambda0() const;
};

/// Window index n with lambda in (pi*n - pi/2, pi*n + pi/2] (right-closed).
int window_index(double lambda);

struct WindowStats {
  int n = 0;
  int count = 0;
  Mat beta;           // I - sum of alpha over the window
  double dev2 = 0.0;  // sum of (lambda_j - pi*n)^2 over the window
};

/// One entry per window |n| <= n_max; empty windows get count 0, beta = I.
std::vector<WindowStats> window_stats(const SpectralData& data);

struct A1Bounds {
  double sup_count = 2.0;
  double sum_dev2 = 10.0;
  double sum_beta2 = 0.75;
  static A1Bounds defaults(int r) { return A1Bounds{static_cast<double>(r) + 1.0, 10.0, 0.75}; }
};

struct A1Report {
  bool pass = false;
  int sup_count = 0;
  double sum_dev2 = 0.0;
  double sum_beta2 = 0.0;  // Frobenius norms squared
};

/// Finite-truncation statistics behind condition (A1), tested against
/// user-supplied bounds (finiteness itself is not machine-checkable).
A1Report check_a1(const SpectralData& data, const A1Bounds& bounds);

struct A2Report {
  bool pass = false;
  int n0 = -1;                       // smallest N0 with equality for all N in [N0, n_max]
  std::vector<long> per_n_counts;    // multiplicity-weighted count per truncation N = 0..n_max
};

/// Rank-counting condition (A2): sum of rank(alpha_j) over |n| <= N equals
/// (2N+1) r for all N from some N0 on.
A2Report check_a2(const SpectralData& data);

/// Atoms and weights of the discrete measure mu: (lambda_j, alpha_j).
std::vector<std::pair<double, Mat>> measure_nodes(const SpectralData& data);

}  // namespace dirac
