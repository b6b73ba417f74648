#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;

/// Failure modes the solvers can report.  Every throwing path in the library
/// uses Error with one of these codes so callers can map them to exit codes.
enum class Errc {
  InvalidArgument,
  GridMismatch,
  NearPole,
  ContourTooLarge,
  NotConverged,
  MissedRoot,
  SingularRow,
  EmptyData,
  ValidationFailed,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Equispaced nodes a + k*h, k = 0..n, with h = (b-a)/n.
struct UniformGrid {
  double a = 0.0;
  double b = 1.0;
  int n = 2;  // number of intervals, >= 2

  UniformGrid() = default;
  UniformGrid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    if (!(b > a) || n < 2)
      throw Error(Errc::InvalidArgument, "UniformGrid: need b > a and n >= 2");
  }

  double step() const { return (b - a) / n; }
  double node(int k) const { return a + k * step(); }
  int node_count() const { return n + 1; }
  bool symmetric() const { return a == -b; }

  bool operator==(const UniformGrid& o) const { return a == o.a && b == o.b && n == o.n; }
};

/// Trapezoid weight of node k on a grid with n intervals of width h.
inline double trapezoid_weight(int k, int n, double h) {
  if (n == 0) return 0.0;
  return (k == 0 || k == n) ? 0.5 * h : h;
}

/// Grid-sampled r x r matrix potential on [0,1].
struct Potential {
  int r = 1;
  UniformGrid grid{0.0, 1.0, 2};
  std::vector<Mat> samples;  // grid.n + 1 entries, each r x r

  static Potential zero(int r, const UniformGrid& grid);
  static Potential constant(const Mat& value, const UniformGrid& grid);

  bool trivial(double tol = 0.0) const;
  /// Linear interpolation between nodes; x clamped to [a,b].
  Mat value_at(double x) const;
  void validate() const;
};

/// Kernel sampled at node pairs (x_i, t_k) with t_k <= x_i; zero on t > x by
/// construction (the lower triangle is all that is ever stored).
struct TriangularKernel {
  int block_size = 1;
  UniformGrid grid{0.0, 1.0, 2};
  std::vector<std::vector<Mat>> rows;  // rows[i] holds i+1 blocks

  static TriangularKernel zero(int block_size, const UniformGrid& grid);

  /// Sample at (x_i, t_k); identically zero for k > i.
  Mat value(int i, int k) const {
    if (k > i) return Mat::Zero(block_size, block_size);
    return rows[i][k];
  }
};

/// True iff ||m - m*||_F <= tol.
bool hermitian_part_check(const Mat& m, double tol);

/// True iff m is Hermitian within tol and its smallest eigenvalue is >= -tol.
bool psd_check(const Mat& m, double tol);

/// (K f)(x_i) = composite trapezoid over [0, x_i] of K(x_i, s) f(s).
/// f holds one block per grid node; blocks must be multipliable by K's blocks.
std::vector<Mat> kernel_apply(const TriangularKernel& K, const std::vector<Mat>& f);

inline Mat hermitized(const Mat& m) { return 0.5 * (m + m.adjoint()); }

double smallest_singular_value(const Mat& m);

/// Numerical rank: count of singular values >= rel_tol * sigma_max.
int numerical_rank(const Mat& m, double rel_tol = 1e-6);

}  // namespace dirac
