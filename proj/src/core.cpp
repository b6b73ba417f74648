#include "dirac/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace dirac {

Potential Potential::zero(int r, const UniformGrid& grid) {
  Potential q;
  q.r = r;
  q.grid = grid;
  q.samples.assign(grid.node_count(), Mat::Zero(r, r));
  return q;
}

Potential Potential::constant(const Mat& value, const UniformGrid& grid) {
  if (value.rows() != value.cols())
    throw Error(Errc::InvalidArgument, "Potential::constant: value must be square");
  Potential q;
  q.r = static_cast<int>(value.rows());
  q.grid = grid;
  q.samples.assign(grid.node_count(), value);
  return q;
}

bool Potential::trivial(double tol) const {
  for (const Mat& s : samples)
    if (s.norm() > tol) return false;
  return true;
}

Mat Potential::value_at(double x) const {
  const double h = grid.step();
  double u = (x - grid.a) / h;
  if (u <= 0.0) return samples.front();
  if (u >= grid.n) return samples.back();
  const int k = static_cast<int>(u);
  const double w = u - k;
  if (w == 0.0) return samples[k];
  return (1.0 - w) * samples[k] + w * samples[k + 1];
}

void Potential::validate() const {
  if (r < 1) throw Error(Errc::InvalidArgument, "Potential: r must be positive");
  if (static_cast<int>(samples.size()) != grid.node_count())
    throw Error(Errc::GridMismatch, "Potential: sample count does not match grid");
  for (const Mat& s : samples) {
    if (s.rows() != r || s.cols() != r)
      throw Error(Errc::InvalidArgument, "Potential: sample is not r x r");
    if (!s.allFinite())
      throw Error(Errc::InvalidArgument, "Potential: sample has non-finite entries");
  }
}

TriangularKernel TriangularKernel::zero(int block_size, const UniformGrid& grid) {
  TriangularKernel K;
  K.block_size = block_size;
  K.grid = grid;
  K.rows.resize(grid.node_count());
  for (int i = 0; i < grid.node_count(); ++i)
    K.rows[i].assign(i + 1, Mat::Zero(block_size, block_size));
  return K;
}

bool hermitian_part_check(const Mat& m, double tol) {
  if (m.rows() != m.cols())
    throw Error(Errc::InvalidArgument, "hermitian_part_check: matrix must be square");
  return (m - m.adjoint()).norm() <= tol;
}

bool psd_check(const Mat& m, double tol) {
  if (m.rows() != m.cols())
    throw Error(Errc::InvalidArgument, "psd_check: matrix must be square");
  if (!hermitian_part_check(m, tol)) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

std::vector<Mat> kernel_apply(const TriangularKernel& K, const std::vector<Mat>& f) {
  if (static_cast<int>(f.size()) != K.grid.node_count())
    throw Error(Errc::GridMismatch, "kernel_apply: grids do not match");
  const double h = K.grid.step();
  std::vector<Mat> out(f.size());
  for (int i = 0; i < K.grid.node_count(); ++i) {
    Mat acc = Mat::Zero(K.block_size, f[0].cols());
    for (int k = 0; k <= i; ++k)
      acc.noalias() += trapezoid_weight(k, i, h) * (K.rows[i][k] * f[k]);
    out[i] = std::move(acc);
  }
  return out;
}

double smallest_singular_value(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues().minCoeff();
}

int numerical_rank(const Mat& m, double rel_tol) {
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cut = rel_tol * sv.maxCoeff();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= cut && sv(i) > 0.0) ++rank;
  return rank;
}

}  // namespace dirac
