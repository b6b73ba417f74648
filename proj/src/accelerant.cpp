#include "dirac/accelerant.hpp"

#include "dirac/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>

namespace dirac {

Accelerant Accelerant::zero(int r, int grid_n) {
  Accelerant H;
  H.r = r;
  H.grid = UniformGrid(-1.0, 1.0, grid_n);
  H.samples.assign(H.grid.node_count(), Mat::Zero(r, r));
  return H;
}

Accelerant Accelerant::constant(const Mat& value, int grid_n) {
  Accelerant H = zero(static_cast<int>(value.rows()), grid_n);
  for (Mat& s : H.samples) s = value;
  return H;
}

Mat Accelerant::value_at(double x) const {
  const double h = grid.step();
  double u = (x - grid.a) / h;
  if (u <= 0.0) return samples.front();
  if (u >= grid.n) return samples.back();
  const int k = static_cast<int>(u);
  const double w = u - k;
  if (w == 0.0) return samples[k];
  return (1.0 - w) * samples[k] + w * samples[k + 1];
}

double Accelerant::symmetry_residual() const {
  if (!grid.symmetric())
    throw Error(Errc::InvalidArgument, "symmetry_residual: grid must be symmetric around 0");
  double worst = 0.0;
  for (int i = 0; i <= grid.n; ++i) {
    const Mat diff = samples[i].adjoint() - samples[grid.n - i];
    worst = std::max(worst, diff.norm());
  }
  return worst;
}

Accelerant accelerant_from_data(const SpectralData& data, const UniformGrid& grid) {
  if (data.records.empty()) throw Error(Errc::EmptyData, "accelerant_from_data: no records");
  Accelerant H;
  H.r = data.r;
  H.grid = grid;
  H.n_max = data.n_max;
  H.samples.assign(grid.node_count(), Mat::Zero(data.r, data.r));

  std::map<int, std::vector<const EigenRecord*>> by_window;
  for (const EigenRecord& rec : data.records) by_window[window_index(rec.lambda)].push_back(&rec);

  const int n_half = data.n_max / 2;
  std::vector<Mat> half(grid.node_count(), Mat::Zero(data.r, data.r));
  const Mat id = Mat::Identity(data.r, data.r);

  parallel_for(0, grid.node_count(), [&](int node) {
    const double x = grid.node(node);
    Mat full_sum = Mat::Zero(data.r, data.r);
    Mat half_sum = Mat::Zero(data.r, data.r);
    for (int n = -data.n_max; n <= data.n_max; ++n) {
      Mat term = -std::exp(cxd(0.0, 2.0 * (kPi * n) * x)) * id;
      auto it = by_window.find(n);
      if (it != by_window.end())
        for (const EigenRecord* rec : it->second)
          term += std::exp(cxd(0.0, 2.0 * rec->lambda * x)) * rec->alpha;
      full_sum += term;
      if (std::abs(n) <= n_half) half_sum += term;
    }
    H.samples[node] = full_sum;
    half[node] = half_sum;
  });

  double tail = 0.0;
  if (n_half < data.n_max)
    for (int node = 0; node < grid.node_count(); ++node)
      tail = std::max(tail, (H.samples[node] - half[node]).norm());
  H.tail = tail;
  return H;
}

Accelerant flip_adjoint(const Accelerant& H) {
  if (!H.grid.symmetric())
    throw Error(Errc::InvalidArgument, "flip_adjoint: grid must be symmetric around 0");
  Accelerant out = H;
  for (int i = 0; i <= H.grid.n; ++i) out.samples[i] = H.samples[H.grid.n - i].adjoint();
  return out;
}

BlockKernelF assemble_f(const Accelerant& H, const UniformGrid& grid01) {
  BlockKernelF F;
  F.r = H.r;
  F.grid = grid01;
  const int m = grid01.node_count();
  const int r = H.r;
  F.samples.assign(static_cast<size_t>(m) * m, Mat());
  parallel_for(0, m, [&](int i) {
    const double x = grid01.node(i);
    for (int k = 0; k < m; ++k) {
      const double t = grid01.node(k);
      const Mat h_minus = H.value_at(0.5 * (x - t));   // H((x-t)/2)
      const Mat h_plus = H.value_at(0.5 * (x + t));    // H((x+t)/2)
      const Mat hs_plus = H.value_at(-0.5 * (x + t));  // Hs((x+t)/2)
      const Mat hs_minus = H.value_at(-0.5 * (x - t)); // Hs((x-t)/2)
      Mat block = Mat::Zero(2 * r, 2 * r);
      block.topLeftCorner(r, r) = 0.5 * h_minus;
      block.topRightCorner(r, r) = 0.5 * h_plus;
      block.bottomLeftCorner(r, r) = 0.5 * hs_plus;
      block.bottomRightCorner(r, r) = 0.5 * hs_minus;
      F.at(i, k) = std::move(block);
    }
  });
  return F;
}

A3Report check_a3(const Accelerant& H, const UniformGrid& grid01, double margin) {
  const BlockKernelF F = assemble_f(H, grid01);
  const int m = grid01.node_count();
  const int b = 2 * H.r;
  const double h = grid01.step();
  Mat op = Mat::Identity(m * b, m * b);
  for (int i = 0; i < m; ++i) {
    const double wi = std::sqrt(trapezoid_weight(i, grid01.n, h));
    for (int k = 0; k < m; ++k) {
      const double wk = std::sqrt(trapezoid_weight(k, grid01.n, h));
      op.block(i * b, k * b, b, b) += (wi * wk) * F.at(i, k);
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(op), Eigen::EigenvaluesOnly);
  A3Report report;
  report.min_eigenvalue = es.eigenvalues().minCoeff();
  report.pass = report.min_eigenvalue >= margin;
  return report;
}

AccelerantTestReport accelerant_test(const Accelerant& H, std::span<const double> a_samples,
                                     int grid_n, double inv_tol) {
  AccelerantTestReport report;
  report.pass = true;
  const double h = 1.0 / grid_n;
  for (double a : a_samples) {
    if (a < 0.0 || a > 1.0)
      throw Error(Errc::InvalidArgument, "accelerant_test: a outside [0,1]");
    const int m = static_cast<int>(std::lround(a * grid_n));  // snap a to the grid
    double sigma;
    if (m == 0) {
      sigma = 1.0;
    } else {
      const int r = H.r;
      Mat op = Mat::Identity((m + 1) * r, (m + 1) * r);
      for (int j = 0; j <= m; ++j)
        for (int k = 0; k <= m; ++k)
          op.block(j * r, k * r, r, r) +=
              trapezoid_weight(k, m, h) * H.value_at((j - k) * h);
      Eigen::BDCSVD<Mat> svd(op);
      sigma = svd.singularValues().minCoeff();
    }
    report.sigma_by_a.emplace_back(a, sigma);
    if (sigma <= inv_tol) report.pass = false;
  }
  return report;
}

double wiener_hopf_min_eig(const Accelerant& H, const UniformGrid& grid01) {
  const int m = grid01.node_count();
  const int r = H.r;
  const double h = grid01.step();
  Mat op = Mat::Identity(m * r, m * r);
  for (int i = 0; i < m; ++i) {
    const double wi = std::sqrt(trapezoid_weight(i, grid01.n, h));
    for (int k = 0; k < m; ++k) {
      const double wk = std::sqrt(trapezoid_weight(k, grid01.n, h));
      op.block(i * r, k * r, r, r) +=
          (wi * wk) * H.value_at(grid01.node(i) - grid01.node(k));
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(op), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace dirac
