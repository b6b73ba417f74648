#include "dirac/krein.hpp"

#include "dirac/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>

namespace dirac {

namespace {

constexpr double kSolveTol = 1e-8;       // relative residual per row
constexpr double kGrowthLimit = 1e6;     // fast-path stability monitor

// H^T(j h) for j in [-n, n]; both solvers read H through this table so the
// fast path reproduces the dense systems exactly.
struct GeneratorTable {
  int n = 0;
  std::vector<Mat> g;
  const Mat& at(int j) const { return g[j + n]; }
};

GeneratorTable make_generator_table(const Accelerant& H, const UniformGrid& grid01) {
  GeneratorTable tab;
  tab.n = grid01.n;
  tab.g.resize(2 * grid01.n + 1);
  const double h = grid01.step();
  for (int j = -grid01.n; j <= grid01.n; ++j) tab.g[j + grid01.n] = H.value_at(j * h).transpose();
  return tab;
}

void require_accelerant(const Accelerant& H) {
  static constexpr std::array<double, 4> coarse = {0.25, 0.5, 0.75, 1.0};
  const AccelerantTestReport rep = accelerant_test(H, coarse, 64);
  if (!rep.pass)
    throw Error(Errc::InvalidArgument,
                "krein_solve: H fails the accelerant test on a coarse a-sample");
}

// Relative residual of row i of the (transposed) Krein system.
double row_residual(const GeneratorTable& tab, double h, int i, const std::vector<Mat>& q) {
  if (i == 0) return 0.0;
  double num2 = 0.0, den2 = 0.0;
  for (int k = 0; k <= i; ++k) {
    Mat res = q[k] + tab.at(i - k);
    for (int s = 0; s <= i; ++s)
      res.noalias() += trapezoid_weight(s, i, h) * (tab.at(s - k) * q[s]);
    num2 += res.squaredNorm();
    den2 += tab.at(i - k).squaredNorm();
  }
  return std::sqrt(num2) / (1.0 + std::sqrt(den2));
}

KreinSolution finalize_rows(const UniformGrid& grid01, int r, const GeneratorTable& tab,
                            std::vector<std::vector<Mat>>&& qrows) {
  KreinSolution sol;
  sol.R.block_size = r;
  sol.R.grid = grid01;
  sol.R.rows.resize(grid01.node_count());
  sol.row_residuals.assign(grid01.node_count(), 0.0);
  const double h = grid01.step();
  parallel_for(0, grid01.node_count(), [&](int i) {
    sol.row_residuals[i] = row_residual(tab, h, i, qrows[i]);
    sol.R.rows[i].resize(i + 1);
    for (int k = 0; k <= i; ++k) sol.R.rows[i][k] = qrows[i][k].transpose();
  });
  sol.max_residual = *std::max_element(sol.row_residuals.begin(), sol.row_residuals.end());
  return sol;
}

}  // namespace

KreinSolution krein_solve_dense(const Accelerant& H, const UniformGrid& grid01) {
  require_accelerant(H);
  const int r = H.r;
  const int n = grid01.n;
  const double h = grid01.step();
  const GeneratorTable tab = make_generator_table(H, grid01);

  std::vector<std::vector<Mat>> qrows(n + 1);
  qrows[0] = {Mat(-tab.at(0))};  // row 0 has zero quadrature weight: R(0,0) = -H(0)

  parallel_for(1, n + 1, [&](int i) {
    const int dim = (i + 1) * r;
    Mat big = Mat::Identity(dim, dim);
    Mat rhs(dim, r);
    for (int k = 0; k <= i; ++k) {
      rhs.middleRows(k * r, r) = -tab.at(i - k);
      for (int s = 0; s <= i; ++s)
        big.block(k * r, s * r, r, r) += trapezoid_weight(s, i, h) * tab.at(s - k);
    }
    Eigen::PartialPivLU<Mat> lu(big);
    const Mat q = lu.solve(rhs);
    if (!q.allFinite())
      throw Error(Errc::SingularRow, "krein_solve_dense: singular row system at x = " +
                                         std::to_string(grid01.node(i)));
    qrows[i].resize(i + 1);
    for (int k = 0; k <= i; ++k) qrows[i][k] = q.middleRows(k * r, r);
  });

  KreinSolution sol = finalize_rows(grid01, r, tab, std::move(qrows));
  for (int i = 0; i <= n; ++i)
    if (sol.row_residuals[i] > kSolveTol)
      throw Error(Errc::SingularRow, "krein_solve_dense: row residual " +
                                         std::to_string(sol.row_residuals[i]) + " at x = " +
                                         std::to_string(grid01.node(i)));
  return sol;
}

KreinSolution krein_solve_fast(const Accelerant& H, const UniformGrid& grid01) {
  require_accelerant(H);
  const int r = H.r;
  const int n = grid01.n;
  const double h = grid01.step();
  const GeneratorTable tab = make_generator_table(H, grid01);
  const Mat id = Mat::Identity(r, r);

  // Block Levinson state for X_m = I + h T, T[k][s] = G_{s-k}:
  //   A: X_m A = (I at block 0),    D: X_m D = (I at block m),
  //   Y: X_m Y = B_m with B_m[k] = -G_{m-k}   (the Krein right-hand side),
  //   Z: X_m Z = C_m with C_m[k] = -(h/2) G_{-k} (endpoint-weight column).
  std::vector<Mat> A(n + 1), D(n + 1), Y(n + 1), Z(n + 1), An(n + 1), Dn(n + 1);
  std::vector<std::vector<Mat>> qrows(n + 1);
  qrows[0] = {Mat(-tab.at(0))};

  bool unstable = false;
  {
    const Mat t0 = id + h * tab.at(0);
    Eigen::PartialPivLU<Mat> lu(t0);
    A[0] = lu.solve(id);
    D[0] = A[0];
    Y[0] = lu.solve(Mat(-tab.at(0)));
    Z[0] = lu.solve(Mat(-0.5 * h * tab.at(0)));
  }

  auto woodbury_row = [&](int m) {
    // (X + C0 e0^T + Ci ei^T) Q = B with Ci = (h/2) B, so X^{-1}Ci = (h/2) Y.
    Mat s2 = Mat::Identity(2 * r, 2 * r);
    s2.topLeftCorner(r, r) += Z[0];
    s2.topRightCorner(r, r) += 0.5 * h * Y[0];
    s2.bottomLeftCorner(r, r) += Z[m];
    s2.bottomRightCorner(r, r) += 0.5 * h * Y[m];
    Mat rhs2(2 * r, r);
    rhs2.topRows(r) = Y[0];
    rhs2.bottomRows(r) = Y[m];
    const Mat w = s2.partialPivLu().solve(rhs2);
    const auto w0 = w.topRows(r);
    const auto w1 = w.bottomRows(r);
    qrows[m].resize(m + 1);
    for (int k = 0; k <= m; ++k) qrows[m][k] = Y[k] - Z[k] * w0 - 0.5 * h * (Y[k] * w1);
  };

  for (int m = 1; m <= n && !unstable; ++m) {
    // Defects of the shifted embeddings.
    Mat eps_a = Mat::Zero(r, r), eps_d = Mat::Zero(r, r);
    Mat eps_y = Mat::Zero(r, r), eps_z = Mat::Zero(r, r);
    for (int s = 0; s < m; ++s) {
      eps_a.noalias() += h * (tab.at(s - m) * A[s]);
      eps_z.noalias() += h * (tab.at(s - m) * Z[s]);
      eps_d.noalias() += h * (tab.at(s + 1) * D[s]);
      eps_y.noalias() += h * (tab.at(s + 1) * Y[s]);
    }
    const Mat denom_a = (id - eps_d * eps_a).partialPivLu().solve(id);
    const Mat denom_d = (id - eps_a * eps_d).partialPivLu().solve(id);
    if (!denom_a.allFinite() || denom_a.norm() > kGrowthLimit ||
        denom_d.norm() > kGrowthLimit) {
      unstable = true;
      break;
    }
    for (int k = 0; k <= m; ++k) {
      const Mat a_old = k < m ? A[k] : Mat::Zero(r, r);
      const Mat d_old = k >= 1 ? D[k - 1] : Mat::Zero(r, r);
      An[k] = (a_old - d_old * eps_a) * denom_a;
      Dn[k] = (d_old - a_old * eps_d) * denom_d;
    }
    std::swap(A, An);
    std::swap(D, Dn);

    const Mat delta_y = -tab.at(m) - eps_y;
    for (int k = m; k >= 1; --k) Y[k] = Y[k - 1] + A[k] * delta_y;
    Y[0] = A[0] * delta_y;

    const Mat delta_z = -0.5 * h * tab.at(-m) - eps_z;
    Z[m] = D[m] * delta_z;
    for (int k = 0; k < m; ++k) Z[k].noalias() += D[k] * delta_z;

    double growth = std::max(A[m].norm(), D[0].norm());
    if (!std::isfinite(growth) || growth > kGrowthLimit) {
      unstable = true;
      break;
    }
    woodbury_row(m);
  }

  if (!unstable) {
    KreinSolution sol = finalize_rows(grid01, r, tab, std::move(qrows));
    if (sol.max_residual <= kSolveTol) return sol;
    unstable = true;
  }
  // FallbackToDense: the recursion lost stability; delegate.
  KreinSolution sol = krein_solve_dense(H, grid01);
  sol.used_fallback = true;
  return sol;
}

Potential theta(const KreinSolution& sol) {
  Potential q;
  q.r = sol.R.block_size;
  q.grid = sol.R.grid;
  q.samples.resize(sol.R.grid.node_count());
  for (int i = 0; i < sol.R.grid.node_count(); ++i)
    q.samples[i] = cxd(0.0, 1.0) * sol.R.rows[i][0];
  return q;
}

GlmSolution glm_solve(const BlockKernelF& F, const UniformGrid& grid01) {
  if (!(F.grid == grid01)) throw Error(Errc::GridMismatch, "glm_solve: F grid mismatch");
  const int b = 2 * F.r;
  const int n = grid01.n;
  const double h = grid01.step();

  GlmSolution sol;
  sol.L.block_size = b;
  sol.L.grid = grid01;
  sol.L.rows.resize(n + 1);
  sol.row_residuals.assign(n + 1, 0.0);
  sol.L.rows[0] = {Mat(-F.at(0, 0))};

  parallel_for(1, n + 1, [&](int i) {
    const int dim = (i + 1) * b;
    Mat big = Mat::Identity(dim, dim);
    Mat rhs(dim, b);
    for (int k = 0; k <= i; ++k) {
      rhs.middleRows(k * b, b) = -F.at(i, k).transpose();
      for (int s = 0; s <= i; ++s)
        big.block(k * b, s * b, b, b) += trapezoid_weight(s, i, h) * F.at(s, k).transpose();
    }
    const Mat q = big.partialPivLu().solve(rhs);
    if (!q.allFinite())
      throw Error(Errc::SingularRow, "glm_solve: singular row system at x = " +
                                         std::to_string(grid01.node(i)));
    sol.L.rows[i].resize(i + 1);
    for (int k = 0; k <= i; ++k) sol.L.rows[i][k] = q.middleRows(k * b, b).transpose();
  });

  parallel_for(0, n + 1, [&](int i) {
    double num2 = 0.0, den2 = 0.0;
    for (int k = 0; k <= i; ++k) {
      Mat res = sol.L.rows[i][k] + F.at(i, k);
      for (int s = 0; s <= i; ++s)
        res.noalias() += trapezoid_weight(s, i, h) * (sol.L.rows[i][s] * F.at(s, k));
      num2 += res.squaredNorm();
      den2 += F.at(i, k).squaredNorm();
    }
    sol.row_residuals[i] = std::sqrt(num2) / (1.0 + std::sqrt(den2));
  });
  sol.max_residual = *std::max_element(sol.row_residuals.begin(), sol.row_residuals.end());
  for (int i = 0; i <= n; ++i)
    if (sol.row_residuals[i] > kSolveTol)
      throw Error(Errc::SingularRow, "glm_solve: row residual " +
                                         std::to_string(sol.row_residuals[i]) + " at x = " +
                                         std::to_string(grid01.node(i)));
  return sol;
}

GlmSolution glm_from_krein(const Accelerant& H, const UniformGrid& grid01, bool fast) {
  const UniformGrid fine(grid01.a, grid01.b, 2 * grid01.n);
  const Accelerant Hs = flip_adjoint(H);
  const KreinSolution rh = fast ? krein_solve_fast(H, fine) : krein_solve_dense(H, fine);
  const KreinSolution rs = fast ? krein_solve_fast(Hs, fine) : krein_solve_dense(Hs, fine);

  const int r = H.r;
  GlmSolution sol;
  sol.L.block_size = 2 * r;
  sol.L.grid = grid01;
  sol.L.rows.resize(grid01.node_count());
  for (int i = 0; i <= grid01.n; ++i) {
    sol.L.rows[i].resize(i + 1);
    for (int k = 0; k <= i; ++k) {
      // (x_i + t_k)/2 and (x_i - t_k)/2 are nodes i+k and i-k of the fine grid.
      Mat block = Mat::Zero(2 * r, 2 * r);
      block.topLeftCorner(r, r) = 0.5 * rh.R.rows[2 * i][i + k];
      block.topRightCorner(r, r) = 0.5 * rh.R.rows[2 * i][i - k];
      block.bottomLeftCorner(r, r) = 0.5 * rs.R.rows[2 * i][i - k];
      block.bottomRightCorner(r, r) = 0.5 * rs.R.rows[2 * i][i + k];
      sol.L.rows[i][k] = std::move(block);
    }
  }

  const BlockKernelF F = assemble_f(H, grid01);
  const double h = grid01.step();
  sol.row_residuals.assign(grid01.node_count(), 0.0);
  parallel_for(0, grid01.node_count(), [&](int i) {
    double num2 = 0.0, den2 = 0.0;
    for (int k = 0; k <= i; ++k) {
      Mat res = sol.L.rows[i][k] + F.at(i, k);
      for (int s = 0; s <= i; ++s)
        res.noalias() += trapezoid_weight(s, i, h) * (sol.L.rows[i][s] * F.at(s, k));
      num2 += res.squaredNorm();
      den2 += F.at(i, k).squaredNorm();
    }
    sol.row_residuals[i] = std::sqrt(num2) / (1.0 + std::sqrt(den2));
  });
  sol.max_residual = *std::max_element(sol.row_residuals.begin(), sol.row_residuals.end());
  return sol;
}

double glm_residual(const TriangularKernel& L, const BlockKernelF& F) {
  const double h = L.grid.step();
  double worst = 0.0;
  for (int i = 0; i < L.grid.node_count(); ++i) {
    for (int k = 0; k <= i; ++k) {
      Mat res = L.rows[i][k] + F.at(i, k);
      for (int s = 0; s <= i; ++s)
        res.noalias() += trapezoid_weight(s, i, h) * (L.rows[i][s] * F.at(s, k));
      worst = std::max(worst, res.norm());
    }
  }
  return worst;
}

double krein_residual(const TriangularKernel& R, const Accelerant& H) {
  const double h = R.grid.step();
  double worst = 0.0;
  for (int i = 0; i < R.grid.node_count(); ++i) {
    for (int k = 0; k <= i; ++k) {
      Mat res = R.rows[i][k] + H.value_at((i - k) * h);
      for (int s = 0; s <= i; ++s)
        res.noalias() += trapezoid_weight(s, i, h) * (R.rows[i][s] * H.value_at((s - k) * h));
      worst = std::max(worst, res.norm());
    }
  }
  return worst;
}

FactorizationReport factorization_check(const GlmSolution& L, const BlockKernelF& F) {
  if (!(L.L.grid == F.grid)) throw Error(Errc::GridMismatch, "factorization_check: grid mismatch");
  const int b = L.L.block_size;
  const int n = F.grid.n;
  const int m = F.grid.node_count();
  const double h = F.grid.step();
  const int dim = m * b;

  // Weighted similarity: Lw = W^{1/2} M_L W^{-1/2}, Fw = W^{1/2} F W^{1/2},
  // where M_L carries per-row trapezoid weights (the kernel is cut at t = x).
  Mat lw = Mat::Zero(dim, dim);
  Mat fw = Mat::Zero(dim, dim);
  std::vector<double> sqw(m);
  for (int i = 0; i < m; ++i) sqw[i] = std::sqrt(trapezoid_weight(i, n, h));
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k <= i; ++k)
      lw.block(i * b, k * b, b, b) =
          (sqw[i] * trapezoid_weight(k, i, h) / sqw[k]) * L.L.rows[i][k];
    for (int k = 0; k < m; ++k) fw.block(i * b, k * b, b, b) = (sqw[i] * sqw[k]) * F.at(i, k);
  }
  const Mat il = Mat::Identity(dim, dim) + lw;
  const Mat prod = il * (Mat::Identity(dim, dim) + fw) * il.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(prod - Mat::Identity(dim, dim)),
                                        Eigen::EigenvaluesOnly);
  FactorizationReport report;
  report.residual = es.eigenvalues().cwiseAbs().maxCoeff();
  return report;
}

}  // namespace dirac
