#include "dirac/direct.hpp"

#include "dirac/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

namespace dirac {

namespace {

// cosh(sqrt(z)) and sinh(sqrt(z))/sqrt(z); both entire in z.
inline void cosh_sinch(cxd z, cxd& c, cxd& s) {
  if (std::norm(z) < 1e-16) {
    c = 1.0 + z * (0.5 + z * (1.0 / 24.0 + z / 720.0));
    s = 1.0 + z * (1.0 / 6.0 + z * (1.0 / 120.0 + z / 5040.0));
    return;
  }
  const cxd w = std::sqrt(z);
  c = std::cosh(w);
  s = std::sinh(w) / w;
}

}  // namespace

Mat theta_matrix(int r) {
  Mat theta = Mat::Zero(2 * r, 2 * r);
  theta.topLeftCorner(r, r) = cxd(0.0, -1.0) * Mat::Identity(r, r);
  theta.bottomRightCorner(r, r) = cxd(0.0, 1.0) * Mat::Identity(r, r);
  return theta;
}

Mat boundary_a(int r) {
  Mat a = Mat::Zero(r, 2 * r);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  a.leftCols(r) = inv_sqrt2 * Mat::Identity(r, r);
  a.rightCols(r) = -inv_sqrt2 * Mat::Identity(r, r);
  return a;
}

CharacteristicEvaluator::CharacteristicEvaluator(Potential q, int ode_steps)
    : q_(std::move(q)), ode_steps_(ode_steps) {
  q_.validate();
  if (ode_steps_ < 1) throw Error(Errc::InvalidArgument, "CharacteristicEvaluator: ode_steps < 1");
  all_zero_ = q_.trivial(0.0);
  const double h = 1.0 / ode_steps_;
  steps_.reserve(ode_steps_);
  for (int k = 0; k < ode_steps_; ++k) steps_.push_back(make_step((k + 0.5) * h));
}

CharacteristicEvaluator::StepData CharacteristicEvaluator::make_step(double mid) const {
  StepData sd;
  sd.qmid = q_.value_at(mid);
  if (q_.r == 1) {
    // scalar case: the eigenbasis is trivial
    sd.d_left = sd.d_right = Eigen::VectorXd::Constant(1, std::norm(sd.qmid(0, 0)));
    sd.u_left = sd.u_right = Mat::Identity(1, 1);
    return sd;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es_l(sd.qmid * sd.qmid.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es_r(sd.qmid.adjoint() * sd.qmid);
  sd.u_left = es_l.eigenvectors();
  sd.d_left = es_l.eigenvalues();
  sd.u_right = es_r.eigenvectors();
  sd.d_right = es_r.eigenvalues();
  return sd;
}

void CharacteristicEvaluator::apply_step(const StepData& sd, cxd lambda, double h, Mat& u,
                                         Mat& scratch) const {
  const int r = q_.r;
  const cxd lam2 = lambda * lambda;
  const double h2 = h * h;
  if (r == 1) {
    cxd c1, s1;
    cosh_sinch(h2 * (sd.d_left(0) - lam2), c1, s1);
    const cxd q = sd.qmid(0, 0);
    const cxd ihl = cxd(0.0, h) * lambda;
    const cxd e00 = c1 + ihl * s1;
    const cxd e01 = -cxd(0.0, h) * q * s1;
    const cxd e10 = cxd(0.0, h) * std::conj(q) * s1;
    const cxd e11 = c1 - ihl * s1;
    const cxd u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    u(0, 0) = e00 * u00 + e01 * u10;
    u(0, 1) = e00 * u01 + e01 * u11;
    u(1, 0) = e10 * u00 + e11 * u10;
    u(1, 1) = e10 * u01 + e11 * u11;
    return;
  }

  // exp(hA) = coshm(F) + hA sinchm(F), F = (hA)^2 block diagonal with
  // Hermitian blocks h^2 (q q* - lambda^2 I) and h^2 (q* q - lambda^2 I).
  Vec cl(r), sl(r), cr(r), sr(r);
  for (int i = 0; i < r; ++i) cosh_sinch(h2 * (sd.d_left(i) - lam2), cl(i), sl(i));
  for (int i = 0; i < r; ++i) cosh_sinch(h2 * (sd.d_right(i) - lam2), cr(i), sr(i));
  const Mat c_left = sd.u_left * cl.asDiagonal() * sd.u_left.adjoint();
  const Mat s_left = sd.u_left * sl.asDiagonal() * sd.u_left.adjoint();
  const Mat c_right = sd.u_right * cr.asDiagonal() * sd.u_right.adjoint();
  const Mat s_right = sd.u_right * sr.asDiagonal() * sd.u_right.adjoint();

  Mat& e = scratch;
  const cxd ih(0.0, h);
  e.topLeftCorner(r, r) = c_left + ih * lambda * s_left;
  e.topRightCorner(r, r) = -ih * (sd.qmid * s_right);
  e.bottomLeftCorner(r, r) = ih * (sd.qmid.adjoint() * s_left);
  e.bottomRightCorner(r, r) = c_right - ih * lambda * s_right;
  u = e * u;
}

Mat CharacteristicEvaluator::propagate(cxd lambda, double x) const {
  if (x < -1e-12 || x > 1.0 + 1e-12)
    throw Error(Errc::InvalidArgument, "propagate: x outside [0,1]");
  x = std::clamp(x, 0.0, 1.0);
  const int r = q_.r;
  if (all_zero_) {
    // u_0(x, lambda) = diag(e^{i lambda x} I, e^{-i lambda x} I)
    Mat u = Mat::Zero(2 * r, 2 * r);
    const cxd up = std::exp(cxd(0.0, 1.0) * lambda * x);
    const cxd dn = std::exp(cxd(0.0, -1.0) * lambda * x);
    u.topLeftCorner(r, r) = up * Mat::Identity(r, r);
    u.bottomRightCorner(r, r) = dn * Mat::Identity(r, r);
    return u;
  }
  const double h = 1.0 / ode_steps_;
  int full = std::min(static_cast<int>(std::floor(x * ode_steps_ + 1e-9)), ode_steps_);
  Mat u = Mat::Identity(2 * r, 2 * r);
  Mat scratch = Mat::Zero(2 * r, 2 * r);
  for (int k = 0; k < full; ++k) apply_step(steps_[k], lambda, h, u, scratch);
  const double rem = x - full * h;
  if (rem > 1e-12) {
    const StepData sd = make_step(full * h + 0.5 * rem);
    apply_step(sd, lambda, rem, u, scratch);
  }
  return u;
}

Mat CharacteristicEvaluator::fundamental_at_one(cxd lambda) const {
  const std::pair<double, double> key(lambda.real(), lambda.imag());
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Mat u = propagate(lambda, 1.0);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    cache_.emplace(key, u);
  }
  return u;
}

CharFns CharacteristicEvaluator::char_functions(cxd lambda) const {
  const int r = q_.r;
  const Mat u = fundamental_at_one(lambda);
  // With u = [[u11,u12],[u21,u22]]:  s = -(i/2)(u11 + u12 - u21 - u22),
  // c = (1/2)(u11 - u12 - u21 + u22).
  const auto u11 = u.topLeftCorner(r, r);
  const auto u12 = u.topRightCorner(r, r);
  const auto u21 = u.bottomLeftCorner(r, r);
  const auto u22 = u.bottomRightCorner(r, r);
  CharFns f;
  f.s = cxd(0.0, -0.5) * (u11 + u12 - u21 - u22);
  f.c = 0.5 * (u11 - u12 - u21 + u22);
  return f;
}

Mat CharacteristicEvaluator::weyl_m(cxd lambda, double pole_tol) const {
  const CharFns f = char_functions(lambda);
  Eigen::JacobiSVD<Mat> svd(f.s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  if (smin < pole_tol * (1.0 + std::abs(lambda)))
    throw Error(Errc::NearPole, "weyl_m: s(lambda) numerically singular near lambda = " +
                                    std::to_string(lambda.real()));
  return -svd.solve(f.c);
}

double CharacteristicEvaluator::sigma_min_s(cxd lambda) const {
  const CharFns f = char_functions(lambda);
  if (q_.r == 1) return std::abs(f.s(0, 0));
  return smallest_singular_value(f.s);
}

namespace {

struct Minimum {
  double lambda;
  double sigma;
};

Minimum golden_refine(const CharacteristicEvaluator& ev, double a, double b, double tol_width) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double gc = ev.sigma_min_s(c);
  double gd = ev.sigma_min_s(d);
  Minimum best = gc < gd ? Minimum{c, gc} : Minimum{d, gd};
  int it = 0;
  while (b - a > tol_width && ++it < 120) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - gr * (b - a);
      gc = ev.sigma_min_s(c);
      if (gc < best.sigma) best = {c, gc};
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + gr * (b - a);
      gd = ev.sigma_min_s(d);
      if (gd < best.sigma) best = {d, gd};
    }
  }
  return best;
}

int rank_deficiency_of_s(const CharacteristicEvaluator& ev, double lambda, double detect_tol) {
  const CharFns f = ev.char_functions(lambda);
  Eigen::JacobiSVD<Mat> svd(f.s);
  const double cut = detect_tol * (1.0 + std::abs(lambda));
  int deficient = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) < cut) ++deficient;
  return deficient;
}

}  // namespace

std::vector<LocatedRoot> find_eigenvalues(const CharacteristicEvaluator& ev, int n_max,
                                          const ScanOptions& opts) {
  if (n_max < 1) throw Error(Errc::InvalidArgument, "find_eigenvalues: n_max must be >= 1");
  const int r = ev.r();
  const long expected = (2L * n_max + 1) * r;

  std::vector<LocatedRoot> roots;
  for (int samples = opts.samples_per_window; samples <= opts.max_samples_per_window;
       samples *= 2) {
    std::vector<std::vector<Minimum>> per_window(2 * n_max + 1);
    parallel_for(0, 2 * n_max + 1, [&](int wi) {
      const int n = wi - n_max;
      const double lo = kPi * n - kPi / 2.0;
      const double hi = kPi * n + kPi / 2.0;
      const double step = (hi - lo) / samples;
      std::vector<double> sigma(samples + 1);
      for (int j = 0; j <= samples; ++j) sigma[j] = ev.sigma_min_s(lo + j * step);
      std::vector<Minimum>& found = per_window[wi];
      for (int j = 0; j <= samples; ++j) {
        const bool left_ok = j == 0 || sigma[j] <= sigma[j - 1];
        const bool right_ok = j == samples || sigma[j] <= sigma[j + 1];
        if (!(left_ok && right_ok) || sigma[j] > opts.candidate_cut) continue;
        const double a = lo + std::max(0, j - 1) * step;
        const double b = lo + std::min(samples, j + 1) * step;
        Minimum m = golden_refine(ev, a, b, opts.refine_width * (1.0 + std::abs(lo + j * step)));
        if (m.sigma < opts.detect_tol * (1.0 + std::abs(m.lambda))) found.push_back(m);
      }
    });

    std::vector<Minimum> all;
    for (auto& w : per_window) all.insert(all.end(), w.begin(), w.end());
    std::sort(all.begin(), all.end(), [](const Minimum& x, const Minimum& y) {
      return x.lambda < y.lambda;
    });
    // Merge duplicates (window-edge roots are found by both adjacent scans).
    std::vector<Minimum> merged;
    for (const Minimum& m : all) {
      if (!merged.empty() && m.lambda - merged.back().lambda < 1e-8 * (1.0 + std::abs(m.lambda))) {
        if (m.sigma < merged.back().sigma) merged.back() = m;
      } else {
        merged.push_back(m);
      }
    }

    roots.clear();
    long total = 0;
    for (const Minimum& m : merged) {
      LocatedRoot root;
      root.lambda = m.lambda;
      root.sigma_min = m.sigma;
      root.deficiency = rank_deficiency_of_s(ev, m.lambda, opts.detect_tol);
      if (root.deficiency == 0) root.deficiency = 1;
      total += root.deficiency;
      roots.push_back(root);
    }
    if (total == expected) return roots;
  }
  throw Error(Errc::MissedRoot,
              "find_eigenvalues: multiplicity-weighted root count does not match (2N+1)r at "
              "maximum scan density");
}

Mat norming_matrix(const CharacteristicEvaluator& ev, double lambda_j, double contour_radius,
                   int contour_points, std::span<const double> neighbors, double agree_tol) {
  if (contour_radius <= 0.0 || contour_points < 4)
    throw Error(Errc::InvalidArgument, "norming_matrix: bad contour parameters");
  for (double nb : neighbors) {
    if (nb != lambda_j && std::abs(nb - lambda_j) < 2.0 * contour_radius)
      throw Error(Errc::ContourTooLarge, "norming_matrix: eigenvalue within twice the contour "
                                         "radius of lambda_j = " + std::to_string(lambda_j));
  }
  const int r = ev.r();
  auto integrate = [&](double rho) {
    Mat acc = Mat::Zero(r, r);
    for (int k = 0; k < contour_points; ++k) {
      const double th = 2.0 * kPi * k / contour_points;
      const cxd w = std::polar(1.0, th);
      acc += ev.weyl_m(lambda_j + rho * w) * w;
    }
    // -(1/2 pi i) *  sum m(z_k) i rho e^{i th_k} (2 pi / N)  =  -(rho/N) sum m e^{i th}
    return Mat((-rho / contour_points) * acc);
  };
  const Mat a_full = integrate(contour_radius);
  const Mat a_half = integrate(contour_radius / 2.0);
  if ((a_full - a_half).norm() > agree_tol * std::max(1.0, a_half.norm()))
    throw Error(Errc::NotConverged, "norming_matrix: contour radii rho and rho/2 disagree at "
                                    "lambda_j = " + std::to_string(lambda_j));
  // Hermitian-symmetrize and clamp small negative eigenvalues.
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(a_half));
  Eigen::VectorXd d = es.eigenvalues();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) < -1e-6 * scale)
      throw Error(Errc::NotConverged, "norming_matrix: residue is not PSD at lambda_j = " +
                                          std::to_string(lambda_j));
    d(i) = std::max(d(i), 0.0);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

SpectralData spectral_data(const CharacteristicEvaluator& ev, int n_max, const ScanOptions& opts) {
  const std::vector<LocatedRoot> roots = find_eigenvalues(ev, n_max, opts);
  SpectralData data;
  data.r = ev.r();
  data.n_max = n_max;
  data.records.resize(roots.size());
  const double edge = kPi * n_max + kPi / 2.0;
  std::vector<double> lambdas(roots.size());
  for (size_t j = 0; j < roots.size(); ++j) lambdas[j] = roots[j].lambda;
  parallel_for(0, static_cast<int>(roots.size()), [&](int j) {
    const LocatedRoot& root = roots[j];
    double gap = 2.0 * edge;
    if (j > 0) gap = std::min(gap, root.lambda - roots[j - 1].lambda);
    if (j + 1 < static_cast<int>(roots.size()))
      gap = std::min(gap, roots[j + 1].lambda - root.lambda);
    // The nearest unseen eigenvalue lies beyond the scanned union.
    gap = std::min(gap, std::max(edge - std::abs(root.lambda), 0.04));
    const double rho = std::min(opts.contour_radius_cap, gap / 4.0);
    EigenRecord rec;
    rec.lambda = root.lambda;
    rec.alpha = norming_matrix(ev, root.lambda, rho, opts.contour_points, lambdas,
                               opts.contour_agree_tol);
    rec.multiplicity = numerical_rank(rec.alpha);
    rec.residual = root.sigma_min;
    data.records[j] = std::move(rec);
  });
  return data;
}

}  // namespace dirac
