#pragma once

#include "dirac/core.hpp"
#include "dirac/spectra.hpp"

#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace dirac {

/// theta = (1/i) diag(I, -I), the leading coefficient of the system.
Mat theta_matrix(int r);

/// Boundary matrix a = (1/sqrt(2)) (I, -I), r x 2r.  Kept as a named
/// constant so the general-boundary-condition extension stays visible.
Mat boundary_a(int r);

struct CharFns {
  Mat s;  // a u(1) theta a*
  Mat c;  // a u(1) a*
};

struct ScanOptions {
  int samples_per_window = 64;
  int max_samples_per_window = 1024;
  double detect_tol = 1e-6;        // root accepted if sigma_min < detect_tol * (1 + |lambda|)
  double refine_width = 1e-11;     // golden-section bracket width, scaled by (1 + |lambda|)
  double candidate_cut = 0.3;      // sampled local minima above this are not refined
  int contour_points = 32;
  double contour_radius_cap = 0.1;
  double contour_agree_tol = 1e-6; // radius rho vs rho/2 agreement
  double pole_tol = 1e-10;         // weyl_m: sigma_min(s) < pole_tol * (1 + |lambda|) is a pole
};

/// Evaluates the fundamental solution u_q(x, lambda) of the Cauchy problem
/// theta u' + Q u = lambda u, u(0) = I, and everything derived from it.
///
/// Stepping is exponential-midpoint: u <- exp(h A(mid)) u with
/// A = i diag(I,-I) (lambda I - Q).  A^2 is block diagonal with Hermitian
/// blocks shifted by -lambda^2, so each step exponential is evaluated
/// exactly through the cached eigenbases of q q* and q* q.  For real lambda
/// every step is theta-unitary, which preserves u* theta u = theta to
/// machine precision regardless of step size.
class CharacteristicEvaluator {
 public:
  explicit CharacteristicEvaluator(Potential q, int ode_steps = 2048);

  const Potential& potential() const { return q_; }
  int ode_steps() const { return ode_steps_; }
  int r() const { return q_.r; }

  /// u_q(x, lambda), 2r x 2r.  Throws for x outside [0,1].
  Mat propagate(cxd lambda, double x) const;

  /// Cached u_q(1, lambda).
  Mat fundamental_at_one(cxd lambda) const;

  CharFns char_functions(cxd lambda) const;

  /// -s(lambda)^{-1} c(lambda); throws NearPole close to an eigenvalue.
  Mat weyl_m(cxd lambda, double pole_tol = 1e-10) const;

  double sigma_min_s(cxd lambda) const;

 private:
  struct StepData {
    Mat qmid;                // r x r potential at the step midpoint
    Mat u_left, u_right;     // eigenbases of q q* and q* q
    Eigen::VectorXd d_left, d_right;
  };

  StepData make_step(double mid) const;
  void apply_step(const StepData& sd, cxd lambda, double h, Mat& u, Mat& scratch) const;

  Potential q_;
  int ode_steps_;
  std::vector<StepData> steps_;
  bool all_zero_ = false;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<double, double>, Mat> cache_;
};

struct LocatedRoot {
  double lambda = 0.0;
  int deficiency = 1;      // rank deficiency of s(lambda)
  double sigma_min = 0.0;
};

/// All real roots of det s(lambda) in the union of windows |n| <= n_max,
/// found by scanning sigma_min(s) per window and refining each local
/// minimum.  Scan density doubles until the multiplicity-weighted count
/// matches (2 n_max + 1) r; otherwise MissedRoot is thrown.
std::vector<LocatedRoot> find_eigenvalues(const CharacteristicEvaluator& ev, int n_max,
                                          const ScanOptions& opts = {});

/// alpha_j = -(1/2 pi i) contour integral of m over |lambda - lambda_j| = rho,
/// by the trapezoid rule on the circle; cross-checked at rho/2.
/// neighbors: other eigenvalues, used for the ContourTooLarge guard.
Mat norming_matrix(const CharacteristicEvaluator& ev, double lambda_j, double contour_radius,
                   int contour_points, std::span<const double> neighbors = {},
                   double agree_tol = 1e-6);

SpectralData spectral_data(const CharacteristicEvaluator& ev, int n_max,
                           const ScanOptions& opts = {});

}  // namespace dirac
