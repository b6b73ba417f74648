// Test-only closed forms and generators, independent of the library's
// propagation / solver paths.
#pragma once

#include "dirac/core.hpp"
#include "dirac/spectra.hpp"
#include "dirac/accelerant.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace oracles {

using dirac::cxd;
using dirac::Mat;

// sin(w)/w, entire.
inline cxd sinc(cxd w) {
  if (std::norm(w) < 1e-16) return 1.0 - w * w / 6.0;
  return std::sin(w) / w;
}

// Scalar constant potential q(x) = c on [0,1].  From the constant-coefficient
// fundamental solution exp(x A), A = i [[l, -c],[conj(c), -l]]:
//   s(l) = (l - Re c) sinc(w),  c(l) = cos(w) - Im c sinc(w),  w = sqrt(l^2 - |c|^2).
struct ConstantPotential {
  cxd c;

  cxd omega(cxd lambda) const { return std::sqrt(lambda * lambda - std::norm(c)); }
  cxd s(cxd lambda) const { return (lambda - c.real()) * sinc(omega(lambda)); }
  cxd cfun(cxd lambda) const { return std::cos(omega(lambda)) - c.imag() * sinc(omega(lambda)); }
  cxd m(cxd lambda) const { return -cfun(lambda) / s(lambda); }

  // Eigenvalues in the windows |n| <= n_max: lambda = Re c (from the linear
  // factor) and +-sqrt(pi^2 k^2 + |c|^2) (from sinc), sorted.
  std::vector<double> eigenvalues(int n_max) const {
    std::vector<double> ev{c.real()};
    for (int k = 1; k <= n_max; ++k) {
      const double root = std::sqrt(dirac::kPi * dirac::kPi * k * k + std::norm(c));
      ev.push_back(root);
      ev.push_back(-root);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
  }

  // alpha_j = -res m at lambda_j (simple poles for c != 0 real).
  double alpha(double lambda_j) const {
    const double k2 = lambda_j * lambda_j - std::norm(c);
    if (k2 < 1e-9) {
      // the root of the linear factor: alpha = cfun / sinc at w0 = sqrt(-|Im c|^2)
      const cxd w0 = omega(lambda_j);
      return (std::cos(w0) - c.imag() * sinc(w0)).real() / sinc(w0).real();
    }
    return k2 / (lambda_j * (lambda_j - c.real()));
  }
};

// Deterministic uniform in [-a, a].
struct Uniform {
  std::mt19937_64 gen;
  explicit Uniform(uint64_t seed) : gen(seed) {}
  double operator()(double a = 1.0) {
    return a * (2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0);
  }
};

// Smooth r x r potential vanishing at both endpoints (trig polynomial).
inline dirac::Potential random_smooth_potential(int r, int grid_n, int modes, double amplitude,
                                                uint64_t seed) {
  Uniform rng(seed);
  std::vector<Mat> coef(modes);
  for (int m = 0; m < modes; ++m) {
    coef[m] = Mat(r, r);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k)
        coef[m](i, k) = amplitude * std::pow(0.6, m) * cxd(rng(), rng());
  }
  dirac::Potential q = dirac::Potential::zero(r, dirac::UniformGrid(0.0, 1.0, grid_n));
  for (int node = 0; node <= grid_n; ++node) {
    const double x = q.grid.node(node);
    Mat v = Mat::Zero(r, r);
    for (int m = 0; m < modes; ++m) v += std::sin(dirac::kPi * (m + 1) * x) * coef[m];
    q.samples[node] = v;
  }
  return q;
}

// Small symmetric accelerant: H(x) = G(x) for x >= 0 and G(-x)* for x < 0,
// with G a random trig polynomial.  Amplitude below ~0.4 keeps I + conv(H)
// positive, so H is a valid accelerant.
inline dirac::Accelerant random_valid_accelerant(int r, int grid_n, double amplitude,
                                                 uint64_t seed) {
  Uniform rng(seed);
  const int modes = 4;
  std::vector<Mat> coef_cos(modes), coef_sin(modes);
  for (int m = 0; m < modes; ++m) {
    coef_cos[m] = Mat(r, r);
    coef_sin[m] = Mat(r, r);
    for (int i = 0; i < r; ++i)
      for (int k = 0; k < r; ++k) {
        coef_cos[m](i, k) = amplitude * std::pow(0.7, m) * cxd(rng(), rng());
        coef_sin[m](i, k) = amplitude * std::pow(0.7, m) * cxd(rng(), rng());
      }
  }
  auto g = [&](double x) {
    Mat v = Mat::Zero(r, r);
    for (int m = 0; m < modes; ++m)
      v += std::cos(dirac::kPi * m * x) * coef_cos[m] + std::sin(dirac::kPi * (m + 1) * x) * coef_sin[m];
    return v;
  };
  dirac::Accelerant H = dirac::Accelerant::zero(r, grid_n);
  for (int node = 0; node <= grid_n; ++node) {
    const double x = H.grid.node(node);
    if (x > 0.0)
      H.samples[node] = g(x);
    else if (x < 0.0)
      H.samples[node] = g(-x).adjoint();
    else
      H.samples[node] = dirac::hermitized(g(0.0));
  }
  return H;
}

}  // namespace oracles
