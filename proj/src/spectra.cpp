#include "dirac/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace dirac {

SpectralData SpectralData::free_data(int r, int n_max) {
  SpectralData data;
  data.r = r;
  data.n_max = n_max;
  data.records.reserve(2 * n_max + 1);
  for (int n = -n_max; n <= n_max; ++n) {
    EigenRecord rec;
    rec.lambda = kPi * static_cast<double>(n);
    rec.alpha = Mat::Identity(r, r);
    rec.multiplicity = r;
    rec.residual = 0.0;
    data.records.push_back(std::move(rec));
  }
  return data;
}

void SpectralData::validate(double psd_tol) const {
  if (r < 1) throw Error(Errc::InvalidArgument, "SpectralData: r must be positive");
  if (n_max < 0) throw Error(Errc::InvalidArgument, "SpectralData: n_max must be non-negative");
  for (size_t j = 0; j < records.size(); ++j) {
    const EigenRecord& rec = records[j];
    if (!std::isfinite(rec.lambda))
      throw Error(Errc::InvalidArgument, "SpectralData: non-finite eigenvalue at record " + std::to_string(j));
    if (j > 0 && !(records[j - 1].lambda < rec.lambda))
      throw Error(Errc::InvalidArgument,
                  "SpectralData: eigenvalues not strictly increasing at record " + std::to_string(j));
    if (rec.alpha.rows() != r || rec.alpha.cols() != r)
      throw Error(Errc::InvalidArgument, "SpectralData: alpha is not r x r at record " + std::to_string(j));
    if (!rec.alpha.allFinite() || !psd_check(rec.alpha, psd_tol))
      throw Error(Errc::InvalidArgument, "SpectralData: alpha not PSD at record " + std::to_string(j));
    if (rec.alpha.norm() <= psd_tol)
      throw Error(Errc::InvalidArgument, "SpectralData: alpha is zero at record " + std::to_string(j));
    const int w = window_index(rec.lambda);
    if (w < -n_max || w > n_max)
      throw Error(Errc::InvalidArgument,
                  "SpectralData: eigenvalue outside covered windows at record " + std::to_string(j));
  }
}

int SpectralData::index_of_lambda0() const {
  int idx = -1;
  for (size_t j = 0; j < records.size(); ++j)
    if (records[j].lambda <= 0.0) idx = static_cast<int>(j);
  return idx;
}

int window_index(double lambda) {
  const double y = lambda / kPi - 0.5;
  const double k = std::nearbyint(y);
  // Snap exact (up to rounding) boundary values pi*n + pi/2 into window n.
  if (std::abs(y - k) <= 1e-12 * (1.0 + std::abs(y))) return static_cast<int>(k);
  return static_cast<int>(std::ceil(y));
}

std::vector<WindowStats> window_stats(const SpectralData& data) {
  if (data.records.empty()) throw Error(Errc::EmptyData, "window_stats: no records");
  std::vector<WindowStats> stats(2 * data.n_max + 1);
  for (int n = -data.n_max; n <= data.n_max; ++n) {
    WindowStats& w = stats[n + data.n_max];
    w.n = n;
    w.beta = Mat::Identity(data.r, data.r);
  }
  for (const EigenRecord& rec : data.records) {
    const int n = window_index(rec.lambda);
    if (n < -data.n_max || n > data.n_max) continue;
    WindowStats& w = stats[n + data.n_max];
    w.count += 1;
    w.beta -= rec.alpha;
    const double dev = rec.lambda - kPi * static_cast<double>(n);
    w.dev2 += dev * dev;
  }
  return stats;
}

A1Report check_a1(const SpectralData& data, const A1Bounds& bounds) {
  A1Report report;
  if (data.records.empty()) return report;
  for (const WindowStats& w : window_stats(data)) {
    report.sup_count = std::max(report.sup_count, w.count);
    report.sum_dev2 += w.dev2;
    report.sum_beta2 += w.beta.squaredNorm();
  }
  report.pass = report.sup_count <= bounds.sup_count && report.sum_dev2 <= bounds.sum_dev2 &&
                report.sum_beta2 <= bounds.sum_beta2;
  return report;
}

A2Report check_a2(const SpectralData& data) {
  A2Report report;
  std::vector<long> rank_per_window(2 * data.n_max + 1, 0);
  for (const EigenRecord& rec : data.records) {
    const int n = window_index(rec.lambda);
    if (n < -data.n_max || n > data.n_max) continue;
    rank_per_window[n + data.n_max] += numerical_rank(rec.alpha);
  }
  report.per_n_counts.resize(data.n_max + 1);
  long cumulative = rank_per_window[data.n_max];  // window n = 0
  report.per_n_counts[0] = cumulative;
  for (int N = 1; N <= data.n_max; ++N) {
    cumulative += rank_per_window[data.n_max + N] + rank_per_window[data.n_max - N];
    report.per_n_counts[N] = cumulative;
  }
  report.n0 = -1;
  for (int N = data.n_max; N >= 0; --N) {
    if (report.per_n_counts[N] == (2L * N + 1) * data.r)
      report.n0 = N;
    else
      break;
  }
  report.pass = report.n0 >= 0;
  return report;
}

std::vector<std::pair<double, Mat>> measure_nodes(const SpectralData& data) {
  std::vector<std::pair<double, Mat>> nodes;
  nodes.reserve(data.records.size());
  for (const EigenRecord& rec : data.records) nodes.emplace_back(rec.lambda, rec.alpha);
  return nodes;
}

}  // namespace dirac
