#include "dirac/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirac {

int ReconstructionConfig::effective_accel_grid(int n_max_used) const {
  // At least 8 samples per oscillation of e^{2 i lambda_max x} on [-1,1].
  const double lambda_max = kPi * (n_max_used + 0.5);
  int oscillation = static_cast<int>(std::ceil(16.0 * (n_max_used + 0.5)));
  (void)lambda_max;
  int n = std::max(accel_grid_n > 0 ? accel_grid_n : 2 * solve_grid_n, oscillation);
  if (n % 2 != 0) ++n;  // symmetric grid needs an even interval count
  return n;
}

ReconstructionResult reconstruct(const SpectralData& data, const ReconstructionConfig& cfg) {
  ReconstructionReport report;
  report.r = data.r;
  report.n_max = data.n_max;
  report.solve_grid_n = cfg.solve_grid_n;
  report.accel_grid_n = cfg.effective_accel_grid(data.n_max);

  auto fail = [&](const std::string& stage, Errc code, const std::string& msg) {
    report.failed_stage = stage;
    report.failure_message = msg;
    throw StageError(stage, code, msg, report);
  };

  if (data.records.empty()) fail("spectra/input", Errc::EmptyData, "no spectral records");

  const A1Bounds bounds = cfg.a1_bounds.value_or(A1Bounds::defaults(data.r));
  report.a1 = check_a1(data, bounds);
  report.a2 = check_a2(data);
  if (cfg.abort_on_validation) {
    if (!report.a1->pass)
      fail("spectra/check_a1", Errc::ValidationFailed, "spectral data violates the (A1) bounds");
    if (!report.a2->pass)
      fail("spectra/check_a2", Errc::ValidationFailed, "rank counting condition (A2) fails");
  }

  // s1/s2: the measure nodes feed the accelerant series directly.
  const UniformGrid accel_grid(-1.0, 1.0, report.accel_grid_n);
  Accelerant H;
  try {
    H = accelerant_from_data(data, accel_grid);
  } catch (const Error& e) {
    fail("accelerant/series", e.code(), e.what());
  }
  report.accelerant_tail = H.tail;
  report.symmetry_residual = H.symmetry_residual();

  const UniformGrid solve_grid(0.0, 1.0, cfg.solve_grid_n);
  report.a3 = check_a3(H, solve_grid, cfg.a3_margin);
  if (cfg.abort_on_validation && !report.a3->pass)
    fail("accelerant/check_a3", Errc::ValidationFailed,
         "discretized I + F_H is not positive at the required margin");

  // s3: Krein solve.
  KreinSolution R;
  try {
    R = cfg.use_fast_solver ? krein_solve_fast(H, solve_grid) : krein_solve_dense(H, solve_grid);
  } catch (const Error& e) {
    fail("krein/solve", e.code(), e.what());
  }
  report.krein_max_residual = R.max_residual;
  report.used_fallback = R.used_fallback;

  // s4: boundary trace.
  ReconstructionResult result{theta(R), std::move(report)};
  return result;
}

double relative_l2_error(const Potential& q, const Potential& q_hat) {
  const int n = std::max(q.grid.n, q_hat.grid.n);
  const UniformGrid grid(0.0, 1.0, n);
  const double h = grid.step();
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = trapezoid_weight(i, n, h);
    const double x = grid.node(i);
    num += w * (q.value_at(x) - q_hat.value_at(x)).squaredNorm();
    den += w * q.value_at(x).squaredNorm();
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

RoundtripReport roundtrip(const Potential& q, const ReconstructionConfig& cfg) {
  const CharacteristicEvaluator ev(q, cfg.ode_steps);
  const SpectralData data = spectral_data(ev, cfg.n_max, cfg.scan);
  ReconstructionResult rec = reconstruct(data, cfg);

  RoundtripReport report;
  report.reconstruction = rec.report;
  report.rel_l2_error = relative_l2_error(q, rec.q);

  const CharacteristicEvaluator ev_hat(rec.q, cfg.ode_steps);
  const SpectralData data_hat = spectral_data(ev_hat, cfg.n_max, cfg.scan);
  report.spectra_count_match = data_hat.records.size() == data.records.size();
  const size_t m = std::min(data.records.size(), data_hat.records.size());
  for (size_t j = 0; j < m; ++j) {
    report.max_eigenvalue_dev = std::max(
        report.max_eigenvalue_dev, std::abs(data.records[j].lambda - data_hat.records[j].lambda));
    report.max_alpha_dev =
        std::max(report.max_alpha_dev, (data.records[j].alpha - data_hat.records[j].alpha).norm());
  }
  if (!report.spectra_count_match) {
    report.max_eigenvalue_dev = std::numeric_limits<double>::infinity();
    report.max_alpha_dev = std::numeric_limits<double>::infinity();
  }
  return report;
}

SpectralData restrict_to_windows(const SpectralData& data, int n_max) {
  SpectralData out;
  out.r = data.r;
  out.n_max = n_max;
  for (const EigenRecord& rec : data.records) {
    const int n = window_index(rec.lambda);
    if (n >= -n_max && n <= n_max) out.records.push_back(rec);
  }
  return out;
}

bool ConvergenceTable::monotone_in_n_max() const {
  int grid_max = 0;
  for (const ConvergenceCell& c : cells) grid_max = std::max(grid_max, c.grid);
  std::vector<ConvergenceCell> line;
  for (const ConvergenceCell& c : cells)
    if (c.grid == grid_max) line.push_back(c);
  std::sort(line.begin(), line.end(),
            [](const ConvergenceCell& a, const ConvergenceCell& b) { return a.n_max < b.n_max; });
  for (size_t i = 1; i < line.size(); ++i)
    if (line[i].rel_error > line[i - 1].rel_error) return false;
  return true;
}

double ConvergenceTable::grid_slope() const {
  int n_max_max = 0;
  for (const ConvergenceCell& c : cells) n_max_max = std::max(n_max_max, c.n_max);
  std::vector<std::pair<double, double>> pts;  // (log grid, log error)
  for (const ConvergenceCell& c : cells)
    if (c.n_max == n_max_max && c.rel_error > 0.0)
      pts.emplace_back(std::log(static_cast<double>(c.grid)), std::log(c.rel_error));
  if (pts.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double npts = static_cast<double>(pts.size());
  const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  return -slope;  // positive when the error decreases as the grid refines
}

ConvergenceTable convergence_study(const Potential& q, std::span<const int> n_max_list,
                                   std::span<const int> grid_list,
                                   const ReconstructionConfig& base) {
  if (n_max_list.empty() || grid_list.empty())
    throw Error(Errc::InvalidArgument, "convergence_study: empty parameter lists");
  const int n_top = *std::max_element(n_max_list.begin(), n_max_list.end());

  ConvergenceTable table;
  if (q.trivial(0.0)) {
    for (int nm : n_max_list)
      for (int g : grid_list) table.cells.push_back({nm, g, 0.0});
    return table;
  }

  const CharacteristicEvaluator ev(q, base.ode_steps);
  const SpectralData data = spectral_data(ev, n_top, base.scan);
  for (int nm : n_max_list) {
    const SpectralData sub = restrict_to_windows(data, nm);
    for (int g : grid_list) {
      ReconstructionConfig cfg = base;
      cfg.n_max = nm;
      cfg.solve_grid_n = g;
      cfg.accel_grid_n = base.accel_grid_n;
      ReconstructionResult rec = reconstruct(sub, cfg);
      table.cells.push_back({nm, g, relative_l2_error(q, rec.q)});
    }
  }
  return table;
}

}  // namespace dirac
