#pragma once

#include "dirac/accelerant.hpp"
#include "dirac/core.hpp"
#include "dirac/direct.hpp"
#include "dirac/krein.hpp"
#include "dirac/spectra.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dirac {

struct ReconstructionConfig {
  int n_max = 60;
  int solve_grid_n = 512;
  int accel_grid_n = 0;   // 0: auto, max(2 * solve_grid_n, oscillation bound)
  int ode_steps = 2048;   // used by roundtrip / convergence_study
  bool use_fast_solver = true;
  bool abort_on_validation = true;  // false: record failures in the report and continue
  std::optional<A1Bounds> a1_bounds; // default: A1Bounds::defaults(r)
  double a3_margin = 1e-3;
  ScanOptions scan;

  int effective_accel_grid(int n_max_used) const;
};

struct ReconstructionReport {
  int r = 0;
  int n_max = 0;
  int solve_grid_n = 0;
  int accel_grid_n = 0;
  std::string failed_stage;  // empty on success
  std::string failure_message;
  std::optional<A1Report> a1;
  std::optional<A2Report> a2;
  std::optional<A3Report> a3;
  double accelerant_tail = 0.0;
  double symmetry_residual = 0.0;
  double krein_max_residual = 0.0;
  bool used_fallback = false;
};

/// Stage-tagged failure; carries the diagnostics gathered so far.
class StageError : public Error {
 public:
  StageError(std::string stage, Errc code, const std::string& what, ReconstructionReport report)
      : Error(code, "[" + stage + "] " + what), stage_(std::move(stage)), report_(std::move(report)) {}
  const std::string& stage() const { return stage_; }
  const ReconstructionReport& report() const { return report_; }

 private:
  std::string stage_;
  ReconstructionReport report_;
};

struct ReconstructionResult {
  Potential q;
  ReconstructionReport report;
};

/// s1 measure -> s2 accelerant -> s3 Krein solve -> s4 Theta, with the
/// (A1)/(A2) gate before s2 and the (A3) gate before s3.
ReconstructionResult reconstruct(const SpectralData& data, const ReconstructionConfig& cfg);

struct RoundtripReport {
  double rel_l2_error = 0.0;
  double max_eigenvalue_dev = 0.0;
  double max_alpha_dev = 0.0;
  bool spectra_count_match = false;
  ReconstructionReport reconstruction;
};

/// q -> spectral data -> reconstructed q-hat; reports the relative L2 error
/// and re-solves the direct problem on q-hat to compare spectra.
RoundtripReport roundtrip(const Potential& q, const ReconstructionConfig& cfg);

/// Relative L2 distance between two potentials over [0,1] (samples compared
/// on the finer of the two grids, linear interpolation in between).
double relative_l2_error(const Potential& q, const Potential& q_hat);

struct ConvergenceCell {
  int n_max = 0;
  int grid = 0;
  double rel_error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceCell> cells;
  /// True if the error is non-increasing in n_max at the largest grid.
  bool monotone_in_n_max() const;
  /// log-log slope of error vs grid step at the largest n_max
  /// (least-squares fit; positive = error decreases as the grid refines).
  double grid_slope() const;
};

/// Round-trip error table over the (n_max, grid) lattice.  The spectral data
/// is computed once at the largest n_max and restricted per cell.
ConvergenceTable convergence_study(const Potential& q, std::span<const int> n_max_list,
                                   std::span<const int> grid_list,
                                   const ReconstructionConfig& base);

/// Records with window index |n| <= n_max (truncation of the data).
SpectralData restrict_to_windows(const SpectralData& data, int n_max);

}  // namespace dirac
