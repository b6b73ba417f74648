#pragma once

#include "dirac/core.hpp"
#include "dirac/pipeline.hpp"
#include "dirac/spectra.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>

namespace dirac {

/// Input file rejected; what() carries a locator ("records[3].alpha: ...").
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(Errc::InvalidArgument, what) {}
};

nlohmann::json potential_to_json(const Potential& q);
Potential potential_from_json(const nlohmann::json& j);
nlohmann::json spectral_data_to_json(const SpectralData& data);
SpectralData spectral_data_from_json(const nlohmann::json& j);
nlohmann::json report_to_json(const ReconstructionReport& report);

Potential load_potential(const std::filesystem::path& path);
void save_potential(const Potential& q, const std::filesystem::path& path);
SpectralData load_spectral_data(const std::filesystem::path& path);
void save_spectral_data(const SpectralData& data, const std::filesystem::path& path);
void save_report(const ReconstructionReport& report, const std::filesystem::path& path);

struct SynthesisParams {
  int r = 1;
  int grid_n = 512;
  cxd constant{0.7, 0.0};  // kind = constant
  double amplitude = 0.5;  // kinds sine / random
  int modes = 4;           // kind = random
  uint64_t seed = 42;      // kind = random
};

/// kind: zero | constant | sine | random.  sine is amplitude * sin(pi x) * I;
/// random is a seeded trigonometric polynomial with decaying coefficients
/// that vanishes at both endpoints.  Deterministic: the same seed produces
/// the same samples on every platform.
Potential synthesize_potential(const std::string& kind, const SynthesisParams& params);

}  // namespace dirac
