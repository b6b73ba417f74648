#include "dirac/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>

namespace dirac {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k)
      row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j, int rows, int cols, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ParseError(where + "[" + std::to_string(i) + "]: expected " + std::to_string(cols) +
                       " entries");
    for (int k = 0; k < cols; ++k) {
      const json& e = row[k];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ParseError(where + "[" + std::to_string(i) + "][" + std::to_string(k) +
                         "]: expected [re, im]");
      m(i, k) = cxd(e[0].get<double>(), e[1].get<double>());
    }
  }
  if (!m.allFinite())
    throw ParseError(where + ": non-finite entries");
  return m;
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return j;
}

void write_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidArgument, path.string() + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

int get_int(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(where + ": missing integer field '" + std::string(key) + "'");
  return j[key].get<int>();
}

double get_double(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(where + ": missing numeric field '" + std::string(key) + "'");
  return j[key].get<double>();
}

// Deterministic uniform doubles in [-1, 1): fixed mapping from the raw
// 64-bit stream so that files are byte-identical across platforms.
struct SeededUniform {
  std::mt19937_64 gen;
  explicit SeededUniform(uint64_t seed) : gen(seed) {}
  double next() {
    const uint64_t bits = gen() >> 11;  // 53 bits
    return 2.0 * (static_cast<double>(bits) * 0x1.0p-53) - 1.0;
  }
};

}  // namespace

json potential_to_json(const Potential& q) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "potential";
  j["r"] = q.r;
  j["grid"] = {{"a", q.grid.a}, {"b", q.grid.b}, {"n", q.grid.n}};
  json samples = json::array();
  for (const Mat& s : q.samples) samples.push_back(matrix_to_json(s));
  j["samples"] = std::move(samples);
  return j;
}

Potential potential_from_json(const json& j) {
  if (get_int(j, "schema_version", "potential") != kSchemaVersion)
    throw ParseError("potential: unsupported schema_version");
  Potential q;
  q.r = get_int(j, "r", "potential");
  if (q.r < 1) throw ParseError("potential.r: must be positive");
  if (!j.contains("grid")) throw ParseError("potential: missing grid");
  const json& g = j["grid"];
  try {
    q.grid = UniformGrid(get_double(g, "a", "potential.grid"), get_double(g, "b", "potential.grid"),
                         get_int(g, "n", "potential.grid"));
  } catch (const Error& e) {
    throw ParseError(std::string("potential.grid: ") + e.what());
  }
  if (!j.contains("samples") || !j["samples"].is_array())
    throw ParseError("potential: missing samples array");
  const json& samples = j["samples"];
  if (static_cast<int>(samples.size()) != q.grid.node_count())
    throw ParseError("potential.samples: expected " + std::to_string(q.grid.node_count()) +
                     " entries, got " + std::to_string(samples.size()));
  q.samples.reserve(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    q.samples.push_back(
        matrix_from_json(samples[i], q.r, q.r, "potential.samples[" + std::to_string(i) + "]"));
  return q;
}

json spectral_data_to_json(const SpectralData& data) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "spectral_data";
  j["r"] = data.r;
  j["n_max"] = data.n_max;
  json records = json::array();
  for (const EigenRecord& rec : data.records) {
    json rj;
    rj["lambda"] = rec.lambda;
    rj["alpha"] = matrix_to_json(rec.alpha);
    rj["multiplicity"] = rec.multiplicity;
    rj["residual"] = rec.residual;
    records.push_back(std::move(rj));
  }
  j["records"] = std::move(records);
  return j;
}

SpectralData spectral_data_from_json(const json& j) {
  if (get_int(j, "schema_version", "spectral_data") != kSchemaVersion)
    throw ParseError("spectral_data: unsupported schema_version");
  SpectralData data;
  data.r = get_int(j, "r", "spectral_data");
  data.n_max = get_int(j, "n_max", "spectral_data");
  if (!j.contains("records") || !j["records"].is_array())
    throw ParseError("spectral_data: missing records array");
  const json& records = j["records"];
  data.records.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    const std::string where = "spectral_data.records[" + std::to_string(i) + "]";
    const json& rj = records[i];
    EigenRecord rec;
    rec.lambda = get_double(rj, "lambda", where);
    rec.alpha = matrix_from_json(rj.contains("alpha") ? rj["alpha"] : json(), data.r, data.r,
                                 where + ".alpha");
    rec.multiplicity = rj.contains("multiplicity") ? get_int(rj, "multiplicity", where)
                                                   : numerical_rank(rec.alpha);
    rec.residual = rj.contains("residual") ? get_double(rj, "residual", where) : 0.0;
    data.records.push_back(std::move(rec));
  }
  try {
    data.validate();
  } catch (const Error& e) {
    throw ParseError(std::string("spectral_data: ") + e.what());
  }
  return data;
}

json report_to_json(const ReconstructionReport& report) {
  json j;
  j["r"] = report.r;
  j["n_max"] = report.n_max;
  j["solve_grid_n"] = report.solve_grid_n;
  j["accel_grid_n"] = report.accel_grid_n;
  j["failed_stage"] = report.failed_stage;
  j["failure_message"] = report.failure_message;
  if (report.a1) {
    j["a1"] = {{"pass", report.a1->pass},
               {"sup_count", report.a1->sup_count},
               {"sum_dev2", report.a1->sum_dev2},
               {"sum_beta2", report.a1->sum_beta2}};
  }
  if (report.a2) {
    j["a2"] = {{"pass", report.a2->pass}, {"n0", report.a2->n0}};
  }
  if (report.a3) {
    j["a3"] = {{"pass", report.a3->pass}, {"min_eigenvalue", report.a3->min_eigenvalue}};
  }
  j["accelerant_tail"] = report.accelerant_tail;
  j["symmetry_residual"] = report.symmetry_residual;
  j["krein_max_residual"] = report.krein_max_residual;
  j["used_fallback"] = report.used_fallback;
  return j;
}

Potential load_potential(const std::filesystem::path& path) {
  return potential_from_json(parse_file(path));
}

void save_potential(const Potential& q, const std::filesystem::path& path) {
  write_file(potential_to_json(q), path);
}

SpectralData load_spectral_data(const std::filesystem::path& path) {
  return spectral_data_from_json(parse_file(path));
}

void save_spectral_data(const SpectralData& data, const std::filesystem::path& path) {
  write_file(spectral_data_to_json(data), path);
}

void save_report(const ReconstructionReport& report, const std::filesystem::path& path) {
  write_file(report_to_json(report), path);
}

Potential synthesize_potential(const std::string& kind, const SynthesisParams& params) {
  const UniformGrid grid(0.0, 1.0, params.grid_n);
  if (kind == "zero") return Potential::zero(params.r, grid);
  if (kind == "constant")
    return Potential::constant(params.constant * Mat::Identity(params.r, params.r), grid);
  if (kind == "sine") {
    Potential q = Potential::zero(params.r, grid);
    for (int i = 0; i <= grid.n; ++i)
      q.samples[i] = params.amplitude * std::sin(kPi * grid.node(i)) *
                     Mat::Identity(params.r, params.r);
    return q;
  }
  if (kind == "random") {
    SeededUniform rng(params.seed);
    // coefficient tensor: modes x r x r complex, geometric decay in the mode
    std::vector<Mat> coef(params.modes);
    for (int m = 0; m < params.modes; ++m) {
      coef[m] = Mat(params.r, params.r);
      const double decay = std::pow(0.5, m);
      for (int i = 0; i < params.r; ++i)
        for (int k = 0; k < params.r; ++k)
          coef[m](i, k) = params.amplitude * decay * cxd(rng.next(), rng.next());
    }
    Potential q = Potential::zero(params.r, grid);
    for (int node = 0; node <= grid.n; ++node) {
      const double x = grid.node(node);
      Mat v = Mat::Zero(params.r, params.r);
      for (int m = 0; m < params.modes; ++m) v += std::sin(kPi * (m + 1) * x) * coef[m];
      q.samples[node] = v;
    }
    return q;
  }
  throw Error(Errc::InvalidArgument, "synthesize_potential: unknown kind '" + kind + "'");
}

}  // namespace dirac
