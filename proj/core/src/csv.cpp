#include "relaysim/csv.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace relaysim {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string format_row(const ResultRow& row) {
  std::string out;
  out += row.experiment;
  out += ',';
  out += to_string(row.topology);
  out += ',';
  out += row.detector;
  out += ',';
  out += row.pmf_scheme;
  out += ',';
  out += to_string(row.mode);
  out += ',';
  out += format_double(row.snr_db);
  out += ',';
  out += std::to_string(row.hops);
  out += ',';
  out += std::to_string(row.nodes_per_group);
  out += ',';
  out += std::to_string(row.quant_bits);
  out += ',';
  out += std::to_string(row.trials);
  out += ',';
  out += std::to_string(row.errors);
  out += ',';
  out += format_double(row.ber);
  out += ',';
  out += format_double(row.ci95);
  return out;
}

void emit_results(const std::vector<ExperimentResults>& results,
                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  for (const ExperimentResults& exp : results) {
    const std::filesystem::path file = dir / (exp.name + ".csv");
    std::ofstream out(file, std::ios::trunc);
    if (!out)
      throw std::runtime_error("cannot write results file: " + file.string());
    out << kCsvHeader << '\n';
    for (const ResultRow& row : exp.rows) out << format_row(row) << '\n';
    if (exp.rows.empty())
      std::cerr << "warning: experiment '" << exp.name
                << "' produced no rows (empty sweep)\n";
  }
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& dir) {
  const nlohmann::json doc{{"schema_version", 1},
                           {"tool_version", manifest.tool_version},
                           {"seed", manifest.seed},
                           {"config_hash", manifest.config_hash},
                           {"wall_time_seconds", manifest.wall_time_seconds},
                           {"created_utc", manifest.created_utc}};
  const std::filesystem::path file = dir / "manifest.json";
  std::ofstream out(file, std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write manifest: " + file.string());
  out << doc.dump(2) << '\n';
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    hash ^= b;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace relaysim
