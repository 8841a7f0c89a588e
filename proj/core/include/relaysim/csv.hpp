#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "relaysim/engine.hpp"

namespace relaysim {

inline constexpr const char* kCsvHeader =
    "experiment,topology,detector,pmf_scheme,mode,snr_db,hops,"
    "nodes_per_group,quant_bits,trials,errors,ber,ci95";

struct ExperimentResults {
  std::string name;
  std::vector<ResultRow> rows;
};

// Formats one data row; floating point with 6 significant digits.
std::string format_row(const ResultRow& row);

// Writes one CSV per experiment into `dir` (created if absent). An empty
// row set produces a header-only file and a warning on stderr.
void emit_results(const std::vector<ExperimentResults>& results,
                  const std::filesystem::path& dir);

struct RunManifest {
  std::uint64_t seed = 0;
  std::string config_hash;  // FNV-1a 64 of the config file bytes
  std::string tool_version;
  double wall_time_seconds = 0.0;
  std::string created_utc;
};

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& dir);

// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace relaysim
