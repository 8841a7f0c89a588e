#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relaysim/detectors.hpp"
#include "relaysim/topology.hpp"

namespace relaysim {

enum class DetectorKind { first_group_sign, full_map, id, pjp, mrc };
enum class PmfSchemeKind { none, mcs, ps, pjp, id_analytic, id_quantized };
enum class CsiRedraw { per_trial, per_campaign };

const char* to_string(TopologyKind kind);
const char* to_string(FadingMode mode);
const char* to_string(DetectorKind kind);
const char* to_string(PmfSchemeKind kind);
const char* to_string(CsiRedraw redraw);

/// One Monte Carlo campaign. Noise variance is fixed at 1 and the SNR knob
/// sets the Rayleigh scale (or the per-block envelope distribution under
/// known CSI), so snr_db is the average per-link SNR in both modes.
struct SimConfig {
  TopologyKind topology = TopologyKind::mesh;
  int hops = 1;             // K, number of relay groups
  int nodes_per_group = 1;  // uniform group size / branch count
  FadingMode mode = FadingMode::known_stats;
  double snr_db = 3.0;
  DetectorKind detector = DetectorKind::id;
  PmfSchemeKind scheme = PmfSchemeKind::id_analytic;
  int quant_bits = 0;  // 0 = unquantized exchange
  int n_f = -1;        // -1 = strict majority
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  std::uint64_t mcs_samples = 100'000;
  std::uint64_t pilots = 10'000;
  std::uint64_t recursion_samples = 100'000;
  CsiRedraw csi_redraw = CsiRedraw::per_trial;

  double snr() const;  // linear scale
  double noise_variance() const { return 1.0; }
};

// Semantic validation; throws std::invalid_argument with a diagnostic.
void validate(const SimConfig& config);

struct BerEstimate {
  double ber = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double ci95_halfwidth = 0.0;  // 1.96 sqrt(ber (1 - ber) / trials)
};

/// Side information exchanged along the pipeline, one entry per relay group
/// (entry g-1 describes group g). Detectors at group g+1 consume entry g-1.
/// For the independence scheme, `marginals` holds the exchanged (possibly
/// quantized) values and `computed` the pre-quantization ones.
struct PmfPipeline {
  std::vector<JointPmf> joints;
  std::vector<MarginalSet> marginals;
  std::vector<MarginalSet> computed;
};

// Topology plus channel grid for one campaign. Under known CSI with
// per-campaign redraw the grid comes from the seed's grid substream.
NetworkTopology build_network(const SimConfig& config);

// Group-by-group side information per the configured scheme. On known-CSI
// instances small enough to enumerate (fan-in <= 2 everywhere) the pmfs and
// marginals are computed by quadrature instead of sampling.
PmfPipeline build_pipeline(const SimConfig& config,
                           const NetworkTopology& topology, int threads = 1);

// Simulates one transmission; returns true when the measured decision
// matches the drawn source symbol.
bool run_trial(const SimConfig& config, const NetworkTopology& topology,
               const PmfPipeline& pipeline, Rng& rng);

// Full campaign; deterministic for a fixed (config, seed) under any thread
// count. threads = 0 picks the hardware concurrency.
BerEstimate simulate_ber(const SimConfig& config, int threads = 0);

// Monte Carlo evaluation of one node's error probability under the
// independence model: previous decisions flip independently against their
// marginals, observations follow the mixture, the node applies the
// independence rule.
double recursive_error_probability(std::span<const ChannelSpec> links,
                                   const MarginalSet& prev,
                                   std::uint64_t samples,
                                   const StreamKey& streams, int threads = 1);

// True when exact_ber_small can enumerate the instance: known CSI with a
// per-campaign grid, every fan-in at most 2, and a supported detector.
bool exact_ber_supported(const SimConfig& config);

// Exact error probability by chaining per-group decision distributions with
// adaptive quadrature (tolerance 1e-8). Throws when unsupported.
double exact_ber_small(const SimConfig& config);

// Same, against a caller-supplied channel grid (layout must match config).
double exact_ber_small(const SimConfig& config,
                       const NetworkTopology& topology);

enum class SweepAxis { none, hops, snr_db, quant_bits, group_size };

const char* to_string(SweepAxis axis);

struct ResultRow {
  std::string experiment;
  TopologyKind topology;
  std::string detector;
  std::string pmf_scheme;
  FadingMode mode;
  double snr_db = 0.0;
  int hops = 0;
  int nodes_per_group = 0;
  int quant_bits = 0;
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  double ci95 = 0.0;
};

// Applies one sweep value to a copy of the base config.
SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value);

// One campaign per value; shared base seed, per-point derived seeds.
std::vector<ResultRow> sweep(const std::string& experiment,
                             const SimConfig& base, SweepAxis axis,
                             std::span<const double> values, int threads = 0);

}  // namespace relaysim
