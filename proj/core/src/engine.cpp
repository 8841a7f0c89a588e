#include "relaysim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "exact_internal.hpp"

namespace relaysim {

namespace {

// Substream families; combined with group/node salts where needed.
enum StreamId : std::uint64_t {
  kStreamTrial = 1,
  kStreamGrid = 2,
  kStreamMcs = 3,
  kStreamPilot = 4,
  kStreamRecursion = 5,
};

std::uint64_t pack_stream(StreamId id, int group, int node = 0) {
  return (static_cast<std::uint64_t>(id) << 48) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(group)) << 24) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(node));
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

bool needs_joints(const SimConfig& c) {
  return c.detector == DetectorKind::full_map || c.detector == DetectorKind::pjp;
}

bool needs_marginals(const SimConfig& c) {
  return c.detector == DetectorKind::id;
}

int effective_n_f(const SimConfig& c, int group_size) {
  return c.n_f >= 0 ? std::min(c.n_f, group_size)
                    : pjp_default_threshold(group_size);
}

bool all_relay_fan_in_one(const SimConfig& c) {
  return c.topology == TopologyKind::multihop || c.nodes_per_group == 1;
}

// Static sample partition; every unit owns a substream, so the partition
// never affects results.
template <class Body>
void parallel_units(std::uint64_t count, int threads, const Body& body) {
  const int workers = std::max(
      1, std::min<int>(threads,
                       static_cast<int>(std::min<std::uint64_t>(count, 256))));
  if (workers == 1) {
    body(0, count, 0);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t lo = count * static_cast<std::uint64_t>(w) /
                             static_cast<std::uint64_t>(workers);
    const std::uint64_t hi = count * static_cast<std::uint64_t>(w + 1) /
                             static_cast<std::uint64_t>(workers);
    pool.emplace_back([&body, lo, hi, w] { body(lo, hi, w); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

const char* to_string(TopologyKind kind) {
  return kind == TopologyKind::mesh ? "mesh" : "multihop";
}

const char* to_string(FadingMode mode) {
  return mode == FadingMode::known_csi ? "known_csi" : "known_stats";
}

const char* to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::first_group_sign: return "sign";
    case DetectorKind::full_map: return "full_map";
    case DetectorKind::id: return "id";
    case DetectorKind::pjp: return "pjp";
    case DetectorKind::mrc: return "mrc";
  }
  return "?";
}

const char* to_string(PmfSchemeKind kind) {
  switch (kind) {
    case PmfSchemeKind::none: return "none";
    case PmfSchemeKind::mcs: return "mcs";
    case PmfSchemeKind::ps: return "ps";
    case PmfSchemeKind::pjp: return "pjp";
    case PmfSchemeKind::id_analytic: return "id";
    case PmfSchemeKind::id_quantized: return "id_quantized";
  }
  return "?";
}

const char* to_string(CsiRedraw redraw) {
  return redraw == CsiRedraw::per_trial ? "per_trial" : "per_campaign";
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::hops: return "hops";
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::quant_bits: return "quant_bits";
    case SweepAxis::group_size: return "group_size";
  }
  return "?";
}

double SimConfig::snr() const { return std::pow(10.0, snr_db / 10.0); }

void validate(const SimConfig& c) {
  if (c.hops < 1) throw std::invalid_argument("hops must be >= 1");
  if (c.nodes_per_group < 1)
    throw std::invalid_argument("nodes_per_group must be >= 1");
  if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (!std::isfinite(c.snr_db)) throw std::invalid_argument("snr_db must be finite");

  switch (c.detector) {
    case DetectorKind::first_group_sign:
      if (c.scheme != PmfSchemeKind::none)
        throw std::invalid_argument("detector 'sign' takes no pmf scheme");
      if (c.nodes_per_group != 1)
        throw std::invalid_argument(
            "detector 'sign' measures the single first-group node; "
            "nodes_per_group must be 1");
      break;
    case DetectorKind::mrc:
      if (c.scheme != PmfSchemeKind::none)
        throw std::invalid_argument("detector 'mrc' takes no pmf scheme");
      break;
    case DetectorKind::id:
      if (c.scheme != PmfSchemeKind::id_analytic &&
          c.scheme != PmfSchemeKind::id_quantized)
        throw std::invalid_argument(
            "detector 'id' needs pmf_scheme 'id' or 'id_quantized'");
      break;
    case DetectorKind::full_map:
      if (c.scheme != PmfSchemeKind::mcs && c.scheme != PmfSchemeKind::ps)
        throw std::invalid_argument(
            "detector 'full_map' needs pmf_scheme 'mcs' or 'ps'");
      break;
    case DetectorKind::pjp:
      if (c.scheme != PmfSchemeKind::pjp)
        throw std::invalid_argument("detector 'pjp' uses pmf_scheme 'pjp'");
      break;
  }

  if (c.topology == TopologyKind::multihop &&
      (c.detector == DetectorKind::full_map ||
       c.detector == DetectorKind::pjp))
    throw std::invalid_argument(
        "multihop relays have a single predecessor; their decisions are "
        "conditionally independent, use detector 'id' (or 'mrc')");

  if (c.scheme == PmfSchemeKind::id_quantized) {
    if (c.quant_bits < 1 || c.quant_bits > 16)
      throw std::invalid_argument("quant_bits must lie in [1, 16]");
  } else if (c.quant_bits != 0) {
    throw std::invalid_argument(
        "quant_bits is only meaningful with pmf_scheme 'id_quantized'");
  }

  if (c.detector == DetectorKind::pjp) {
    if (c.n_f > c.nodes_per_group)
      throw std::invalid_argument("n_f cannot exceed the group size");
    if (c.n_f < -1) throw std::invalid_argument("n_f must be >= 0 (or -1)");
  } else if (c.n_f != -1) {
    throw std::invalid_argument("n_f is only meaningful for detector 'pjp'");
  }

  if (needs_joints(c) && c.nodes_per_group > JointPmf::node_cap())
    throw std::invalid_argument("group size exceeds the joint pmf cap");

  if (c.scheme == PmfSchemeKind::mcs && c.mcs_samples < 1)
    throw std::invalid_argument("mcs_samples must be >= 1");
  if (c.scheme == PmfSchemeKind::ps && c.pilots < 1)
    throw std::invalid_argument("pilots must be >= 1");
  if ((c.scheme == PmfSchemeKind::id_analytic ||
       c.scheme == PmfSchemeKind::id_quantized) &&
      c.recursion_samples < 1)
    throw std::invalid_argument("recursion_samples must be >= 1");

  if (c.mode == FadingMode::known_csi && c.csi_redraw == CsiRedraw::per_trial) {
    if (c.detector == DetectorKind::full_map)
      throw std::invalid_argument(
          "full_map under known CSI needs a fixed fading block to estimate "
          "its pmfs; set csi_redraw to 'per_campaign'");
    if (c.detector == DetectorKind::id && !all_relay_fan_in_one(c))
      throw std::invalid_argument(
          "id under known CSI with per-trial fading redraw is only "
          "supported for single-predecessor relays; set csi_redraw to "
          "'per_campaign'");
  }
}

NetworkTopology build_network(const SimConfig& c) {
  const double snr = c.snr();
  const double s2 = c.noise_variance();
  ChannelFactory factory;
  if (c.mode == FadingMode::known_stats) {
    const ChannelSpec common = ChannelSpec::known_stats(snr * s2, s2);
    factory = [common](int, int, int) { return common; };
  } else {
    auto rng = std::make_shared<Rng>(
        Rng::substream(c.seed, pack_stream(kStreamGrid, 0), 0));
    const double sh2 = snr * s2;
    factory = [rng, sh2, s2](int, int, int) {
      return ChannelSpec::known_csi(rng->rayleigh(sh2), s2);
    };
  }
  if (c.topology == TopologyKind::mesh) {
    std::vector<int> sizes(static_cast<std::size_t>(c.hops),
                           c.nodes_per_group);
    return build_mesh(c.hops, sizes, factory);
  }
  return build_multihop(c.hops, c.nodes_per_group, factory);
}

namespace {

void maybe_quantize(const SimConfig& c, MarginalSet& m) {
  if (c.scheme != PmfSchemeKind::id_quantized) return;
  for (double& p : m.p_correct) p = quantize_probability(p, c.quant_bits);
}

// Group-1 probabilities of correct decision, exact in both modes.
MarginalSet first_group_marginals(const NetworkTopology& topo) {
  MarginalSet m;
  const int n1 = topo.group_size(1);
  m.p_correct.reserve(static_cast<std::size_t>(n1));
  for (int j = 0; j < n1; ++j)
    m.p_correct.push_back(1.0 - ber_first_hop(topo.incoming_channels(1, j)[0]));
  return m;
}

// Marginal recursion when every relay has one predecessor (chains): the sign
// rule composes like a binary symmetric channel, exactly.
void chain_marginal_pipeline(const SimConfig& c, const NetworkTopology& topo,
                             PmfPipeline& pipe) {
  const int K = topo.hop_count();
  pipe.computed.clear();
  pipe.marginals.clear();
  pipe.computed.reserve(static_cast<std::size_t>(K));
  pipe.marginals.reserve(static_cast<std::size_t>(K));
  pipe.computed.push_back(first_group_marginals(topo));
  {
    MarginalSet belief = pipe.computed.back();
    maybe_quantize(c, belief);
    pipe.marginals.push_back(std::move(belief));
  }
  for (int g = 2; g <= K; ++g) {
    const int n = topo.group_size(g);
    MarginalSet m;
    m.p_correct.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const auto links = topo.incoming_channels(g, j);
      const int parent = topo.incoming_links(g, j)[0].from;
      const double q = ber_first_hop(links[0]);
      const double prev =
          pipe.marginals.back().p_correct[static_cast<std::size_t>(parent)];
      m.p_correct[static_cast<std::size_t>(j)] =
          prev * (1.0 - q) + (1.0 - prev) * q;
    }
    pipe.computed.push_back(m);
    maybe_quantize(c, m);
    pipe.marginals.push_back(std::move(m));
  }
}

void id_pipeline(const SimConfig& c, const NetworkTopology& topo,
                 PmfPipeline& pipe, int threads) {
  if (all_relay_fan_in_one(c)) {
    chain_marginal_pipeline(c, topo, pipe);
    return;
  }
  const int K = topo.hop_count();
  pipe.computed.reserve(static_cast<std::size_t>(K));
  pipe.marginals.reserve(static_cast<std::size_t>(K));
  pipe.computed.push_back(first_group_marginals(topo));
  {
    MarginalSet belief = pipe.computed.back();
    maybe_quantize(c, belief);
    pipe.marginals.push_back(std::move(belief));
  }
  for (int g = 2; g <= K; ++g) {
    const int n = topo.group_size(g);
    const MarginalSet& prev = pipe.marginals.back();
    MarginalSet m;
    m.p_correct.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const auto links = topo.incoming_channels(g, j);
      const StreamKey key{c.seed, pack_stream(kStreamRecursion, g, j)};
      m.p_correct[static_cast<std::size_t>(j)] =
          1.0 - recursive_error_probability(links, prev, c.recursion_samples,
                                            key, threads);
    }
    pipe.computed.push_back(m);
    maybe_quantize(c, m);
    pipe.marginals.push_back(std::move(m));
  }
}

void mcs_pipeline(const SimConfig& c, const NetworkTopology& topo,
                  PmfPipeline& pipe, int threads) {
  const int K = topo.hop_count();
  pipe.joints.reserve(static_cast<std::size_t>(K));
  pipe.joints.push_back(product_pmf(first_group_marginals(topo)));
  for (int g = 2; g <= K; ++g) {
    const int n = topo.group_size(g);
    GroupContext ctx;
    ctx.incoming.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const auto links = topo.incoming_channels(g, j);
      ctx.incoming.emplace_back(links.begin(), links.end());
    }
    ctx.prev_pmf = &pipe.joints.back();
    const NodeDecisionFn decide = [&ctx](int, std::span<const Observation> y,
                                         std::span<const ChannelSpec> links) {
      DecisionContext dctx{y, links, ctx.prev_pmf, nullptr};
      return map_detect(dctx);
    };
    const StreamKey key{c.seed, pack_stream(kStreamMcs, g)};
    pipe.joints.push_back(
        estimate_mcs(ctx, decide, c.mcs_samples, key, threads));
  }
}

void ps_pipeline(const SimConfig& c, const NetworkTopology& topo,
                 PmfPipeline& pipe, int threads) {
  const int K = topo.hop_count();
  pipe.joints.reserve(static_cast<std::size_t>(K));
  pipe.joints.push_back(product_pmf(first_group_marginals(topo)));
  for (int g = 2; g <= K; ++g) {
    // A designated node of group g+1 (the destination when g = K) observes
    // the pilots and estimates the pmf of group g's decisions.
    const auto obs_links = topo.incoming_channels(g + 1, 0);
    const int n = topo.group_size(g);
    const std::size_t bins = std::size_t{1} << n;
    std::vector<std::uint64_t> histogram(bins, 0);
    const StreamKey key{c.seed, pack_stream(kStreamPilot, g)};

    std::vector<std::vector<std::uint64_t>> parts;
    const auto run = [&](std::uint64_t lo, std::uint64_t hi,
                         std::vector<std::uint64_t>& counts) {
      std::vector<Symbol> prev;
      std::vector<Symbol> cur;
      std::vector<Observation> received;
      for (std::uint64_t m = lo; m < hi; ++m) {
        Rng rng = key.at(m);
        prev.assign(1, 1);  // pilots: the source sends x = +1
        for (int gg = 1; gg <= g; ++gg) {
          const int size = topo.group_size(gg);
          cur.resize(static_cast<std::size_t>(size));
          for (int j = 0; j < size; ++j) {
            const auto links = topo.incoming_channels(gg, j);
            const auto in = topo.incoming_links(gg, j);
            received.resize(links.size());
            for (std::size_t i = 0; i < links.size(); ++i)
              received[i] = sample_observation(
                  prev[static_cast<std::size_t>(in[i].from)], links[i], rng);
            if (gg == 1) {
              cur[static_cast<std::size_t>(j)] = detect_first_group(received[0]);
            } else {
              DecisionContext dctx{received, links,
                                   &pipe.joints[static_cast<std::size_t>(gg - 2)],
                                   nullptr};
              cur[static_cast<std::size_t>(j)] = map_detect(dctx);
            }
          }
          std::swap(prev, cur);
        }
        std::size_t kappa = 0;
        const auto in_dest = topo.incoming_links(g + 1, 0);
        for (std::size_t i = 0; i < obs_links.size(); ++i) {
          const Observation y = sample_observation(
              prev[static_cast<std::size_t>(in_dest[i].from)], obs_links[i],
              rng);
          if (detect_first_group(y) == 1) kappa |= std::size_t{1} << i;
        }
        ++counts[kappa];
      }
    };

    const int workers = std::max(
        1, std::min<int>(threads, static_cast<int>(std::min<std::uint64_t>(
                                      c.pilots, 256))));
    if (workers == 1) {
      run(0, c.pilots, histogram);
    } else {
      parts.assign(static_cast<std::size_t>(workers),
                   std::vector<std::uint64_t>(bins, 0));
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        const std::uint64_t lo = c.pilots * static_cast<std::uint64_t>(w) /
                                 static_cast<std::uint64_t>(workers);
        const std::uint64_t hi = c.pilots * static_cast<std::uint64_t>(w + 1) /
                                 static_cast<std::uint64_t>(workers);
        pool.emplace_back(run, lo, hi,
                          std::ref(parts[static_cast<std::size_t>(w)]));
      }
      for (auto& t : pool) t.join();
      for (const auto& part : parts)
        for (std::size_t k = 0; k < bins; ++k) histogram[k] += part[k];
    }

    std::vector<double> p_kappa(bins);
    for (std::size_t k = 0; k < bins; ++k)
      p_kappa[k] = static_cast<double>(histogram[k]) /
                   static_cast<double>(c.pilots);
    std::vector<double> pc(obs_links.size());
    for (std::size_t i = 0; i < obs_links.size(); ++i)
      pc[i] = 1.0 - ber_first_hop(obs_links[i]);
    pipe.joints.push_back(estimate_ps(p_kappa, pc));
  }
}

void pjp_pipeline(const SimConfig& c, const NetworkTopology& topo,
                  PmfPipeline& pipe) {
  const int K = topo.hop_count();
  pipe.joints.reserve(static_cast<std::size_t>(K));
  for (int g = 1; g <= K; ++g) {
    const int n = topo.group_size(g);
    pipe.joints.push_back(pjp_pmf(n, effective_n_f(c, n)));
  }
}

}  // namespace

PmfPipeline build_pipeline(const SimConfig& c, const NetworkTopology& topo,
                           int threads) {
  PmfPipeline pipe;
  if (c.scheme == PmfSchemeKind::none) return pipe;
  const int workers = resolve_threads(threads);
  if (c.scheme == PmfSchemeKind::pjp) {
    pjp_pipeline(c, topo, pipe);
    return pipe;
  }
  if (c.mode == FadingMode::known_csi && detail::enumerable_csi(c) &&
      c.scheme != PmfSchemeKind::ps) {
    return detail::build_pipeline_exact(c, topo);
  }
  switch (c.scheme) {
    case PmfSchemeKind::id_analytic:
    case PmfSchemeKind::id_quantized:
      id_pipeline(c, topo, pipe, workers);
      break;
    case PmfSchemeKind::mcs:
      mcs_pipeline(c, topo, pipe, workers);
      break;
    case PmfSchemeKind::ps:
      ps_pipeline(c, topo, pipe, workers);
      break;
    case PmfSchemeKind::pjp:
      pjp_pipeline(c, topo, pipe);
      break;
    case PmfSchemeKind::none:
      break;
  }
  return pipe;
}

namespace {

// Single-predecessor independence rule without building a context.
Symbol single_link_id(Observation y, const ChannelSpec& link, double p_correct) {
  return sign_of(id_log_ratio_term(link.llr(y), p_correct));
}

struct TrialState {
  std::vector<Symbol> prev;
  std::vector<Symbol> cur;
  std::vector<Observation> received;
};

bool run_trial_impl(const SimConfig& c, const NetworkTopology& topo,
                    const PmfPipeline& pipe, Rng& rng, TrialState& st) {
  const Symbol x = rng.symbol();
  const int K = topo.hop_count();
  const int measure =
      c.detector == DetectorKind::first_group_sign ? 1 : K + 1;
  st.prev.assign(1, x);
  for (int g = 1; g <= measure; ++g) {
    const int size = topo.group_size(g);
    st.cur.resize(static_cast<std::size_t>(size));
    for (int j = 0; j < size; ++j) {
      const auto links = topo.incoming_channels(g, j);
      const auto in = topo.incoming_links(g, j);
      st.received.resize(links.size());
      for (std::size_t i = 0; i < links.size(); ++i)
        st.received[i] = sample_observation(
            st.prev[static_cast<std::size_t>(in[i].from)], links[i], rng);
      Symbol decision = 1;
      if (g == 1) {
        decision = detect_first_group(st.received[0]);
      } else {
        switch (c.detector) {
          case DetectorKind::mrc: {
            DecisionContext ctx{st.received, links, nullptr, nullptr};
            decision = mrc_detect(ctx);
            break;
          }
          case DetectorKind::id: {
            const MarginalSet& marg =
                pipe.marginals[static_cast<std::size_t>(g - 2)];
            if (links.size() == 1) {
              decision = single_link_id(
                  st.received[0], links[0],
                  marg.p_correct[static_cast<std::size_t>(in[0].from)]);
            } else {
              DecisionContext ctx{st.received, links, nullptr, &marg};
              decision = id_detect(ctx);
            }
            break;
          }
          case DetectorKind::full_map:
          case DetectorKind::pjp: {
            DecisionContext ctx{st.received, links,
                                &pipe.joints[static_cast<std::size_t>(g - 2)],
                                nullptr};
            decision = map_detect(ctx);
            break;
          }
          case DetectorKind::first_group_sign:
            decision = detect_first_group(st.received[0]);
            break;
        }
      }
      st.cur[static_cast<std::size_t>(j)] = decision;
    }
    std::swap(st.prev, st.cur);
  }
  return st.prev[0] == x;
}

}  // namespace

bool run_trial(const SimConfig& c, const NetworkTopology& topo,
               const PmfPipeline& pipe, Rng& rng) {
  TrialState st;
  return run_trial_impl(c, topo, pipe, rng, st);
}

BerEstimate simulate_ber(const SimConfig& c, int threads) {
  validate(c);
  const int workers = resolve_threads(threads);
  const NetworkTopology base_topo = build_network(c);
  const bool per_trial_grid = c.mode == FadingMode::known_csi &&
                              c.csi_redraw == CsiRedraw::per_trial;
  PmfPipeline pipe;
  const bool pipeline_per_trial =
      per_trial_grid && needs_marginals(c);
  if ((needs_joints(c) || needs_marginals(c)) && !pipeline_per_trial)
    pipe = build_pipeline(c, base_topo, workers);

  std::vector<std::uint64_t> errors(
      static_cast<std::size_t>(std::max(1, std::min<int>(workers, 256))), 0);
  const double sh2 = c.snr() * c.noise_variance();
  const double s2 = c.noise_variance();

  parallel_units(c.trials, workers,
                 [&](std::uint64_t lo, std::uint64_t hi, int worker) {
    TrialState st;
    NetworkTopology topo = base_topo;  // mutated only when redrawing
    PmfPipeline local_pipe;
    std::uint64_t local_errors = 0;
    for (std::uint64_t t = lo; t < hi; ++t) {
      Rng rng = Rng::substream(c.seed, pack_stream(kStreamTrial, 0), t);
      const PmfPipeline* active = &pipe;
      if (per_trial_grid) {
        topo.refill_channels([&rng, sh2, s2](int, int, int) {
          return ChannelSpec::known_csi(rng.rayleigh(sh2), s2);
        });
        if (pipeline_per_trial) {
          chain_marginal_pipeline(c, topo, local_pipe);
          active = &local_pipe;
        }
      }
      if (!run_trial_impl(c, topo, *active, rng, st)) ++local_errors;
    }
    errors[static_cast<std::size_t>(worker)] += local_errors;
  });

  BerEstimate est;
  est.trials = c.trials;
  for (std::uint64_t e : errors) est.errors += e;
  est.ber = static_cast<double>(est.errors) / static_cast<double>(est.trials);
  est.ci95_halfwidth =
      1.96 * std::sqrt(est.ber * (1.0 - est.ber) /
                       static_cast<double>(est.trials));
  return est;
}

double recursive_error_probability(std::span<const ChannelSpec> links,
                                   const MarginalSet& prev,
                                   std::uint64_t samples,
                                   const StreamKey& streams, int threads) {
  if (samples == 0) throw std::invalid_argument("samples must be >= 1");
  if (links.size() != prev.p_correct.size())
    throw std::invalid_argument("marginal count does not match fan-in");
  std::vector<std::uint64_t> errors(
      static_cast<std::size_t>(std::max(1, std::min<int>(threads, 256))), 0);
  parallel_units(samples, threads,
                 [&](std::uint64_t lo, std::uint64_t hi, int worker) {
    std::uint64_t local = 0;
    for (std::uint64_t s = lo; s < hi; ++s) {
      Rng rng = streams.at(s);
      const Symbol x = rng.symbol();
      double total = 0.0;
      for (std::size_t i = 0; i < links.size(); ++i) {
        const double pc = prev.p_correct[i];
        const Symbol xi = rng.uniform() < pc ? x : static_cast<Symbol>(-x);
        const Observation y = sample_observation(xi, links[i], rng);
        total += id_log_ratio_term(links[i].llr(y), pc);
      }
      if (sign_of(total) != x) ++local;
    }
    errors[static_cast<std::size_t>(worker)] += local;
  });
  std::uint64_t total = 0;
  for (std::uint64_t e : errors) total += e;
  return static_cast<double>(total) / static_cast<double>(samples);
}

bool exact_ber_supported(const SimConfig& c) {
  try {
    validate(c);
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (c.mode != FadingMode::known_csi) return false;
  if (c.csi_redraw != CsiRedraw::per_campaign) return false;
  if (c.hops > 2 || c.nodes_per_group > 2) return false;
  if (c.detector == DetectorKind::full_map && c.scheme != PmfSchemeKind::mcs)
    return false;
  return true;
}

double exact_ber_small(const SimConfig& c) {
  return exact_ber_small(c, build_network(c));
}

double exact_ber_small(const SimConfig& c, const NetworkTopology& topo) {
  validate(c);
  if (!exact_ber_supported(c))
    throw std::invalid_argument(
        "exact_ber_small needs known CSI with a per-campaign grid, "
        "hops <= 2 and nodes_per_group <= 2");
  const PmfPipeline pipe = (needs_joints(c) || needs_marginals(c))
                               ? build_pipeline(c, topo, 1)
                               : PmfPipeline{};
  return detail::exact_ber_impl(c, topo, pipe);
}

SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig c = base;
  const auto as_int = [&](const char* what) {
    const double r = std::round(value);
    if (std::abs(value - r) > 1e-9)
      throw std::invalid_argument(std::string(what) +
                                  " sweep values must be integers");
    return static_cast<int>(r);
  };
  switch (axis) {
    case SweepAxis::none:
      break;
    case SweepAxis::hops:
      c.hops = as_int("hops");
      break;
    case SweepAxis::snr_db:
      c.snr_db = value;
      break;
    case SweepAxis::group_size:
      c.nodes_per_group = as_int("group_size");
      break;
    case SweepAxis::quant_bits: {
      const int bits = as_int("quant_bits");
      if (c.detector != DetectorKind::id)
        throw std::invalid_argument(
            "quant_bits sweeps apply to detector 'id'");
      if (bits == 0) {
        c.scheme = PmfSchemeKind::id_analytic;
        c.quant_bits = 0;
      } else {
        c.scheme = PmfSchemeKind::id_quantized;
        c.quant_bits = bits;
      }
      break;
    }
  }
  return c;
}

std::vector<ResultRow> sweep(const std::string& experiment,
                             const SimConfig& base, SweepAxis axis,
                             std::span<const double> values, int threads) {
  std::vector<ResultRow> rows;
  const std::vector<double> single{0.0};
  std::span<const double> points =
      axis == SweepAxis::none ? std::span<const double>(single) : values;
  rows.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    SimConfig c = axis == SweepAxis::none ? base
                                          : apply_axis(base, axis, points[i]);
    c.seed = Rng::derive_seed(base.seed, i);
    validate(c);
    const BerEstimate est = simulate_ber(c, threads);
    ResultRow row;
    row.experiment = experiment;
    row.topology = c.topology;
    row.detector = to_string(c.detector);
    row.pmf_scheme = to_string(c.scheme);
    row.mode = c.mode;
    row.snr_db = c.snr_db;
    row.hops = c.hops;
    row.nodes_per_group = c.nodes_per_group;
    row.quant_bits = c.quant_bits;
    row.trials = est.trials;
    row.errors = est.errors;
    row.ber = est.ber;
    row.ci95 = est.ci95_halfwidth;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace relaysim
