#include "relaysim/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relaysim/config.hpp"
#include "relaysim/csv.hpp"
#include "relaysim/version.hpp"

namespace relaysim {

namespace {

int env_threads() {
  const char* env = std::getenv("RELAYSIM_THREADS");
  if (env == nullptr) return 0;
  const int n = std::atoi(env);
  return n > 0 ? n : 0;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<Experiment> load_and_filter(const std::string& config_path,
                                        const std::string& only) {
  std::vector<Experiment> experiments = parse_config(config_path);
  if (only.empty()) return experiments;
  std::vector<Experiment> filtered;
  for (Experiment& exp : experiments)
    if (exp.name == only) filtered.push_back(std::move(exp));
  if (filtered.empty())
    throw ConfigError("no experiment named '" + only + "' in " + config_path);
  return filtered;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_simulate(const std::string& config_path, const std::string& only,
                 const std::string& out_dir, int threads, long long seed) {
  std::vector<Experiment> experiments = load_and_filter(config_path, only);
  const auto start = std::chrono::steady_clock::now();
  std::vector<ExperimentResults> results;
  std::uint64_t manifest_seed = 0;
  bool have_seed = false;
  for (Experiment& exp : experiments) {
    if (seed >= 0) exp.config.seed = static_cast<std::uint64_t>(seed);
    if (!have_seed) {
      manifest_seed = exp.config.seed;
      have_seed = true;
    }
    ExperimentResults res;
    res.name = exp.name;
    res.rows = sweep(exp.name, exp.config, exp.sweep.axis, exp.sweep.values,
                     threads);
    for (const ResultRow& row : res.rows)
      std::cout << format_row(row) << '\n';
    results.push_back(std::move(res));
  }
  emit_results(results, out_dir);
  RunManifest manifest;
  manifest.seed = manifest_seed;
  manifest.config_hash = fnv1a_hex(read_file(config_path));
  manifest.tool_version = RELAYSIM_VERSION;
  manifest.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  manifest.created_utc = utc_now();
  write_manifest(manifest, out_dir);
  return 0;
}

int cmd_pmf(const std::string& config_path, const std::string& only,
            int threads) {
  std::vector<Experiment> experiments = load_and_filter(config_path, only);
  std::cout << "experiment,group,kind,index,value\n";
  for (const Experiment& exp : experiments) {
    const SimConfig& c = exp.config;
    if (c.scheme == PmfSchemeKind::none) {
      std::cerr << "note: experiment '" << exp.name << "' (detector "
                << to_string(c.detector) << ") exchanges no probabilities\n";
      continue;
    }
    const NetworkTopology topo = build_network(c);
    const PmfPipeline pipe = build_pipeline(c, topo, threads);
    char value[64];
    for (std::size_t g = 0; g < pipe.joints.size(); ++g) {
      const JointPmf& pmf = pipe.joints[g];
      for (std::size_t k = 0; k < pmf.size(); ++k) {
        std::snprintf(value, sizeof(value), "%.6g", pmf[k]);
        std::cout << exp.name << ',' << g + 1 << ",joint," << k << ','
                  << value << '\n';
      }
    }
    for (std::size_t g = 0; g < pipe.marginals.size(); ++g) {
      const MarginalSet& m = pipe.marginals[g];
      for (std::size_t i = 0; i < m.p_correct.size(); ++i) {
        std::snprintf(value, sizeof(value), "%.6g", m.p_correct[i]);
        std::cout << exp.name << ',' << g + 1 << ",marginal," << i << ','
                  << value << '\n';
      }
    }
  }
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& only,
               int threads) {
  std::vector<Experiment> experiments = load_and_filter(config_path, only);
  bool all_ok = true;
  for (const Experiment& exp : experiments) {
    if (!exact_ber_supported(exp.config)) {
      std::cout << exp.name << ": skipped (instance not enumerable: needs "
                << "known CSI, per-campaign grid, hops <= 2, group size <= 2)\n";
      continue;
    }
    const double exact = exact_ber_small(exp.config);
    const BerEstimate sim = simulate_ber(exp.config, threads);
    const double se = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) /
                                static_cast<double>(sim.trials));
    const double diff = std::abs(sim.ber - exact);
    const bool ok = diff <= 3.0 * se;
    all_ok = all_ok && ok;
    std::printf("%s: exact=%.6g sim=%.6g |diff|=%.3g 3se=%.3g %s\n",
                exp.name.c_str(), exact, sim.ber, diff, 3.0 * se,
                ok ? "OK" : "MISMATCH");
  }
  return all_ok ? 0 : 2;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"decode-and-forward relay network BER simulator"};
  app.set_version_flag("--version", RELAYSIM_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string experiment;
  std::string out_dir = "results";
  int threads = 0;
  long long seed_override = -1;

  CLI::App* simulate = app.add_subcommand("simulate", "run campaigns, write CSVs");
  simulate->add_option("config", config_path, "experiment file")->required();
  simulate->add_option("--experiment", experiment, "run only this experiment");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_option("--threads", threads, "worker threads (0 = hardware)");
  simulate->add_option("--seed", seed_override, "override the base seed");

  CLI::App* pmf = app.add_subcommand("pmf", "print estimated pipelines");
  pmf->add_option("config", config_path, "experiment file")->required();
  pmf->add_option("--experiment", experiment, "only this experiment");
  pmf->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "schema check only");
  validate_cmd->add_option("config", config_path, "experiment file")->required();

  CLI::App* oracle = app.add_subcommand("oracle", "compare against exact BER");
  oracle->add_option("config", config_path, "experiment file")->required();
  oracle->add_option("--experiment", experiment, "only this experiment");
  oracle->add_option("--threads", threads, "worker threads (0 = hardware)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << RELAYSIM_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  if (threads == 0) threads = env_threads();

  try {
    if (simulate->parsed())
      return cmd_simulate(config_path, experiment, out_dir, threads,
                          seed_override);
    if (pmf->parsed()) return cmd_pmf(config_path, experiment, threads);
    if (validate_cmd->parsed()) {
      parse_config(config_path);
      return 0;
    }
    if (oracle->parsed()) return cmd_oracle(config_path, experiment, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace relaysim
