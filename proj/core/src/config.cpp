#include "relaysim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relaysim {

namespace {

using nlohmann::json;

const std::set<std::string> kExperimentKeys = {
    "name",        "topology",    "hops",
    "nodes_per_group", "mode",    "snr_db",
    "detector",    "pmf_scheme",  "quant_bits",
    "n_f",         "trials",      "seed",
    "mcs_samples", "pilots",      "recursion_samples",
    "csi_redraw",  "sweep"};

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

template <class T>
T get_field(const json& j, const std::string& where, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(where, "bad value for key '" + key + "' (" + e.what() + ")");
  }
}

template <class T>
T get_or(const json& j, const std::string& where, const std::string& key,
         T fallback) {
  if (!j.contains(key)) return fallback;
  return get_field<T>(j, where, key);
}

TopologyKind parse_topology(const std::string& s, const std::string& where) {
  if (s == "mesh") return TopologyKind::mesh;
  if (s == "multihop") return TopologyKind::multihop;
  fail(where, "topology must be 'mesh' or 'multihop', got '" + s + "'");
}

FadingMode parse_mode(const std::string& s, const std::string& where) {
  if (s == "known_csi") return FadingMode::known_csi;
  if (s == "known_stats") return FadingMode::known_stats;
  fail(where, "mode must be 'known_csi' or 'known_stats', got '" + s + "'");
}

DetectorKind parse_detector(const std::string& s, const std::string& where) {
  if (s == "sign") return DetectorKind::first_group_sign;
  if (s == "full_map") return DetectorKind::full_map;
  if (s == "id") return DetectorKind::id;
  if (s == "pjp") return DetectorKind::pjp;
  if (s == "mrc") return DetectorKind::mrc;
  fail(where, "detector must be one of sign|full_map|id|pjp|mrc, got '" + s +
                  "'");
}

PmfSchemeKind parse_scheme(const std::string& s, const std::string& where) {
  if (s == "none") return PmfSchemeKind::none;
  if (s == "mcs") return PmfSchemeKind::mcs;
  if (s == "ps") return PmfSchemeKind::ps;
  if (s == "pjp") return PmfSchemeKind::pjp;
  if (s == "id") return PmfSchemeKind::id_analytic;
  if (s == "id_quantized") return PmfSchemeKind::id_quantized;
  fail(where,
       "pmf_scheme must be one of none|mcs|ps|pjp|id|id_quantized, got '" + s +
           "'");
}

CsiRedraw parse_redraw(const std::string& s, const std::string& where) {
  if (s == "per_trial") return CsiRedraw::per_trial;
  if (s == "per_campaign") return CsiRedraw::per_campaign;
  fail(where, "csi_redraw must be 'per_trial' or 'per_campaign', got '" + s +
                  "'");
}

SweepAxis parse_axis(const std::string& s, const std::string& where) {
  if (s == "hops") return SweepAxis::hops;
  if (s == "snr_db") return SweepAxis::snr_db;
  if (s == "quant_bits") return SweepAxis::quant_bits;
  if (s == "group_size") return SweepAxis::group_size;
  fail(where,
       "sweep axis must be one of hops|snr_db|quant_bits|group_size, got '" +
           s + "'");
}

PmfSchemeKind default_scheme(DetectorKind detector, const std::string& where) {
  switch (detector) {
    case DetectorKind::first_group_sign:
    case DetectorKind::mrc:
      return PmfSchemeKind::none;
    case DetectorKind::id:
      return PmfSchemeKind::id_analytic;
    case DetectorKind::pjp:
      return PmfSchemeKind::pjp;
    case DetectorKind::full_map:
      fail(where, "detector 'full_map' requires the key 'pmf_scheme' "
                  "('mcs' or 'ps')");
  }
  fail(where, "unreachable detector kind");
}

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

Experiment parse_experiment(const json& j, std::size_t position) {
  const std::string slot = "experiment #" + std::to_string(position + 1);
  if (!j.is_object()) fail(slot, "must be an object");
  for (const auto& item : j.items())
    if (!kExperimentKeys.contains(item.key()))
      fail(slot, "unknown key '" + item.key() + "'");
  for (const char* key :
       {"name", "topology", "hops", "nodes_per_group", "mode", "snr_db",
        "detector"})
    if (!j.contains(key)) fail(slot, std::string("missing key '") + key + "'");

  Experiment exp;
  exp.name = get_field<std::string>(j, slot, "name");
  if (!valid_name(exp.name))
    fail(slot, "name must match [A-Za-z0-9_.-]+, got '" + exp.name + "'");
  const std::string where = "experiment '" + exp.name + "'";

  SimConfig& c = exp.config;
  c.topology = parse_topology(get_field<std::string>(j, where, "topology"), where);
  c.hops = get_field<int>(j, where, "hops");
  c.nodes_per_group = get_field<int>(j, where, "nodes_per_group");
  c.mode = parse_mode(get_field<std::string>(j, where, "mode"), where);
  c.snr_db = get_field<double>(j, where, "snr_db");
  c.detector = parse_detector(get_field<std::string>(j, where, "detector"), where);
  c.scheme = j.contains("pmf_scheme")
                 ? parse_scheme(get_field<std::string>(j, where, "pmf_scheme"),
                                where)
                 : default_scheme(c.detector, where);
  c.quant_bits = get_or<int>(j, where, "quant_bits", 0);
  c.n_f = get_or<int>(j, where, "n_f", -1);
  c.trials = get_or<std::uint64_t>(j, where, "trials", 1'000'000);
  c.seed = get_or<std::uint64_t>(j, where, "seed", 0);
  c.mcs_samples = get_or<std::uint64_t>(j, where, "mcs_samples", 100'000);
  c.pilots = get_or<std::uint64_t>(j, where, "pilots", 10'000);
  c.recursion_samples =
      get_or<std::uint64_t>(j, where, "recursion_samples", 100'000);
  c.csi_redraw =
      j.contains("csi_redraw")
          ? parse_redraw(get_field<std::string>(j, where, "csi_redraw"), where)
          : CsiRedraw::per_trial;

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) fail(where, "sweep must be an object");
    for (const auto& item : s.items())
      if (item.key() != "axis" && item.key() != "values")
        fail(where, "unknown sweep key '" + item.key() + "'");
    if (!s.contains("axis")) fail(where, "sweep needs key 'axis'");
    exp.sweep.axis = parse_axis(get_field<std::string>(s, where, "axis"), where);
    if (s.contains("values")) {
      if (!s.at("values").is_array())
        fail(where, "sweep values must be an array of numbers");
      for (const auto& v : s.at("values")) {
        if (!v.is_number()) fail(where, "sweep values must be numbers");
        exp.sweep.values.push_back(v.get<double>());
      }
    }
  }

  try {
    if (exp.sweep.axis == SweepAxis::none) {
      validate(c);
    } else {
      // Every sweep point must be a valid campaign.
      for (double v : exp.sweep.values) validate(apply_axis(c, exp.sweep.axis, v));
      if (exp.sweep.values.empty()) validate(c);
    }
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  return exp;
}

std::vector<Experiment> parse_document(const json& doc,
                                       const std::string& origin) {
  if (!doc.is_object()) fail(origin, "top level must be an object");
  for (const auto& item : doc.items())
    if (item.key() != "schema_version" && item.key() != "experiments")
      fail(origin, "unknown top-level key '" + item.key() + "'");
  if (!doc.contains("schema_version"))
    fail(origin, "missing key 'schema_version'");
  if (!doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != 1)
    fail(origin, "schema_version must be 1");
  if (!doc.contains("experiments") || !doc.at("experiments").is_array())
    fail(origin, "missing array 'experiments'");

  std::vector<Experiment> result;
  std::set<std::string> names;
  const auto& arr = doc.at("experiments");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Experiment exp = parse_experiment(arr[i], i);
    if (!names.insert(exp.name).second)
      fail(origin, "duplicate experiment name '" + exp.name + "'");
    result.push_back(std::move(exp));
  }
  return result;
}

}  // namespace

std::vector<Experiment> parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

std::vector<Experiment> parse_config_text(const std::string& text,
                                          const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return parse_document(doc, origin);
}

std::string serialize_config(const std::vector<Experiment>& experiments) {
  json arr = json::array();
  for (const Experiment& exp : experiments) {
    const SimConfig& c = exp.config;
    json j{{"name", exp.name},
           {"topology", to_string(c.topology)},
           {"hops", c.hops},
           {"nodes_per_group", c.nodes_per_group},
           {"mode", to_string(c.mode)},
           {"snr_db", c.snr_db},
           {"detector", to_string(c.detector)},
           {"trials", c.trials},
           {"seed", c.seed},
           {"mcs_samples", c.mcs_samples},
           {"pilots", c.pilots},
           {"recursion_samples", c.recursion_samples},
           {"csi_redraw", to_string(c.csi_redraw)}};
    if (c.scheme != PmfSchemeKind::none) j["pmf_scheme"] = to_string(c.scheme);
    if (c.quant_bits != 0) j["quant_bits"] = c.quant_bits;
    if (c.n_f != -1) j["n_f"] = c.n_f;
    if (exp.sweep.axis != SweepAxis::none) {
      j["sweep"] = json{{"axis", to_string(exp.sweep.axis)},
                        {"values", exp.sweep.values}};
    }
    arr.push_back(std::move(j));
  }
  const json doc{{"schema_version", 1}, {"experiments", std::move(arr)}};
  return doc.dump(2) + "\n";
}

}  // namespace relaysim
