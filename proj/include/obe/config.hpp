#pragma once

// Run configuration: JSON schema with strict unknown-key rejection, plus
// deterministic result serialization.

#include <json.hpp>
#include <zlib.h>

#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obe/basis.hpp"
#include "obe/matel.hpp"
#include "obe/systems.hpp"

namespace obe {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScaleMode { fixed, optimize, optimize_at };

struct VariationalSpec {
  ScaleMode mode = ScaleMode::optimize;
  double a = 0.0;           // fixed mode
  double a_min = 0.0;       // 0 = use the system default window
  double a_max = 0.0;
  int optimize_at_q = -1;   // optimize_at mode: freeze a from this basis size
  double tolerance = 1e-4;  // absolute tolerance on a
  int states = 1;           // eigenpairs to report
};

struct RunConfig {
  SystemConfig system;
  std::string system_name;  // empty for fully explicit systems
  double a_low = 0.5, a_high = 5.0;
  SectorSpec sector;
  VariationalSpec variational;
  std::string tables_path;
  std::string output_path;
};

namespace detail {

inline void reject_unknown(const json& obj, const char* where,
                           std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
  }
}

inline RadialKernel parse_kernel(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError("kernel: missing 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian") {
    reject_unknown(j, "gaussian kernel", {"type", "amplitude", "range"});
    const double r = j.at("range").get<double>();
    if (r <= 0.0) throw ConfigError("gaussian kernel: range must be positive");
    return GaussianKernel{j.at("amplitude").get<double>(), 1.0 / (r * r)};
  }
  if (type == "power") {
    reject_unknown(j, "power kernel", {"type", "amplitude", "exponent"});
    return PowerKernel{j.at("amplitude").get<double>(), j.at("exponent").get<double>()};
  }
  if (type == "sqrt_shifted") {
    reject_unknown(j, "sqrt_shifted kernel", {"type", "shift"});
    return SqrtShiftedKernel{j.at("shift").get<double>()};
  }
  throw ConfigError("kernel: unknown type '" + type + "'");
}

inline std::vector<RadialKernel> parse_kernel_list(const json& j, const char* where) {
  if (!j.is_array()) throw ConfigError(std::string(where) + ": expected an array of kernels");
  std::vector<RadialKernel> out;
  for (const json& k : j) out.push_back(parse_kernel(k));
  return out;
}

}  // namespace detail

inline RunConfig parse_run_config(const json& root) {
  detail::reject_unknown(root, "config",
                         {"system", "sector", "basis", "variational", "output", "tables"});
  RunConfig rc;

  if (!root.contains("system")) throw ConfigError("config: missing 'system'");
  const json& sys = root.at("system");
  detail::reject_unknown(sys, "system",
                         {"name", "masses", "kinematics", "potentials", "pairs_equal"});
  if (sys.contains("name")) {
    const NamedSystem named = named_system(sys.at("name").get<std::string>());
    rc.system = named.cfg;
    rc.system_name = named.name;
    rc.a_low = named.a_low;
    rc.a_high = named.a_high;
  }
  if (sys.contains("masses")) {
    const auto m = sys.at("masses").get<std::vector<double>>();
    if (m.size() != 3) throw ConfigError("system.masses: expected exactly 3 entries");
    rc.system.m1 = m[0];
    rc.system.m2 = m[1];
    rc.system.m3 = m[2];
  }
  if (sys.contains("kinematics")) {
    const std::string k = sys.at("kinematics").get<std::string>();
    if (k == "nonrelativistic")
      rc.system.kinematics = Kinematics::nonrelativistic;
    else if (k == "semirelativistic")
      rc.system.kinematics = Kinematics::semirelativistic;
    else
      throw ConfigError("system.kinematics: expected 'nonrelativistic' or 'semirelativistic'");
  }
  if (sys.contains("potentials")) {
    const json& pot = sys.at("potentials");
    detail::reject_unknown(pot, "system.potentials", {"v12", "v13", "v23", "three_body"});
    if (pot.contains("v12")) rc.system.v12 = detail::parse_kernel_list(pot.at("v12"), "v12");
    if (pot.contains("v13")) rc.system.v13 = detail::parse_kernel_list(pot.at("v13"), "v13");
    if (pot.contains("v23")) rc.system.v23 = detail::parse_kernel_list(pot.at("v23"), "v23");
    if (pot.contains("three_body"))
      rc.system.three_body = detail::parse_kernel_list(pot.at("three_body"), "three_body");
  }
  if (sys.contains("pairs_equal")) rc.system.pairs_equal = sys.at("pairs_equal").get<bool>();
  try {
    rc.system.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (!root.contains("sector")) throw ConfigError("config: missing 'sector'");
  const json& sec = root.at("sector");
  detail::reject_unknown(sec, "sector", {"L", "parity", "symmetry", "exchange"});
  rc.sector.L = sec.value("L", 0);
  rc.sector.parity = sec.value("parity", +1);
  rc.sector.sigma = sec.value("symmetry", +1);
  if (rc.sector.L < 0) throw ConfigError("sector.L: must be >= 0");
  if (rc.sector.parity != 1 && rc.sector.parity != -1)
    throw ConfigError("sector.parity: must be +1 or -1");
  if (rc.sector.sigma != 1 && rc.sector.sigma != -1)
    throw ConfigError("sector.symmetry: must be +1 or -1");
  const std::string ex = sec.value("exchange", "three_identical");
  if (ex == "three_identical")
    rc.sector.exchange = Exchange::three_identical;
  else if (ex == "two_identical")
    rc.sector.exchange = Exchange::two_identical;
  else if (ex == "none")
    rc.sector.exchange = Exchange::none;
  else
    throw ConfigError("sector.exchange: expected 'none', 'two_identical' or 'three_identical'");

  if (!root.contains("basis")) throw ConfigError("config: missing 'basis'");
  const json& bas = root.at("basis");
  detail::reject_unknown(bas, "basis", {"qmax"});
  if (!bas.contains("qmax")) throw ConfigError("basis: missing 'qmax'");
  rc.sector.qmax = bas.at("qmax").get<int>();
  if (rc.sector.qmax < 0) throw ConfigError("basis.qmax: must be >= 0");

  if (root.contains("variational")) {
    const json& var = root.at("variational");
    detail::reject_unknown(
        var, "variational",
        {"mode", "a", "a_min", "a_max", "optimize_at_q", "tolerance", "states"});
    const std::string mode = var.value("mode", "optimize");
    if (mode == "fixed")
      rc.variational.mode = ScaleMode::fixed;
    else if (mode == "optimize")
      rc.variational.mode = ScaleMode::optimize;
    else if (mode == "optimize_at")
      rc.variational.mode = ScaleMode::optimize_at;
    else
      throw ConfigError("variational.mode: expected 'fixed', 'optimize' or 'optimize_at'");
    rc.variational.a = var.value("a", 0.0);
    rc.variational.a_min = var.value("a_min", 0.0);
    rc.variational.a_max = var.value("a_max", 0.0);
    rc.variational.optimize_at_q = var.value("optimize_at_q", -1);
    rc.variational.tolerance = var.value("tolerance", 1e-4);
    rc.variational.states = var.value("states", 1);
    if (rc.variational.mode == ScaleMode::fixed && !(rc.variational.a > 0.0))
      throw ConfigError("variational: fixed mode requires a > 0");
    if (rc.variational.mode == ScaleMode::optimize_at && rc.variational.optimize_at_q < 0)
      throw ConfigError("variational: optimize_at mode requires optimize_at_q >= 0");
    if (rc.variational.states < 1) throw ConfigError("variational.states: must be >= 1");
  }
  if (rc.variational.a_min > 0.0) rc.a_low = rc.variational.a_min;
  if (rc.variational.a_max > 0.0) rc.a_high = rc.variational.a_max;

  if (root.contains("tables")) {
    const json& tab = root.at("tables");
    detail::reject_unknown(tab, "tables", {"path"});
    rc.tables_path = tab.value("path", "");
  }
  if (root.contains("output")) {
    const json& out = root.at("output");
    detail::reject_unknown(out, "output", {"path", "format"});
    rc.output_path = out.value("path", "");
    const std::string fmt = out.value("format", "json");
    if (fmt != "json") throw ConfigError("output.format: only 'json' is supported");
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  json root;
  try {
    root = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return parse_run_config(root);
}

// CRC32 of the canonical (sorted-key, compact) dump; stable across runs.
inline std::uint32_t config_hash(const json& root) {
  const std::string s = root.dump();
  return ::crc32(0, reinterpret_cast<const Bytef*>(s.data()), uInt(s.size()));
}

}  // namespace obe
