#include "config.hpp"

#include "qplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace qplab::cli {

namespace {

const char* kModule = "cli";

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::validation, kModule, path + ": " + what);
}

ParamDef R(std::string n, double d, std::string h) { return {std::move(n), ParamType::real, d, std::move(h)}; }
ParamDef I(std::string n, long long d, std::string h) { return {std::move(n), ParamType::integer, d, std::move(h)}; }
ParamDef T(std::string n, std::string d, std::string h) { return {std::move(n), ParamType::text, d, std::move(h)}; }

std::vector<ParamDef> shared() {
  return {I("seed", 1, "deterministic seed"),
          I("threads", 0, "data-parallel width (0: hardware)"),
          T("out_dir", "", "artifact directory (default: $QPLAB_OUT_DIR or .)"),
          T("out", "", "artifact basename (default: command name)")};
}

ParamDef alpha() { return T("alpha", "golden", "frequency: golden, sqrt2m1, p/q or decimal"); }
ParamDef amo(double l) { return R("amo", l, "almost Mathieu coupling lambda, V = 2 lambda cos 2 pi theta"); }
ParamDef energy() { return R("energy", 0, "energy E"); }

std::vector<CommandDef> build() {
  std::vector<CommandDef> c = {
      {"cf", "continued fraction expansion and bridge selection",
       {alpha(), I("depth", 12, "expansion depth"), R("A", 25, "bridge constant")}},
      {"dioph", "Diophantine check up to K",
       {alpha(), T("mode", "frequency", "frequency or rotation"), R("v", 0.1, "frequency constant"),
        R("rho", 0.25, "rotation number"), R("gamma", 0.1, "rotation constant"), R("tau", 2, "exponent"),
        I("K", 10000, "largest |k|"), I("depth", 40, "expansion depth")}},
      {"norms", "modulus constants, Lambda/Gamma table and norms of a random series",
       {T("modulus", "analytic", "analytic, gevrey or power"), R("param", 0.7, "Gevrey nu or power delta"),
        R("r", 0.1, "norm radius"), I("K", 16, "bandwidth of the random series"), R("y_max", 1e6, "table range"),
        I("points", 25, "table rows")}},
      {"lyapunov", "finite Lyapunov exponents L_n",
       {amo(3), energy(), alpha(), I("n_max", 10000, "largest n (powers of ten)"), I("grid", 64, "theta grid")}},
      {"rotnum", "fibered rotation number over an energy range",
       {amo(1), alpha(), R("e_min", -3.5, "lowest energy"), R("e_max", 3.5, "highest energy"),
        I("points", 71, "energies"), I("n", 20000, "iterations"), T("estimator", "weighted", "plain or weighted")}},
      {"renorm", "renormalized iterates and their commutation residual",
       {amo(1), energy(), alpha(), I("level", 3, "renormalization level"), R("theta", 0, "base point"),
        I("samples", 64, "sample points")}},
      {"cohom", "cohomological equation on a random right-hand side",
       {alpha(), I("K", 16, "bandwidth"), I("level", 6, "Q = q_level"), R("eps", 1e-3, "size of g")}},
      {"kam-step", "one KAM step from a random perturbation",
       {alpha(), R("rho", 0.25, "rotation number"), R("eps", 1e-3, "perturbation size"), I("K", 12, "bandwidth")}},
      {"kam-run", "KAM driver; JSONL ledger",
       {alpha(), R("rho", 0.25, "rotation number"), R("eps", 1e-3, "perturbation size"), I("K", 12, "bandwidth"),
        I("steps", 3, "KAM steps"), I("rotation_iterations", 20000, "rotation-number iterations")}},
      {"spectrum", "bands of the p/q approximant at one phase",
       {amo(0.5), I("p", 1, "numerator"), I("q", 3, "denominator"), R("theta", 0, "phase")}},
      {"sminus", "S_- and S_+ of the p/q approximant",
       {amo(0.5), I("p", 1, "numerator"), I("q", 3, "denominator"), I("theta_points", 32, "phase grid")}},
      {"ids", "integrated density of states of the p/q approximant",
       {amo(0.5), I("p", 1, "numerator"), I("q", 3, "denominator"), R("e_min", -3.5, "lowest energy"),
        R("e_max", 3.5, "highest energy"), I("points", 201, "energies"), I("theta_points", 16, "phase grid")}},
      {"chambers", "deviation of the discriminant from its mean along convergents",
       {amo(0.5), alpha(), energy(), I("levels", 4, "convergents"), I("q_min", 3, "first denominator"),
        I("grid", 64, "phase grid")}},
      {"fejer", "Fejer kernel coefficients", {I("R", 10, "length"), I("power", 2, "power p")}},
      {"ldt", "large deviation measure along convergents",
       {amo(3), energy(), alpha(), I("q_min", 13, "first denominator"), I("levels", 3, "convergents"),
        R("kappa", 0.02, "deviation"), I("grid", 8192, "phase grid"), R("c_ref", 1, "reference decay constant")}},
      {"avalanche", "avalanche principle on transfer blocks",
       {amo(3), energy(), alpha(), I("N", 20, "block length"), I("n", 8, "blocks"), R("log_mu", 10, "ln mu"),
        I("trials", 100, "random phases")}},
      {"seqs", "induction sequences in the log domain",
       {alpha(), T("q0", "89", "first denominator"), I("s_max", 6, "deepest s"), R("c", 0.5, "decay constant"),
        I("depth", 3000, "expansion cap")}},
      {"last-diff", "symmetric difference of S_- between consecutive convergents",
       {amo(0.5), alpha(), I("n_min", 4, "first index"), I("n_max", 7, "last index"), I("theta_points", 32, "phase grid")}},
  };
  for (auto& d : c) {
    auto s = shared();
    d.params.insert(d.params.end(), s.begin(), s.end());
  }
  return c;
}

const ParamDef& param(const CommandDef& d, const std::string& key, const std::string& path) {
  for (const auto& p : d.params)
    if (p.name == key) return p;
  invalid(path, "unknown field for command '" + d.name + "'");
}

Json checked(const ParamDef& p, const Json& v, const std::string& path) {
  switch (p.type) {
    case ParamType::real:
      if (v.is_null()) return NAN;
      if (v.is_number()) return v.get<double>();
      if (v.is_string()) return io::parse_double(v.get<std::string>());
      invalid(path, "expected a number");
    case ParamType::integer:
      if (v.is_number_integer()) return v.get<long long>();
      if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>()) return static_cast<long long>(v.get<double>());
      invalid(path, "expected an integer");
    case ParamType::text:
      if (v.is_string()) return v;
      invalid(path, "expected a string");
  }
  invalid(path, "bad type");
}

}  // namespace

const std::vector<CommandDef>& command_defs() {
  static const std::vector<CommandDef> defs = build();
  return defs;
}

const CommandDef& command_def(const std::string& name) {
  for (const auto& d : command_defs())
    if (d.name == name) return d;
  invalid("command", "unknown command '" + name + "'");
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

double ExperimentConfig::real(const std::string& key) const { return values.at(key).get<double>(); }
long long ExperimentConfig::integer(const std::string& key) const { return values.at(key).get<long long>(); }
std::string ExperimentConfig::text(const std::string& key) const { return values.at(key).get<std::string>(); }

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = command;
  for (auto it = values.begin(); it != values.end(); ++it) j[it.key()] = it.value();
  return j;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  for (const auto& p : command_def(command).params) c.values[p.name] = p.def;
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const Json& j, const std::string& command) {
  if (!j.is_object()) invalid("config", "expected a JSON object");
  if (j.contains("command") && j.at("command") != command)
    invalid("config.command", "file is for '" + j.at("command").dump() + "', running '" + command + "'");
  auto c = defaults(command);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "command") c.set(it.key(), it.value());
  return c;
}

void ExperimentConfig::set(const std::string& key, const Json& value) {
  std::string path = "config." + key;
  values[key] = checked(param(command_def(command), key, path), value, path);
}

void ExperimentConfig::set_raw(const std::string& key, const std::string& raw) {
  const auto& p = param(command_def(command), key, flag_name(key));
  if (p.type == ParamType::text) {
    values[key] = raw;
    return;
  }
  if (p.type == ParamType::integer) {
    char* end = nullptr;
    long long v = std::strtoll(raw.c_str(), &end, 10);
    if (raw.empty() || *end != '\0') invalid(flag_name(key), "expected an integer, got '" + raw + "'");
    values[key] = v;
    return;
  }
  try {
    values[key] = io::parse_double(raw);
  } catch (const Error&) {
    invalid(flag_name(key), "expected a number, got '" + raw + "'");
  }
}

}  // namespace qplab::cli
