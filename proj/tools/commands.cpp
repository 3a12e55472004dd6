#include "commands.hpp"

#include "qplab/cocycle.hpp"
#include "qplab/contfrac.hpp"
#include "qplab/error.hpp"
#include "qplab/kam.hpp"
#include "qplab/ldt.hpp"
#include "qplab/modulus.hpp"
#include "qplab/norms.hpp"
#include "qplab/parallel.hpp"
#include "qplab/serialize.hpp"
#include "qplab/spectra.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>

namespace qplab::cli {

namespace fs = std::filesystem;
using io::Column;
using io::CsvWriter;
using io::number;

namespace {

const char* kModule = "cli";

class Sink {
public:
  Sink(const ExperimentConfig& cfg, RunResult& res) : res_(res) {
    std::string d = cfg.text("out_dir");
    if (d.empty()) {
      const char* env = std::getenv("QPLAB_OUT_DIR");
      d = env && *env ? env : ".";
    }
    dir_ = d;
    base_ = cfg.text("out").empty() ? cfg.command : cfg.text("out");
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::invalid_argument, kModule, "cannot create " + dir_.string() + ": " + ec.message());
  }

  std::ofstream open(const std::string& ext) {
    fs::path p = dir_ / (base_ + "." + ext);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorCode::invalid_argument, kModule, "cannot write " + p.string());
    res_.artifacts.push_back(p.string());
    return f;
  }

  void json(const std::string& ext, const io::Json& j) { open(ext) << j.dump(2) << '\n'; }

private:
  RunResult& res_;
  fs::path dir_;
  std::string base_;
};

long long to_ll(const cf::BigInt& x) {
  if (x > cf::BigInt(std::numeric_limits<long long>::max()))
    throw Error(ErrorCode::index_out_of_range, kModule, "denominator exceeds 64 bits");
  return static_cast<long long>(x);
}

int to_int(long long x, const std::string& what) {
  if (x < 0 || x > std::numeric_limits<int>::max())
    throw Error(ErrorCode::invalid_argument, kModule, what + " out of range");
  return static_cast<int>(x);
}

// convergents p_n/q_n with q_n >= q_min, `count` of them
std::vector<int> convergent_indices(const cf::CfExpansion& e, long long q_min, long long count) {
  std::vector<int> out;
  for (int n = 1; n <= e.depth() && static_cast<long long>(out.size()) < count; ++n)
    if (e.q[n] >= q_min) out.push_back(n);
  if (static_cast<long long>(out.size()) < count)
    throw Error(ErrorCode::cf_exhausted, kModule, "not enough convergents above q_min");
  return out;
}

// real series with |c_k| ~ e^{-|k|}, scaled to sup-coefficient-sum eps
ud::FourierSeries random_real_series(int K, double eps, unsigned long long seed, bool zero_mean) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  ud::FourierSeries f(K, true);
  for (int k = 0; k <= K; ++k) {
    cplx c = k == 0 ? cplx(zero_mean ? 0 : g(rng), 0) : cplx(g(rng), g(rng));
    c *= std::exp(-static_cast<double>(k));
    f.at(k) = c;
    if (k) f.at(-k) = std::conj(c);
  }
  double l1 = f.l1();
  return l1 > 0 ? f * cplx(eps / l1) : f;
}

ud::Modulus modulus(const std::string& name, double param) {
  if (name == "analytic") return ud::Modulus::make_analytic();
  if (name == "gevrey") return ud::Modulus::make_gevrey(param);
  if (name == "power") return ud::Modulus::make_power(param);
  throw Error(ErrorCode::validation, kModule, "--modulus: expected analytic, gevrey or power");
}

// R_rho e^{F}, F a random sl(2,R) perturbation of the given size
cocycle::QpCocycle perturbed_rotation(const ExperimentConfig& cfg, double alpha) {
  ud::NormSpec spec;
  int K = to_int(cfg.integer("K"), "--K");
  auto F = kam::random_perturbation(K, cfg.real("eps"), cfg.integer("seed"), spec);
  int Kw = std::max(64, 4 * K);
  auto A = ud::exp_map(F, Kw);
  auto R = ud::MatSeries::constant(Mat2c(Sl2Mat::rotation(cfg.real("rho"))));
  return cocycle::from_series(ud::mul(R, A, Kw), alpha);
}

void cmd_cf(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto e = cf::expand(cf::parse_alpha(cfg.text("alpha")), to_int(cfg.integer("depth"), "--depth"));
  auto sel = cf::select_bridges(e, cfg.real("A"));
  auto inv = cf::check_bridge_invariants(e, sel);
  io::Json j;
  j["expansion"] = io::to_json(e);
  j["selection"] = io::to_json(sel);
  j["invariants_ok"] = inv.ok;
  j["invariant_failures"] = inv.failures;
  out.json("json", j);
  if (!inv.ok) throw Error(ErrorCode::selection_failed, "contfrac", inv.failures.front());
}

void cmd_dioph(const ExperimentConfig& cfg, Sink& out, RunResult& res) {
  auto e = cf::expand_max(cf::parse_alpha(cfg.text("alpha")), to_int(cfg.integer("depth"), "--depth"));
  cf::DiophantineMode m;
  std::string mode = cfg.text("mode");
  if (mode == "frequency") m.kind = cf::DiophantineMode::frequency;
  else if (mode == "rotation") m.kind = cf::DiophantineMode::rotation;
  else throw Error(ErrorCode::validation, kModule, "--mode: expected frequency or rotation");
  m.v = cfg.real("v");
  m.rho = cfg.real("rho");
  m.gamma = cfg.real("gamma");
  m.tau = cfg.real("tau");
  auto r = cf::check_diophantine(e, m, cfg.integer("K"));
  io::Json j;
  j["mode"] = mode;
  j["K"] = cfg.integer("K");
  j["holds"] = r.holds;
  j["worst_k"] = r.worst_k;
  j["worst_margin"] = number(r.worst_margin);
  out.json("json", j);
  if (!r.holds) {
    res.exit_code = 2;
    res.note = "Diophantine condition fails at k = " + std::to_string(r.worst_k);
  }
}

void cmd_norms(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto M = modulus(cfg.text("modulus"), cfg.real("param"));
  long long pts = cfg.integer("points");
  double y_max = cfg.real("y_max");
  if (pts < 2 || !(y_max > 10)) throw Error(ErrorCode::validation, kModule, "--points/--y-max: need points >= 2, y_max > 10");
  {
    auto f = out.open("csv");
    CsvWriter w(f, {{"y"}, {"Lambda"}, {"s_of_y"}, {"Gamma"}});
    for (long long i = 0; i < pts; ++i) {
      double ln_y = std::log(10.0) + (std::log(y_max) - std::log(10.0)) * i / (pts - 1);
      auto L = ud::lambda_log(M, ln_y);
      w.row({std::exp(ln_y), L.value, L.argmax, ud::gamma_log(M, ln_y)});
    }
  }
  double r = cfg.real("r");
  auto f = random_real_series(to_int(cfg.integer("K"), "--K"), 1.0, cfg.integer("seed"), false);
  auto nm = ud::norm_mr(f, M, r);
  auto nl = ud::norm_lambda(f, M, r);
  auto hyp = ud::check_hypotheses(M);
  auto ca = ud::check_condition_a(M, 2, 1e5, 200, 200, cfg.integer("seed"));
  io::Json j;
  j["modulus"] = M.name();
  j["C_M"] = number(M.C_M());
  j["c_M"] = number(M.c_M());
  j["constants_stable"] = M.constants_stable();
  j["T1"] = number(ud::t1_threshold(M));
  j["hypotheses"] = {{"h1", hyp.h1}, {"h2", hyp.h2}, {"constants_stable", hyp.constants_stable}};
  j["condition_a"] = {{"growth", ca.growth},
                      {"monotone", ca.monotone},
                      {"increment", ca.increment},
                      {"worst_increment_margin", number(ca.worst_increment_margin)}};
  j["series"] = {{"K", f.K()},
                 {"l1", number(f.l1())},
                 {"norm_mr", number(nm.value)},
                 {"log_norm_mr", number(nm.log_value)},
                 {"argmax_s", nm.argmax_s},
                 {"cap_sufficient", nm.cap_sufficient},
                 {"norm_lambda", number(nl.value)},
                 {"ratio_mr_over_lambda", number(nm.value / nl.value)},
                 {"c_mr_from_lambda", number(ud::c_mr_from_lambda())}};
  out.json("json", j);
}

void cmd_lyapunov(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  double alpha = cf::parse_alpha(cfg.text("alpha")).to_double();
  auto c = cocycle::amo(cfg.real("amo"), cfg.real("energy"), alpha);
  int grid = to_int(cfg.integer("grid"), "--grid");
  auto f = out.open("csv");
  CsvWriter w(f, {{"n"}, {"L_n"}, {"lower_bound_ln_lambda"}});
  double lb = std::log(std::max(cfg.real("amo"), 1.0));
  for (long long n = 10; n <= cfg.integer("n_max"); n *= 10) w.row({n, cocycle::finite_lyapunov(c, n, grid), lb});
}

void cmd_rotnum(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  double alpha = cf::parse_alpha(cfg.text("alpha")).to_double();
  std::string est = cfg.text("estimator");
  cocycle::Estimator e;
  if (est == "plain") e = cocycle::Estimator::plain;
  else if (est == "weighted") e = cocycle::Estimator::weighted;
  else throw Error(ErrorCode::validation, kModule, "--estimator: expected plain or weighted");
  long long pts = cfg.integer("points");
  if (pts < 2) throw Error(ErrorCode::validation, kModule, "--points: need at least 2");
  std::vector<cocycle::RotationResult> rows(pts);
  double lo = cfg.real("e_min"), hi = cfg.real("e_max");
  parallel_for(pts, [&](long long i) {
    double E = lo + (hi - lo) * i / (pts - 1);
    rows[i] = cocycle::rotation_number(cocycle::amo(cfg.real("amo"), E, alpha), cfg.integer("n"), 0, 0, e);
  });
  auto f = out.open("csv");
  CsvWriter w(f, {{"E", "energy"}, {"rho"}, {"error_bar"}, {"ids_from_rho"}});
  for (long long i = 0; i < pts; ++i) {
    double E = lo + (hi - lo) * i / (pts - 1);
    w.row({E, rows[i].rho, rows[i].error_bar, 1 - 2 * rows[i].rho});
  }
}

void cmd_renorm(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto a = cf::parse_alpha(cfg.text("alpha"));
  auto e = cf::expand_max(a, 80);
  auto c = cocycle::amo(cfg.real("amo"), cfg.real("energy"), a.to_double());
  int level = to_int(cfg.integer("level"), "--level");
  auto r = cocycle::renorm_iterates(c, e, level, cfg.real("theta"));
  io::Json j;
  j["level"] = r.level;
  j["alpha_n"] = number(r.alpha_n);
  j["beta_prev"] = number(r.beta_prev);
  j["commutation_residual"] = number(cocycle::commutation_residual(r, to_int(cfg.integer("samples"), "--samples")));
  out.json("json", j);
}

void cmd_cohom(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto a = cf::parse_alpha(cfg.text("alpha"));
  auto e = cf::expand_max(a, 80);
  int level = to_int(cfg.integer("level"), "--level");
  if (level > e.depth()) throw Error(ErrorCode::cf_exhausted, "contfrac", "--level beyond the expansion");
  int Q = to_int(to_ll(e.q[level]), "q_level");
  auto g = random_real_series(to_int(cfg.integer("K"), "--K"), cfg.real("eps"), cfg.integer("seed"), false);
  auto r = kam::solve_cohomological(g, a.to_double(), Q);
  io::Json j;
  j["Q"] = Q;
  j["g_l1"] = number(g.l1());
  j["v_l1"] = number(r.v.l1());
  j["residual"] = number(r.residual);
  j["min_divisor"] = number(r.min_divisor);
  j["max_ratio"] = number(r.max_ratio);
  j["exact_bound_ok"] = r.exact_bound_ok;
  j["q_bound_ok"] = r.q_bound_ok;
  out.json("json", j);
}

io::Json driver_summary(const kam::DriverResult& r) {
  io::Json j;
  j["stop_reason"] = r.stop_reason;
  j["hypothesis_stop"] = r.hypothesis_stop;
  j["rho_initial"] = number(r.rho_initial);
  j["rho_initial_err"] = number(r.rho_initial_err);
  j["rho_final"] = number(r.rho_final);
  j["rho_final_err"] = number(r.rho_final_err);
  j["rho_drift"] = number(cocycle::circle_dist(r.rho_initial, r.rho_final));
  io::Json steps = io::Json::array();
  for (const auto& s : r.steps) steps.push_back(io::to_json(s));
  j["steps"] = steps;
  return j;
}

void run_driver(const ExperimentConfig& cfg, Sink& out, RunResult& res, int steps) {
  auto a = cf::parse_alpha(cfg.text("alpha"));
  auto e = cf::expand_max(a, 80);
  auto c = perturbed_rotation(cfg, a.to_double());
  kam::DriverOptions o;
  o.steps = steps;
  if (cfg.values.contains("rotation_iterations")) o.rotation_iterations = cfg.integer("rotation_iterations");
  auto r = kam::almost_reducibility_driver(c, cfg.real("rho"), e, o);
  std::vector<io::Json> lines;
  for (const auto& rec : r.ledger) lines.push_back(io::to_json(rec));
  {
    auto f = out.open("jsonl");
    io::write_jsonl(f, lines);
  }
  out.json("json", driver_summary(r));
  if (r.hypothesis_stop) {
    res.exit_code = 2;
    res.note = r.stop_reason;
  }
}

void cmd_kam_step(const ExperimentConfig& cfg, Sink& out, RunResult& res) { run_driver(cfg, out, res, 1); }

void cmd_kam_run(const ExperimentConfig& cfg, Sink& out, RunResult& res) {
  run_driver(cfg, out, res, to_int(cfg.integer("steps"), "--steps"));
}

void cmd_spectrum(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto V = cocycle::amo_potential(cfg.real("amo"));
  int p = to_int(cfg.integer("p"), "--p"), q = to_int(cfg.integer("q"), "--q");
  auto b = spectra::band_set(V, p, q, cfg.real("theta"));
  auto f = out.open("csv");
  CsvWriter w(f, {{"band"}, {"lo", "energy"}, {"hi", "energy"}});
  long long i = 0;
  for (const auto& iv : b.bands.intervals()) w.row({i++, iv.a, iv.b});
}

void cmd_sminus(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto V = cocycle::amo_potential(cfg.real("amo"));
  int p = to_int(cfg.integer("p"), "--p"), q = to_int(cfg.integer("q"), "--q");
  auto s = spectra::s_sets(V, p, q, to_int(cfg.integer("theta_points"), "--theta-points"));
  auto f = out.open("csv");
  CsvWriter w(f, {{"set"}, {"index"}, {"lo", "energy"}, {"hi", "energy"}});
  for (auto [name, set] : {std::pair{"S_minus", &s.S_minus}, std::pair{"S_plus", &s.S_plus}}) {
    long long i = 0;
    for (const auto& iv : set->intervals()) w.row({std::string(name), i++, iv.a, iv.b});
  }
}

void cmd_ids(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto V = cocycle::amo_potential(cfg.real("amo"));
  int p = to_int(cfg.integer("p"), "--p"), q = to_int(cfg.integer("q"), "--q");
  int tp = to_int(cfg.integer("theta_points"), "--theta-points");
  long long pts = cfg.integer("points");
  if (pts < 2) throw Error(ErrorCode::validation, kModule, "--points: need at least 2");
  double lo = cfg.real("e_min"), hi = cfg.real("e_max");
  std::vector<double> N(pts);
  parallel_for(pts, [&](long long i) { N[i] = spectra::ids(V, p, q, lo + (hi - lo) * i / (pts - 1), tp); });
  auto f = out.open("csv");
  CsvWriter w(f, {{"E", "energy"}, {"N"}});
  for (long long i = 0; i < pts; ++i) w.row({lo + (hi - lo) * i / (pts - 1), N[i]});
}

void cmd_chambers(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  double lambda = cfg.real("amo");
  auto e = cf::expand_max(cf::parse_alpha(cfg.text("alpha")), 200);
  auto V = cocycle::amo_potential(lambda);
  int grid = to_int(cfg.integer("grid"), "--grid");
  auto f = out.open("csv");
  CsvWriter w(f, {{"n"}, {"p_n"}, {"q_n"}, {"deviation"}, {"closed_form"}, {"abs_diff"}});
  for (int n : convergent_indices(e, cfg.integer("q_min"), cfg.integer("levels"))) {
    int p = to_int(to_ll(e.p[n]), "p_n"), q = to_int(to_ll(e.q[n]), "q_n");
    auto d = spectra::chambers_deviation(V, p, q, cfg.real("energy"), grid);
    double closed = 2 * std::pow(lambda, q);
    w.row({static_cast<long long>(n), static_cast<long long>(p), static_cast<long long>(q), d.value, closed,
           std::fabs(d.value - closed)});
  }
}

void cmd_fejer(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto k = ldt::fejer_kernel(to_int(cfg.integer("R"), "--R"), to_int(cfg.integer("power"), "--power"));
  auto f = out.open("csv");
  CsvWriter w(f, {{"j"}, {"c"}, {"weight"}});
  auto wt = k.weights();
  for (size_t j = 0; j < k.c.size(); ++j) w.row({static_cast<long long>(j), k.c[j].str(), wt[j]});
}

void cmd_ldt(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto a = cf::parse_alpha(cfg.text("alpha"));
  auto e = cf::expand_max(a, 200);
  auto c = cocycle::amo(cfg.real("amo"), cfg.real("energy"), a.to_double());
  auto sc = ldt::LdtScales::induction();
  int grid = to_int(cfg.integer("grid"), "--grid");
  auto f = out.open("csv");
  CsvWriter w(f, {{"q"}, {"N"}, {"kappa"}, {"L_N"}, {"measure"}, {"reference"}, {"window_ok"}, {"approximant_ok"}});
  for (int n : convergent_indices(e, cfg.integer("q_min"), cfg.integer("levels"))) {
    long long p = to_ll(e.p[n]), q = to_ll(e.q[n]);
    auto pt = ldt::ldt_experiment(c, p, q, ldt::smallest_admissible_N(q, sc), cfg.real("kappa"), grid, sc,
                                  cfg.real("c_ref"));
    w.row({pt.q, pt.N, pt.kappa, pt.L_N, pt.measure, pt.reference, static_cast<long long>(pt.window_ok),
           static_cast<long long>(pt.approximant_ok)});
  }
}

void cmd_avalanche(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  double alpha = cf::parse_alpha(cfg.text("alpha")).to_double();
  auto c = cocycle::amo(cfg.real("amo"), cfg.real("energy"), alpha);
  long long N = cfg.integer("N"), n = cfg.integer("n");
  double mu = std::exp(cfg.real("log_mu"));
  std::mt19937_64 rng(cfg.integer("seed"));
  auto f = out.open("csv");
  CsvWriter w(f, {{"trial"}, {"theta"}, {"lhs"}, {"rhs_unit"}, {"ratio"}, {"hypothesis_ok"}});
  for (long long t = 0; t < cfg.integer("trials"); ++t) {
    double th = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    std::vector<Sl2Mat> blocks;
    for (long long j = 0; j < n; ++j) blocks.push_back(cocycle::transfer(c, th + j * N * alpha, N));
    auto av = ldt::avalanche_check(blocks, mu);
    w.row({t, th, av.lhs, av.rhs_unit, av.lhs / av.rhs_unit, static_cast<long long>(av.hypothesis_ok())});
  }
}

void cmd_seqs(const ExperimentConfig& cfg, Sink& out, RunResult& res) {
  auto e = cf::expand_max(cf::parse_alpha(cfg.text("alpha")), to_int(cfg.integer("depth"), "--depth"));
  auto sc = ldt::LdtScales::induction();
  cf::BigInt q0;
  try {
    q0 = cf::BigInt(cfg.text("q0"));
  } catch (const std::exception&) {
    throw Error(ErrorCode::validation, kModule, "--q0: expected a decimal integer");
  }
  auto r = ldt::induction_sequences(e, sc, to_int(cfg.integer("s_max"), "--s-max"), q0);
  auto fails = ldt::verify_induction(e, sc, cfg.real("c"), r);
  {
    auto f = out.open("csv");
    CsvWriter w(f, {{"s"}, {"cf_index"}, {"q_tilde"}, {"log_q"}, {"m"}, {"log_m"}, {"log_N"}, {"N"}});
    for (const auto& t : r.terms)
      w.row({static_cast<long long>(t.s), static_cast<long long>(t.cf_index), t.q_tilde.str(), t.log_q, t.m.str(),
             t.log_m, t.log_N, t.N ? t.N->str() : std::string("")});
  }
  io::Json j;
  j["exhausted"] = r.exhausted;
  j["deepest"] = r.deepest;
  j["verify_failures"] = fails;
  out.json("json", j);
  if (!fails.empty()) throw Error(ErrorCode::validation, "ldt", "induction check: " + fails.front());
  if (r.exhausted) res.note = "expansion exhausted at s = " + std::to_string(r.deepest);
}

void cmd_last_diff(const ExperimentConfig& cfg, Sink& out, RunResult&) {
  auto e = cf::expand_max(cf::parse_alpha(cfg.text("alpha")), 200);
  auto V = cocycle::amo_potential(cfg.real("amo"));
  int tp = to_int(cfg.integer("theta_points"), "--theta-points");
  int n0 = to_int(cfg.integer("n_min"), "--n-min"), n1 = to_int(cfg.integer("n_max"), "--n-max");
  if (n0 < 1 || n1 < n0 || n1 + 1 > e.depth()) throw Error(ErrorCode::validation, kModule, "--n-min/--n-max out of range");
  auto smin = [&](int n) {
    return spectra::s_sets(V, to_int(to_ll(e.p[n]), "p_n"), to_int(to_ll(e.q[n]), "q_n"), tp).S_minus;
  };
  auto f = out.open("csv");
  CsvWriter w(f, {{"n"}, {"q_n"}, {"q_next"}, {"symdiff", "energy"}, {"hausdorff", "energy"}});
  auto cur = smin(n0);
  for (int n = n0; n <= n1; ++n) {
    auto next = smin(n + 1);
    auto d = spectra::set_distance(cur, next);
    w.row({static_cast<long long>(n), to_ll(e.q[n]), to_ll(e.q[n + 1]), d.symdiff, d.hausdorff});
    cur = std::move(next);
  }
}

using Handler = std::function<void(const ExperimentConfig&, Sink&, RunResult&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"cf", cmd_cf},           {"dioph", cmd_dioph},       {"norms", cmd_norms},       {"lyapunov", cmd_lyapunov},
      {"rotnum", cmd_rotnum},   {"renorm", cmd_renorm},     {"cohom", cmd_cohom},       {"kam-step", cmd_kam_step},
      {"kam-run", cmd_kam_run}, {"spectrum", cmd_spectrum}, {"sminus", cmd_sminus},     {"ids", cmd_ids},
      {"chambers", cmd_chambers}, {"fejer", cmd_fejer},     {"ldt", cmd_ldt},           {"avalanche", cmd_avalanche},
      {"seqs", cmd_seqs},       {"last-diff", cmd_last_diff},
  };
  return h;
}

}  // namespace

RunResult run(const ExperimentConfig& cfg) {
  auto it = handlers().find(cfg.command);
  if (it == handlers().end()) throw Error(ErrorCode::validation, kModule, "command: unknown '" + cfg.command + "'");
  if (cfg.integer("threads") > 0) set_threads(static_cast<int>(cfg.integer("threads")));
  RunResult res;
  Sink out(cfg, res);
  // the location is not part of the experiment: artifacts stay identical wherever they are written
  auto eff = cfg.to_json();
  eff.erase("out_dir");
  out.json("config.json", eff);
  it->second(cfg, out, res);
  return res;
}

}  // namespace qplab::cli
