#include "qplab/kam.hpp"

#include "qplab/error.hpp"
#include "qplab/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace qplab::kam {

using ud::FourierSeries;
using ud::MatSeries;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const cplx I(0, 1);

[[noreturn]] void fail(ErrorCode c, const std::string& what) { throw Error(c, "kam", what); }

// e^{xJ} = cos x I + sin x J
Mat2c eJ(double x) {
  double c = std::cos(x), s = std::sin(x);
  return Mat2c(c, s, -s, c);
}

// 2 i sin(pi x) e^{i pi x} = e^{2 pi i x} - 1, without cancellation for small x
cplx unit_minus_one(long double x) {
  x -= std::floor(x);
  double xd = static_cast<double>(x);
  return 2.0 * I * std::sin(std::numbers::pi * xd) * std::polar(1.0, std::numbers::pi * xd);
}

// Grid values to coefficients |k| <= K. The discarded mass must stay below
// 1e-13 of the total, above the roundoff floor. Values here come from O(1)
// group elements, so the floor is absolute.
MatSeries grid_series(const std::vector<Mat2c>& vals, int K, bool real) {
  int N = static_cast<int>(vals.size());
  if (2 * K + 1 > N) fail(ErrorCode::invalid_argument, "grid too small for the work bandwidth");
  MatSeries full = ud::from_grid(vals, N / 2 - 1, real, -1);
  double total = 0, dropped = 0, vmax = 0;
  for (const auto& e : full.e)
    for (int k = -e.K(); k <= e.K(); ++k) {
      double a = std::abs(e[k]);
      total += a;
      if (std::abs(k) > K) dropped += a;
    }
  for (const auto& v : vals) vmax = std::max(vmax, v.max_abs());
  double noise = N * std::numeric_limits<double>::epsilon() * std::max(vmax, 1.0);
  if (dropped > 1e-13 * total + noise) {
    std::ostringstream os;
    os << "discarded Fourier mass " << dropped << " exceeds tolerance at bandwidth " << K;
    fail(ErrorCode::aliasing, os.str());
  }
  // coefficients under the per-mode roundoff level are not resolved by the grid
  MatSeries out = full.resized(K);
  double cut = std::numeric_limits<double>::epsilon() * std::max(vmax, 1.0) / 4;
  for (auto& e : out.e)
    for (int k = -K; k <= K; ++k)
      if (std::abs(e[k]) < cut) e.at(k) = 0;
  return out;
}

std::vector<double> real_grid(const FourierSeries& f, int N) {
  auto g = ud::to_grid(f, N);
  std::vector<double> out(N);
  for (int j = 0; j < N; ++j) out[j] = g[j].real();
  return out;
}

Mat2c su11_at(cplx t, cplx v) { return Mat2c(I * t.real(), v, std::conj(v), -I * t.real()); }

double log_sum_exp(const std::vector<double>& xs) {
  double m = -INFINITY;
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// drop coefficients that cannot affect double evaluation
FourierSeries trimmed(const FourierSeries& f) {
  double l1 = f.l1();
  int K = 0;
  for (int k = f.K(); k > 0; --k)
    if (std::abs(f[k]) > 1e-20 * l1 || std::abs(f[-k]) > 1e-20 * l1) {
      K = k;
      break;
    }
  return f.resized(K);
}

}  // namespace

CohomResult solve_cohomological(const FourierSeries& g, double alpha, int Q) {
  if (Q < 1) fail(ErrorCode::invalid_argument, "cutoff Q must be positive");
  if (!g.hermitian(1e-12)) fail(ErrorCode::invalid_argument, "g must be real-valued");
  CohomResult out;
  out.min_divisor = INFINITY;
  std::vector<cplx> d(Q);
  for (int k = 1; k < Q; ++k) {
    d[k] = unit_minus_one(static_cast<long double>(k) * alpha);
    double a = std::abs(d[k]);
    if (a < 1e-14) {
      std::ostringstream os;
      os << "exact resonance at k = " << k;
      fail(ErrorCode::exact_resonance, os.str());
    }
    out.min_divisor = std::min(out.min_divisor, a);
  }
  int Kv = std::max(0, std::min(Q - 1, g.K()));
  FourierSeries v(Kv, true);
  for (int k = 1; k <= Kv; ++k) {
    v.at(k) = -g[k] / d[k];
    v.at(-k) = -g[-k] / std::conj(d[k]);
    for (int s : {k, -k}) {
      double gk = std::abs(g[s]), vk = std::abs(v[s]);
      if (gk == 0) continue;
      out.max_ratio = std::max(out.max_ratio, vk / gk);
      if (vk > gk / std::abs(d[k]) * (1 + 1e-12)) out.exact_bound_ok = false;
      if (vk > Q * gk * (1 + 1e-12)) out.q_bound_ok = false;
    }
  }
  out.v = v;
  FourierSeries lhs = ud::shift(v, alpha) - v + ud::truncate(g, Q) - FourierSeries::constant(g[0]);
  out.residual = ud::sup_on_grid(lhs, ud::grid_size_for(std::max(lhs.K(), 1) + 1));
  return out;
}

namespace {

DivisorFloor divisor_scan(const std::function<long double(long long)>& frac_k_alpha, double rho, double gamma,
                          double tau, double Q_next, int K) {
  DivisorFloor out;
  out.min_abs = INFINITY;
  out.bound = gamma * std::exp(-tau * tau * std::log(Q_next));
  for (long long k = -K; k <= K; ++k) {
    long double fk = frac_k_alpha(k);
    for (int sgn : {1, -1}) {
      double a = std::abs(unit_minus_one(fk + sgn * 2.0L * rho));
      if (a < out.min_abs) {
        out.min_abs = a;
        out.worst_k = k;
        out.worst_sign = sgn;
      }
    }
  }
  out.holds = out.min_abs >= out.bound;
  return out;
}

}  // namespace

DivisorFloor small_divisor_floor(double alpha, double rho, double gamma, double tau, double Q_next, int K) {
  return divisor_scan([alpha](long long k) { return static_cast<long double>(k) * alpha; }, rho, gamma, tau, Q_next,
                      K);
}

DivisorFloor small_divisor_floor(const cf::Alpha& alpha, double rho, double gamma, double tau, double Q_next, int K) {
  return divisor_scan(
      [&alpha](long long k) {
        cf::HPFloat x = alpha.value * k;
        x -= floor(x);
        return static_cast<long double>(x);
      },
      rho, gamma, tau, Q_next, K);
}

bool HomotopyResult::contract_ok() const {
  return norm_Y <= std::sqrt(norm_g) * (1 + 1e-12) && norm_g_re <= 2 * norm_g * (1 + 1e-12) + 1e-300 &&
         nre_defect <= 1e-10 && residual <= 1e-9;
}

HomotopyResult homotopy_conjugate(double rho, const Su11Series& g, double alpha, int Q_half, double divisor_floor,
                                  const HomotopyOptions& opt) {
  if (Q_half < 1) fail(ErrorCode::invalid_argument, "Q_half must be positive");
  const int K_out = opt.K_out > 0 ? opt.K_out : 4 * (g.K() + Q_half) + 16;
  const int N = opt.N > 0 ? opt.N : ud::grid_size_for(2 * K_out);
  HomotopyResult res;

  const cplx a = std::polar(1.0, -kTwoPi * rho);
  const Mat2c A(a, 0, 0, std::conj(a)), Ai(std::conj(a), 0, 0, a);

  res.divisor_min = INFINITY;
  for (int k = -(Q_half - 1); k < Q_half; ++k) {
    cplx dk = unit_minus_one(2.0L * rho + static_cast<long double>(k) * alpha);
    res.divisor_min = std::min(res.divisor_min, std::abs(dk));
  }
  auto divisor = [&](int k) { return unit_minus_one(2.0L * rho + static_cast<long double>(k) * alpha); };

  res.norm_g = norm(g, opt.norm);
  res.divisor_floor = divisor_floor > 0 ? divisor_floor : res.divisor_min;
  if (opt.enforce_hypothesis && res.norm_g > res.divisor_floor * res.divisor_floor / 64) {
    std::ostringstream os;
    os << "||g|| = " << res.norm_g << " exceeds floor^2/64 = " << res.divisor_floor * res.divisor_floor / 64;
    fail(ErrorCode::hypothesis_violated, os.str());
  }
  if (res.divisor_min < 1e-14) fail(ErrorCode::exact_resonance, "vanishing divisor in the nonresonant range");

  auto gt = ud::to_grid(g.t, N), gv = ud::to_grid(g.v, N);
  std::vector<Mat2c> eg(N);
  for (int j = 0; j < N; ++j) eg[j] = expm(su11_at(gt[j], gv[j]));

  auto lhs_grid = [&](const FourierSeries& y) {
    auto yv = ud::to_grid(y, N), ys = ud::to_grid(ud::shift(y, alpha), N);
    std::vector<Mat2c> out(N);
    parallel_for(N, [&](long long j) {
      Mat2c Ys(0, ys[j], std::conj(ys[j]), 0), Y(0, -yv[j], -std::conj(yv[j]), 0);
      out[j] = expm(Ys) * A * eg[j] * expm(Y);
    });
    return out;
  };
  auto eval_G = [&](const FourierSeries& y) {
    auto vals = lhs_grid(y);
    for (auto& m : vals) m = logm(Ai * m);
    return su11_from_matrix(grid_series(vals, K_out, false));
  };
  auto nre_norm = [&](const Su11Series& G) { return ud::norm(ud::truncate(G.v, Q_half), opt.norm); };

  const double thr = opt.tol * std::max(1.0, res.norm_g);
  FourierSeries y(Q_half - 1, false);
  Su11Series G = eval_G(y);
  double f = nre_norm(G);
  res.trace.push_back(f);
  while (f > thr) {
    if (res.iterations >= opt.max_iter) {
      std::ostringstream os;
      os << "no convergence after " << opt.max_iter << " iterations; trace";
      for (double t : res.trace) os << ' ' << t;
      fail(ErrorCode::newton_divergence, os.str());
    }
    FourierSeries step(Q_half - 1, false);
    for (int k = -(Q_half - 1); k < Q_half; ++k) step.at(k) = G.v[k] / divisor(k);
    double lam = 1;
    bool accepted = false;
    for (int h = 0; h < 30 && !accepted; ++h, lam /= 2) {
      FourierSeries yn = y - step * cplx(lam);
      Su11Series Gn = eval_G(yn);
      double fn = nre_norm(Gn);
      if (fn < f) {
        y = yn;
        G = Gn;
        f = fn;
        accepted = true;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "damping failed to reduce ||F|| = " << f;
      fail(ErrorCode::newton_divergence, os.str());
    }
    ++res.iterations;
    res.trace.push_back(f);
  }

  res.Y.t = FourierSeries(0, true);
  res.Y.v = y;
  res.g_re = G;
  res.norm_Y = norm(res.Y, opt.norm);
  res.norm_g_re = norm(G, opt.norm);
  res.nre_defect = f;

  auto lhs = lhs_grid(y);
  auto rt = ud::to_grid(G.t, N), rv = ud::to_grid(G.v, N);
  for (int j = 0; j < N; ++j)
    res.residual = std::max(res.residual, (lhs[j] - A * expm(su11_at(rt[j], rv[j]))).norm());
  return res;
}

Schedule schedule(const cf::CfExpansion& cf, const cf::BridgeSelection& sel, const ud::Modulus& M, double gamma,
                  double tau, double r0, double C, double log_T_override) {
  if (!(r0 > 0) || !(gamma > 0) || !(tau > 0)) fail(ErrorCode::invalid_argument, "schedule needs r0, gamma, tau > 0");
  Schedule s;
  s.A = sel.A;
  s.gamma = gamma;
  s.tau = tau;
  s.r0 = r0;
  s.C = C;
  s.log_T_paper = std::max({3 * std::log(M.c_M()), 3 * ud::log_t_tilde(M, sel.A, tau), -12 * std::log(r0),
                            2 * tau * std::log(4 / gamma)});
  s.log_T = std::isfinite(log_T_override) ? log_T_override : s.log_T_paper;
  s.log_eps0 = -8 * std::pow(sel.A, 4) * tau * tau * s.log_T;

  s.n0 = -1;
  for (int k = 0; k < sel.size(); ++k) {
    int idx = sel.index[k] + 1;
    if (idx > cf.depth()) break;
    if (cf.log_q[idx] >= s.log_T) {
      s.n0 = k;
      break;
    }
  }
  if (s.n0 < 0) {
    s.exhausted = true;
    return s;
  }
  std::vector<double> eps_logs;
  for (int k = s.n0; k < sel.size(); ++k) {
    int idx = sel.index[k] + 1;
    if (idx > cf.depth()) break;
    ScheduleLevel L;
    L.cf_index = idx;
    L.log_Qbar = cf.log_q[idx];
    L.Qbar = cf.q_double(idx);
    int n = static_cast<int>(s.levels.size());
    L.rbar = 2 * std::exp(-2 * L.log_Qbar) * r0;
    if (n == 0) {
      L.r = r0;
      L.log_eps = s.log_eps0;
    } else {
      const auto& P = s.levels.back();
      L.r = std::exp(-2 * P.log_Qbar) * r0;
      double lx = L.log_Qbar / 3;
      double G = lx > 0 ? ud::gamma_log(M, lx) : 0;
      L.log_eps = P.log_eps - std::sqrt(G) * L.log_Qbar;
      L.log_eps_tilde = std::log(C) + log_sum_exp(eps_logs);
    }
    eps_logs.push_back(L.log_eps);
    s.levels.push_back(L);
  }
  return s;
}

Sl2Mat state_fiber(const KamState& s, double theta) {
  double g = s.g.eval(theta).real();
  Mat2c F = s.F.eval(theta);
  return Sl2Mat::rotation(s.rho_f + g / kTwoPi) * expm(F).real();
}

cocycle::QpCocycle state_cocycle(const KamState& s) {
  KamState t = s;
  t.g = trimmed(s.g);
  for (auto& e : t.F.e) e = trimmed(e);
  cocycle::QpCocycle c;
  c.alpha = s.alpha;
  c.label = "kam-state";
  c.fiber = [t](double theta) { return state_fiber(t, theta); };
  return c;
}

namespace {

std::vector<Mat2c> state_grid(const KamState& s, int N) {
  auto g = real_grid(s.g, N);
  auto F = ud::to_grid(s.F, N);
  std::vector<Mat2c> out(N);
  for (int j = 0; j < N; ++j) out[j] = Mat2c(Sl2Mat::rotation(s.rho_f + g[j] / kTwoPi)) * expm(F[j]);
  return out;
}

}  // namespace

KamState initial_state(const MatSeries& F0, double alpha, double rho_f, double g0, const Schedule& sch) {
  if (sch.levels.empty()) fail(ErrorCode::cf_exhausted, "schedule has no levels");
  KamState s;
  s.alpha = alpha;
  s.rho_f = rho_f;
  s.g = FourierSeries::constant(g0);
  s.F = F0;
  s.r = sch.levels[0].r;
  s.rbar = sch.levels[0].rbar;
  s.log_eps = sch.levels[0].log_eps;
  s.log_eps_tilde = sch.levels[0].log_eps_tilde;
  return s;
}

StepResult kam_step(const KamState& s, const Schedule& sch, const KamParams& p) {
  const int n = s.level;
  if (n + 1 >= static_cast<int>(sch.levels.size())) fail(ErrorCode::cf_exhausted, "schedule has no next level");
  const ScheduleLevel& L0 = sch.levels[n];
  const ScheduleLevel& L1 = sch.levels[n + 1];
  if (!(L1.Qbar <= p.K_work)) fail(ErrorCode::invalid_argument, "work bandwidth is below the next Qbar");
  const int K = p.K_work, N = p.grid;
  if (N < 4 * K) fail(ErrorCode::invalid_argument, "grid must be at least 4 K_work");
  const int Qn = static_cast<int>(L0.Qbar), Qn1 = static_cast<int>(L1.Qbar);
  const int Q_half = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(Qn1))));
  const ud::Modulus& M = p.norm.M;

  StepResult out;
  StepReport& rep = out.report;
  rep.level = n;
  rep.Qbar = Qn;
  rep.Qbar_next = Qn1;
  rep.Q_half = Q_half;
  rep.log_eps_schedule = L0.log_eps;

  rep.divisor = small_divisor_floor(s.alpha, s.rho_f, p.gamma, p.tau, L0.Qbar, Q_half - 1);
  if (!rep.divisor.holds) {
    std::ostringstream os;
    os << "small divisor floor fails at k = " << rep.divisor.worst_k << " (sign " << rep.divisor.worst_sign
       << "): " << rep.divisor.min_abs << " < " << rep.divisor.bound;
    fail(ErrorCode::hypothesis_violated, os.str());
  }
  if (s.g.support() >= Qn) fail(ErrorCode::invalid_argument, "g_n must be supported below Qbar_n");

  rep.norm_F_in = ud::norm_mr(s.F, M, s.r).value;
  if (p.paper_mode && std::log(rep.norm_F_in) > L0.log_eps) {
    std::ostringstream os;
    os << "ln ||F_n|| = " << std::log(rep.norm_F_in) << " exceeds ln eps_n = " << L0.log_eps;
    fail(ErrorCode::hypothesis_violated, os.str());
  }

  // (i) remove g_n - g_0 with e^{-vJ}, then absorb g_0
  const double g0 = s.g[0].real();
  FourierSeries gz = (s.g - FourierSeries::constant(g0)).symmetrized();
  CohomResult coh = solve_cohomological(gz, s.alpha, Qn);
  rep.cohom_residual = coh.residual;
  auto v = real_grid(coh.v, N);
  auto Fg = ud::to_grid(s.F, N);
  const Mat2c Rg0(Sl2Mat::rotation(g0 / kTwoPi));
  std::vector<Mat2c> vals(N);
  parallel_for(N, [&](long long j) { vals[j] = logm(Rg0 * expm(eJ(-v[j]) * Fg[j] * eJ(v[j]))); });
  MatSeries Ft = grid_series(vals, K, true);
  rep.norm_F_tilde = ud::norm_mr(Ft, M, L0.rbar).value;

  // (ii) homotopy in su(1,1), then split off the truncated resonant rotation
  HomotopyOptions ho;
  ho.norm = {M, L0.rbar};
  ho.enforce_hypothesis = p.paper_mode;
  ho.K_out = K;
  ho.N = N;
  double floor_arg = p.paper_mode ? rep.divisor.bound : 0;
  HomotopyResult hom = homotopy_conjugate(s.rho_f, to_su11(Ft), s.alpha, Q_half, floor_arg, ho);
  rep.newton_iterations = hom.iterations;
  FourierSeries Tf = ud::truncate(hom.g_re.t, Qn1).symmetrized();
  auto Fre = ud::to_grid(from_su11(hom.g_re), N);
  auto tf = real_grid(Tf, N);
  auto Yg = ud::to_grid(from_su11(hom.Y), N);

  // (iii) restore with e^{vJ}
  std::vector<Mat2c> Fn(N), Phi(N);
  parallel_for(N, [&](long long j) {
    Mat2c G = logm(eJ(-tf[j]) * expm(Fre[j]));
    Fn[j] = eJ(v[j]) * G * eJ(-v[j]);
    Phi[j] = eJ(v[j]) * expm(Yg[j]) * eJ(-v[j]);
  });

  KamState& t = out.next;
  t = s;
  t.level = n + 1;
  t.F = grid_series(Fn, K, true);
  MatSeries PhiS = grid_series(Phi, K, true);
  t.g = (gz - Tf).resized(std::max(0, Qn1 - 1));
  t.g.set_real_flag(true);
  auto Bg = ud::to_grid(s.B, N);
  std::vector<Mat2c> Bn(N);
  for (int j = 0; j < N; ++j) Bn[j] = Phi[j] * Bg[j];
  t.B = grid_series(Bn, K, true);
  t.r = L1.r;
  t.rbar = L1.rbar;
  t.log_eps = L1.log_eps;
  t.log_eps_tilde = L1.log_eps_tilde;

  // a posteriori: Phi(theta + alpha) A_n(theta) Phi(theta)^{-1} = A_{n+1}(theta)
  auto An = state_grid(s, N), An1 = state_grid(t, N);
  auto Ps = ud::to_grid(ud::shift(PhiS, s.alpha), N);
  auto Pg = ud::to_grid(PhiS, N);
  for (int j = 0; j < N; ++j)
    rep.residual = std::max(rep.residual, (Ps[j] * An[j] * Pg[j].inverse() - An1[j]).norm());
  if (rep.residual > 1e-8) {
    std::ostringstream os;
    os << "step conjugation residual " << rep.residual << " above 1e-8";
    fail(ErrorCode::validation, os.str());
  }

  rep.norm_F_out = ud::norm_mr(t.F, M, t.r).value;
  rep.phi_dist = ud::norm_mr(PhiS - MatSeries::identity(), M, t.r).value;
  rep.phi_constant = rep.norm_F_tilde > 0 ? rep.phi_dist / std::sqrt(rep.norm_F_tilde) : 0;
  return out;
}

MatSeries random_perturbation(int K, double eps, unsigned long long seed, const ud::NormSpec& spec) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0, 1);
  auto part = [&]() {
    FourierSeries f(K, true);
    f.at(0) = nd(rng);
    for (int k = 1; k <= K; ++k) {
      cplx c = cplx(nd(rng), nd(rng)) * std::exp(-static_cast<double>(k));
      f.at(k) = c;
      f.at(-k) = std::conj(c);
    }
    return f;
  };
  FourierSeries x = part(), y = part(), z = part();
  MatSeries F(x, y + z, y - z, -x);
  double nF = ud::norm(F, spec);
  if (eps == 0 || nF == 0) return F * cplx(0);
  return F * cplx(eps / nF);
}

MatSeries product_log(double rho, const std::vector<MatSeries>& F, int K_out) {
  const int N = ud::grid_size_for(2 * K_out);
  std::vector<std::vector<Mat2c>> grids;
  for (const auto& f : F) grids.push_back(ud::to_grid(f, N));
  const Mat2c R(Sl2Mat::rotation(rho)), Rback(Sl2Mat::rotation(-rho * static_cast<double>(F.size())));
  std::vector<Mat2c> vals(N);
  for (int j = 0; j < N; ++j) {
    Mat2c P = Mat2c::identity();
    for (const auto& g : grids) P = R * expm(g[j]) * P;
    vals[j] = logm(Rback * P);
  }
  return grid_series(vals, K_out, true);
}

DriverResult almost_reducibility_driver(const cocycle::QpCocycle& c, double rho_ref, const cf::CfExpansion& cf,
                                        const DriverOptions& opt) {
  if (!c.series) fail(ErrorCode::invalid_argument, "driver needs a series-defined cocycle");
  const KamParams& p = opt.params;
  DriverResult out;
  auto sel = cf::select_bridges(cf, p.paper_mode ? p.A : 1);
  out.sched = schedule(cf, sel, p.norm.M, p.gamma, p.tau, p.norm.r, p.C,
                       p.paper_mode ? NAN : std::log(p.T_measured));
  const Schedule& sch = out.sched;
  if (sch.levels.size() < 2) {
    out.hypothesis_stop = true;
    out.stop_reason = "schedule threshold T is beyond the computed continued-fraction range";
    return out;
  }

  const int N = p.grid, K = p.K_work;
  const MatSeries Rref = MatSeries::constant(Mat2c(Sl2Mat::rotation(rho_ref)));
  bool pure_rotation = true;
  for (int i = 0; i < 4; ++i) {
    const auto& e = c.series->e[i];
    for (int k = -e.K(); k <= e.K(); ++k)
      if (e[k] != Rref.e[i][k]) pure_rotation = false;
  }
  MatSeries F0 = MatSeries::constant(Mat2c::zero()).resized(K);
  if (!pure_rotation) {
    auto Ag = ud::to_grid(*c.series, N);
    const Mat2c Rm(Sl2Mat::rotation(-rho_ref));
    std::vector<Mat2c> vals(N);
    for (int j = 0; j < N; ++j) vals[j] = logm(Rm * Ag[j]);
    F0 = grid_series(vals, K, true);
  }

  auto rho0 = cocycle::rotation_number(c, opt.rotation_iterations, 0, 0, cocycle::Estimator::weighted);
  out.rho_initial = rho0.rho;
  out.rho_initial_err = rho0.error_bar;
  double rho_f = rho_ref;
  if (opt.rho_f) rho_f = *opt.rho_f;
  else if (!pure_rotation) rho_f = rho_ref + std::remainder(rho0.rho - rho_ref, 1.0);
  double g0 = kTwoPi * (rho_ref - rho_f);

  KamState s = initial_state(F0, c.alpha, rho_f, g0, sch);
  auto Ag = ud::to_grid(*c.series, N);
  auto record = [&](const KamState& st, double phi, double margin) {
    LedgerRecord r;
    r.level = st.level;
    r.log_eps_measured = std::log(ud::norm_mr(st.F, p.norm.M, st.r).value);
    r.log_eps_schedule = st.log_eps;
    auto Bs = ud::to_grid(ud::shift(st.B, c.alpha), N), Bg = ud::to_grid(st.B, N);
    auto Al = state_grid(st, N);
    for (int j = 0; j < N; ++j) r.residual = std::max(r.residual, (Bs[j] * Ag[j] * Bg[j].inverse() - Al[j]).norm());
    if (r.residual > 1e-8) {
      std::ostringstream os;
      os << "end-to-end conjugation residual " << r.residual << " above 1e-8 at level " << st.level;
      fail(ErrorCode::validation, os.str());
    }
    r.phi_dist = phi;
    r.divisor_margin = margin;
    out.ledger.push_back(r);
  };
  double m0 = small_divisor_floor(c.alpha, rho_f, p.gamma, p.tau, sch.levels[0].Qbar,
                                  static_cast<int>(std::ceil(std::sqrt(sch.levels[1].Qbar))) - 1)
                  .margin();
  record(s, 0, m0);

  for (int step = 0; step < opt.steps; ++step) {
    if (opt.tol > 0 && std::exp(out.ledger.back().log_eps_measured) <= opt.tol) {
      out.stop_reason = "tolerance reached";
      break;
    }
    StepResult sr;
    try {
      sr = kam_step(s, sch, p);
    } catch (const Error& e) {
      if (!e.soft() && e.code() != ErrorCode::cf_exhausted) throw;
      out.hypothesis_stop = e.soft();
      out.stop_reason = e.what();
      break;
    }
    s = sr.next;
    out.steps.push_back(sr.report);
    record(s, sr.report.phi_dist, sr.report.divisor.margin());
  }
  if (out.stop_reason.empty()) out.stop_reason = "step budget reached";
  out.final_state = s;
  auto rho1 = cocycle::rotation_number(state_cocycle(s), opt.rotation_iterations, 0, 0, cocycle::Estimator::weighted);
  out.rho_final = rho1.rho;
  out.rho_final_err = rho1.error_bar;
  return out;
}

}  // namespace qplab::kam
