#include "qplab/ldt.hpp"

#include "qplab/error.hpp"
#include "qplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qplab::ldt {

namespace {

const char* kModule = "ldt";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(ErrorCode c, const std::string& what) { throw Error(c, kModule, what); }

double log_big(const BigInt& x) { return static_cast<double>(log(cf::HPFloat(x))); }

// floor(C * x^e) + 1 for a big integer x
BigInt floor_pow_plus_one(const BigInt& x, double e, double C) {
  cf::HPFloat v = pow(cf::HPFloat(x), cf::HPFloat(e)) * cf::HPFloat(C);
  return static_cast<BigInt>(floor(v)) + 1;
}

// ln of the spectral radius of a block given as m e^{s}
double log_spectral_radius(const cocycle::ScaledMat& blk) {
  double tr = std::fabs(blk.m.trace());
  if (tr == 0) return 0;
  double lt = std::log(tr) + blk.log_scale;
  if (lt > 20) return lt + std::log1p(std::sqrt(1 - 4 * std::exp(-2 * lt))) - std::log(2.0);
  double t = std::exp(lt);
  if (t <= 2) return 0;
  return std::log((t + std::sqrt(t * t - 4)) / 2);
}

}  // namespace

BigInt FejerKernel::R_pow() const { return boost::multiprecision::pow(BigInt(R), p); }

bool FejerKernel::identity_holds() const {
  BigInt s = 0;
  for (const auto& x : c) s += x;
  return s == R_pow();
}

std::vector<double> FejerKernel::weights() const {
  double Rp = static_cast<double>(R_pow());
  std::vector<double> w(c.size());
  for (size_t j = 0; j < c.size(); ++j) w[j] = static_cast<double>(c[j]) / Rp;
  return w;
}

cplx FejerKernel::value(double t) const {
  double x = t - std::round(t);
  if (x == 0) return 1;
  cplx D = std::polar(1.0, kPi * (R - 1) * x) * (std::sin(kPi * R * x) / (R * std::sin(kPi * x)));
  return std::pow(D, p);
}

FejerKernel fejer_kernel(int R, int p) {
  if (R < 1 || p < 1) fail(ErrorCode::invalid_argument, "Fejer kernel needs R >= 1 and p >= 1");
  FejerKernel k;
  k.R = R;
  k.p = p;
  k.c.assign(R, BigInt(1));
  for (int e = 1; e < p; ++e) {
    const auto& old = k.c;
    std::vector<BigInt> next(old.size() + R - 1);
    BigInt window = 0;
    for (size_t j = 0; j < next.size(); ++j) {
      if (j < old.size()) window += old[j];
      if (j >= static_cast<size_t>(R)) window -= old[j - R];
      next[j] = window;
    }
    k.c = std::move(next);
  }
  return k;
}

double fejer_envelope(int R, int p, double t) {
  double x = std::fabs(t - std::round(t));
  if (x == 0) return 1;
  return std::min(1.0, std::pow(R * x, -p));
}

double fejer_average(const std::function<double(double)>& u, double alpha, const FejerKernel& k, double theta) {
  auto w = k.weights();
  double s = 0;
  for (size_t j = 0; j < w.size(); ++j) s += w[j] * u(theta + static_cast<double>(j) * alpha);
  return s;
}

LdtScales LdtScales::make(double kappa, double sigma, double p, double b, double nu, double C1, double C2) {
  LdtScales s;
  s.kappa = kappa;
  s.sigma = sigma;
  s.p = p;
  s.b = b;
  s.nu = nu;
  s.C1 = C1;
  s.C2 = C2;
  s.delta = b * (1 / nu - 1);
  s.gamma = 1 + p * (1 - sigma);
  s.sigma1 = p * (sigma - 1) / s.delta;
  std::string bad;
  if (!(kappa > 0)) bad += " kappa>0";
  if (!(nu > 0 && nu < 1)) bad += " 0<nu<1";
  if (!(s.gamma > 0 && s.gamma < 1)) bad += " 0<gamma<1";
  if (!(sigma > 1 && s.sigma1 > sigma)) bad += " sigma1>sigma>1";
  if (!(s.delta > 0 && s.delta < 1 / sigma)) bad += " delta<1/sigma";
  if (!(s.delta * sigma / (sigma - 1) < p && p < 1 / (sigma - 1))) bad += " delta*sigma/(sigma-1)<p<1/(sigma-1)";
  if (!(C1 > 0 && C2 > C1)) bad += " 0<C1<C2";
  if (!bad.empty()) fail(ErrorCode::invalid_argument, "scale inequalities fail:" + bad);
  return s;
}

LdtScales LdtScales::induction() { return make(0.1, 1.5, 0.2, 0.06 * 0.95 / 0.05, 0.95, 1, 1e6); }
LdtScales LdtScales::deviation() { return make(0.1, 1.4, 2, 2, 0.8, 1, 1e6); }

DeviationMeasure deviation_set_measure(const std::function<double(double)>& u, double alpha, long long a, long long q,
                                       const LdtScales& sc, int grid, double S, double rho,
                                       std::optional<double> threshold) {
  if (q < 1 || grid < 1 || !(S > 0) || !(rho > 0)) fail(ErrorCode::invalid_argument, "need q >= 1, grid >= 1, S > 0, rho > 0");
  if (!(std::fabs(alpha - static_cast<double>(a) / static_cast<double>(q)) < 1 / (static_cast<double>(q) * q)))
    fail(ErrorCode::invalid_argument, "a/q is not an approximant of alpha");
  if (std::fabs(sc.p - std::round(sc.p)) > 0) fail(ErrorCode::invalid_argument, "Fejer power must be an integer");
  const int p = static_cast<int>(std::lround(sc.p));

  DeviationMeasure out;
  out.R = static_cast<int>(std::llround(std::pow(static_cast<double>(q), sc.sigma)));
  auto w = fejer_kernel(out.R, p).weights();

  std::vector<double> v(grid);
  parallel_for(grid, [&](long long i) { v[i] = u(static_cast<double>(i) / grid); });
  long double m = 0;
  for (double x : v) m += x;
  out.mean = static_cast<double>(m / grid);

  out.s1 = sc.p * (1 - 1 / sc.sigma);
  out.s2 = std::pow(2.0, sc.p + 5) * S / rho;
  out.s3 = (1 + sc.p) / sc.sigma - sc.p;
  double R = out.R;
  out.bound = std::pow(R, 2 * out.s1) / (256 * std::exp(std::pow(R, out.s3)));
  out.below_floor = out.bound >= 1;
  out.threshold = threshold ? *threshold : out.s2 * std::pow(R, -out.s1);

  std::vector<char> hit(grid);
  parallel_for(grid, [&](long long i) {
    long double f = 0, th = static_cast<long double>(i) / grid;
    for (size_t j = 0; j < w.size(); ++j) {
      long double x = th + static_cast<long double>(j) * alpha;
      f += w[j] * u(static_cast<double>(x - std::floor(x)));
    }
    hit[i] = std::fabs(static_cast<double>(f) - out.mean) > out.threshold;
  });
  long long n = 0;
  for (char h : hit) n += h;
  out.measure = static_cast<double>(n) / grid;
  return out;
}

Truncation gevrey_truncate(const ud::MatSeries& A, int N, double nu, double rho, double delta, std::optional<double> C1) {
  if (!(nu > 0.5 && nu < 1)) fail(ErrorCode::invalid_argument, "Gevrey exponent must lie in (1/2, 1)");
  if (N < 1 || !(rho > 0) || !(delta > 0)) fail(ErrorCode::invalid_argument, "need N >= 1, rho > 0, delta > 0");
  Truncation out;
  out.N_tilde = static_cast<int>(std::floor(std::pow(static_cast<double>(N), delta / (1 - nu)) * (1 + 1e-12)));
  const int K = A.K();

  auto coef_norm = [&](int k) {
    return Mat2c(A.e[0][k], A.e[1][k], A.e[2][k], A.e[3][k]).norm();
  };
  out.log_certificate = -INFINITY;
  double top = -INFINITY, below = -INFINITY;
  for (int k = -K; k <= K; ++k) {
    double c = coef_norm(k);
    if (c == 0) continue;
    double l = std::log(c) + rho * std::pow(2 * kPi * std::abs(k), nu);
    out.log_certificate = std::max(out.log_certificate, l);
    (std::abs(k) == K ? top : below) = std::max(std::abs(k) == K ? top : below, l);
  }
  // weighted coefficients still growing at the last supplied mode: the tail past it is uncontrolled
  if (K > out.N_tilde && top > below + 1e-9)
    fail(ErrorCode::decay_certificate, "coefficients do not decay at the requested Gevrey rate");

  out.A_trunc = out.N_tilde >= K ? A : ud::truncate(A, out.N_tilde + 1);
  out.rho_N = rho / (4 * kPi) * std::pow(static_cast<double>(std::max(out.N_tilde, 1)), nu - 1);

  if (std::isfinite(out.log_certificate)) {
    double sum = 0;
    for (long long k = out.N_tilde + 1; k < out.N_tilde + 10'000'000LL; ++k) {
      double t = std::exp(out.log_certificate - rho * std::pow(2 * kPi * k, nu));
      sum += t;
      if (t < 1e-20 * sum || t < 1e-300) break;
    }
    out.error_bound = 2 * sum;
  }

  const int Ng = std::max(ud::grid_size_for(std::max(K, 1)), 256);
  double err = 0, sup_real = 0;
  for (int j = 0; j < Ng; ++j) {
    double th = static_cast<double>(j) / Ng;
    Mat2c a = A.eval(th);
    err = std::max(err, (a - out.A_trunc.eval(th)).norm());
    sup_real = std::max(sup_real, a.norm());
  }
  out.error_measured = err;
  out.c_measured = err > 0 ? -std::log(err) / std::pow(static_cast<double>(std::max(out.N_tilde, 1)), nu) : INFINITY;

  double sup = -INFINITY;
  for (int j = 0; j < 512; ++j)
    for (double s : {-1.0, 1.0}) {
      cplx z(static_cast<double>(j) / 512, s * out.rho_N);
      sup = std::max(sup, std::log(out.A_trunc.eval(z).norm()));
    }
  out.surrogate_sup = sup;
  out.surrogate_cap = std::max(std::log(2.0), C1 ? *C1 : std::log(2 * sup_real));
  out.surrogate_ok = sup <= out.surrogate_cap;
  return out;
}

long long smallest_admissible_N(long long q, const LdtScales& sc) {
  return static_cast<long long>(std::floor(sc.C1 * std::pow(static_cast<double>(q), sc.sigma))) + 1;
}

LdtPoint ldt_experiment(const cocycle::QpCocycle& c, long long a, long long q, long long N, double kappa, int grid,
                        const LdtScales& sc, double c_ref) {
  if (q < 1 || N < 1 || grid < 1 || !(kappa > 0)) fail(ErrorCode::invalid_argument, "need q, N, grid >= 1 and kappa > 0");
  std::vector<double> u(grid);
  parallel_for(grid, [&](long long i) {
    u[i] = cocycle::transfer_scaled(c, static_cast<double>(i) / grid, N).log_norm() / static_cast<double>(N);
  });
  long double m = 0;
  for (double x : u) m += x;
  LdtPoint out;
  out.q = q;
  out.N = N;
  out.kappa = kappa;
  out.L_N = static_cast<double>(m / grid);
  long long n = 0;
  for (double x : u) n += std::fabs(x - out.L_N) > kappa;
  out.measure = static_cast<double>(n) / grid;
  out.reference = std::exp(-c_ref * std::pow(static_cast<double>(q), sc.gamma));
  double lq = std::log(static_cast<double>(q)), lN = std::log(static_cast<double>(N));
  out.approximant_ok = std::fabs(c.alpha - static_cast<double>(a) / static_cast<double>(q)) < 1 / (static_cast<double>(q) * q);
  out.window_ok = std::log(sc.C1) + sc.sigma * lq < lN && lN < std::log(sc.C2) + sc.sigma1 * lq;
  return out;
}

Avalanche avalanche_check(const std::vector<Sl2Mat>& mats, double mu) {
  const size_t n = mats.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "avalanche check needs at least two matrices");
  if (!(mu > 1)) fail(ErrorCode::invalid_argument, "mu must exceed 1");
  Avalanche out;
  std::vector<double> ln(n);
  for (size_t j = 0; j < n; ++j) ln[j] = std::log(mats[j].norm());
  out.min_norm = std::exp(*std::min_element(ln.begin(), ln.end()));
  // the closed-form norm may land an ulp below an exact mu
  out.norm_ok = out.min_norm >= mu * (1 - 1e-12) && mu > static_cast<double>(n);

  Sl2Mat P = mats[0];
  double scale = 0;
  for (size_t j = 1; j < n; ++j) {
    P = mats[j] * P;
    double s = P.norm();
    P = P * (1 / s);
    scale += std::log(s);
  }
  double lhs = scale + std::log(P.norm());
  for (size_t j = 1; j + 1 < n; ++j) lhs += ln[j];
  for (size_t j = 0; j + 1 < n; ++j) {
    double pair = std::log((mats[j + 1] * mats[j]).norm());
    lhs -= pair;
    if (ln[j + 1] + ln[j] - pair >= 0.5 * std::log(mu)) out.cancellation_ok = false;
  }
  out.lhs = std::fabs(lhs);
  out.rhs_unit = static_cast<double>(n) / mu;
  return out;
}

InductionResult induction_sequences(const cf::CfExpansion& cf, const LdtScales& sc, int s_max, const BigInt& q0) {
  if (s_max < 0) fail(ErrorCode::invalid_argument, "s_max must be non-negative");
  int j = 1;
  while (j <= cf.depth() && cf.q[j] < q0) ++j;
  if (j > cf.depth()) throw Error(ErrorCode::cf_exhausted, kModule, "no convergent denominator reaches q0");

  InductionResult out;
  InductionTerm t;
  t.s = 0;
  t.cf_index = j;
  t.q_tilde = cf.q[j];
  t.log_q = log_big(t.q_tilde);
  t.m = floor_pow_plus_one(t.q_tilde, sc.sigma - 1, sc.C1);
  t.log_m = log_big(t.m);
  t.log_N = t.log_q + t.log_m;
  t.N = t.q_tilde * t.m;
  out.terms.push_back(t);

  constexpr double kExactLogCap = 2000;
  while (static_cast<int>(out.terms.size()) <= s_max) {
    const auto& prev = out.terms.back();
    double loglog_threshold = sc.gamma / 2 * prev.log_q;
    int k = prev.cf_index + 1;
    while (k <= cf.depth() && !(std::log(cf.log_q[k]) > loglog_threshold)) ++k;
    if (k > cf.depth()) {
      out.exhausted = true;
      break;
    }
    InductionTerm n;
    n.s = prev.s + 1;
    n.cf_index = k;
    n.q_tilde = cf.q[k];
    n.log_q = log_big(n.q_tilde);
    n.m = n.q_tilde * floor_pow_plus_one(n.q_tilde, sc.sigma - 1, 1);
    n.log_m = log_big(n.m);
    n.log_N = prev.log_N + n.log_m;
    if (prev.N && n.log_N < kExactLogCap) n.N = *prev.N * n.m;
    out.terms.push_back(n);
  }
  out.deepest = out.terms.back().s;
  return out;
}

std::vector<std::string> verify_induction(const cf::CfExpansion& cf, const LdtScales& sc, double c,
                                          const InductionResult& r) {
  std::vector<std::string> bad;
  auto note = [&](int s, const std::string& what) { bad.push_back("s=" + std::to_string(s) + ": " + what); };
  for (size_t i = 0; i < r.terms.size(); ++i) {
    const auto& t = r.terms[i];
    if (t.cf_index < 1 || t.cf_index > cf.depth() || cf.q[t.cf_index] != t.q_tilde) {
      note(t.s, "not a convergent denominator");
      continue;
    }
    double lq = cf.log_q[t.cf_index];
    if (!(std::log(sc.C1) + sc.sigma * lq < t.log_N)) note(t.s, "N below C1 q^sigma");
    if (!(t.log_N < std::log(sc.C2) + sc.sigma1 * lq)) note(t.s, "N above C2 q^sigma1");
    if (t.N && *t.N % t.q_tilde != 0) note(t.s, "q does not divide N");
    if (!(lq < t.log_N)) note(t.s, "N_s <= q_s");
    if (i == 0) continue;

    const auto& p = r.terms[i - 1];
    double lp = cf.log_q[p.cf_index];
    double thr = sc.gamma / 2 * lp;
    if (!(std::log(lq) > thr)) note(t.s, "q below exp(q_prev^{gamma/2})");
    for (int j = p.cf_index + 1; j < t.cf_index; ++j)
      if (std::log(cf.log_q[j]) > thr) note(t.s, "an earlier convergent already clears the threshold");
    if (!(p.log_N < lq)) note(t.s, "N_{s-1} >= q_s");
    if (t.m % t.q_tilde != 0) note(t.s, "q does not divide m");
    if (t.N && p.N && *t.N != *p.N * t.m) note(t.s, "N_s != m_s N_{s-1}");
    if (std::fabs(t.log_N - p.log_N - t.log_m) > 1e-9 * std::max(1.0, t.log_N)) note(t.s, "log N_s != log m_s + log N_{s-1}");
    double ll_m = std::log(t.log_m);
    if (!(ll_m > std::log(c / 2) + sc.gamma / 4 * lp)) note(t.s, "m below exp((c/2) q_prev^{gamma/4})");
    if (!(std::log(t.log_m + std::log(2.0)) < std::log(c / 2) + sc.gamma * lp)) note(t.s, "2m above exp((c/2) q_prev^gamma)");
  }
  return bad;
}

PeriodicBound periodic_ln_bound(const ud::FourierSeries& V, double E, long long p, long long q, long long n, int grid) {
  if (q < 1 || n < q || grid < 1) fail(ErrorCode::invalid_argument, "need q >= 1, n >= q and a positive grid");
  auto c = cocycle::schrodinger(V, E, static_cast<double>(p) / static_cast<double>(q));
  std::vector<double> Ln(grid), Lp(grid), C(grid);
  parallel_for(grid, [&](long long i) {
    double th = static_cast<double>(i) / grid;
    Ln[i] = cocycle::transfer_scaled(c, th, n).log_norm() / static_cast<double>(n);
    Lp[i] = log_spectral_radius(cocycle::transfer_scaled(c, th, q)) / static_cast<double>(q);
    C[i] = std::log(c.fiber(th).norm());
  });
  PeriodicBound out;
  long double a = 0, b = 0;
  for (int i = 0; i < grid; ++i) {
    a += Ln[i];
    b += Lp[i];
  }
  out.L_n = static_cast<double>(a / grid);
  out.L_periodic = static_cast<double>(b / grid);
  out.C1 = *std::max_element(C.begin(), C.end());
  out.m = n / q;
  out.r = n % q;
  out.bound = out.L_periodic + 2 * (std::log(static_cast<double>(out.m)) + static_cast<double>(q) * out.C1) / static_cast<double>(n);
  out.slack = out.bound - out.L_n;
  return out;
}

}  // namespace qplab::ldt
