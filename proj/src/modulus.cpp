#include "qplab/modulus.hpp"

#include "qplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace qplab::ud {

namespace {

const char* kModule = "udspace";
constexpr double kScanCap = 1e6;

}  // namespace

Modulus::Modulus(Kind k, double p, std::function<double(double)> f, std::string name)
    : kind_(k), param_(p), custom_(std::move(f)), name_(std::move(name)) {}

Modulus Modulus::make_analytic() {
  Modulus m(analytic, 1.0, nullptr, "analytic");
  m.scan_constants();
  return m;
}

Modulus Modulus::make_gevrey(double nu) {
  if (!(nu > 0 && nu <= 1)) throw Error(ErrorCode::invalid_argument, kModule, "gevrey exponent must be in (0,1]");
  Modulus m(gevrey, nu, nullptr, "gevrey");
  m.scan_constants();
  return m;
}

Modulus Modulus::make_power(double delta) {
  if (!(delta > 2)) throw Error(ErrorCode::invalid_argument, kModule, "power modulus needs delta > 2");
  Modulus m(power, delta, nullptr, "power");
  m.power_scale_ = std::pow(delta, -1.0 / (delta - 1)) * (delta - 1) / delta;
  m.scan_constants();
  return m;
}

Modulus Modulus::make_custom(std::function<double(double)> log_m, std::string name) {
  if (!log_m) throw Error(ErrorCode::invalid_argument, kModule, "custom modulus needs a generator");
  Modulus m(custom, 0.0, std::move(log_m), std::move(name));
  m.scan_constants();
  return m;
}

std::string Modulus::name() const {
  std::ostringstream os;
  switch (kind_) {
    case analytic: os << "analytic"; break;
    case gevrey: os << "gevrey(" << param_ << ")"; break;
    case power: os << "power(" << param_ << ")"; break;
    case custom: os << "custom:" << name_; break;
  }
  return os.str();
}

double Modulus::log_m(double s) const {
  switch (kind_) {
    case analytic: return std::lgamma(s + 1);
    case gevrey: return std::lgamma(s + 1) / param_;
    case power: return power_scale_ * std::pow(s, param_ / (param_ - 1));
    case custom: return custom_(s);
  }
  return 0;
}

double Modulus::log_ratio(double s) const {
  switch (kind_) {
    case analytic: return std::log(s);
    case gevrey: return std::log(s) / param_;
    case power: {
      double e = param_ / (param_ - 1);
      return power_scale_ * std::pow(s, e) * -std::expm1(e * std::log1p(-1.0 / s));
    }
    case custom: return custom_(s) - custom_(s - 1);
  }
  return 0;
}

void Modulus::scan_constants() {
  const int S = 4096;
  double best1 = -INFINITY, best2 = -INFINITY;
  int arg1 = 0, arg2 = 0;
  for (int s = 0; s <= S; ++s) {
    double t1 = -s * std::log(2.0) + log_m(s + 1) - log_m(s);
    double t2 = -s * std::log(2.0) + log_m(s + 2) - log_m(s);
    if (t1 > best1) best1 = t1, arg1 = s;
    if (t2 > best2) best2 = t2, arg2 = s;
  }
  C_M_ = std::exp(best1);
  c_M_ = std::exp(best2);
  stable_ = std::isfinite(C_M_) && std::isfinite(c_M_) && arg1 < S / 4 && arg2 < S / 4;
}

namespace {

LambdaValue scan_literal(const Modulus& M, double L) {
  double best = 0, arg = 0, prev = 0;
  int downs = 0;
  for (double s = 1; s <= kScanCap; s += 1) {
    double v = s * L - M.log_m(s);
    // ties go to the larger s, matching the closed-form search
    if (v >= best - 1e-12 * (1 + std::fabs(best))) best = std::max(best, v), arg = s;
    downs = v < prev ? downs + 1 : 0;
    if (downs >= 2) return {best, arg};
    prev = v;
  }
  throw Error(ErrorCode::scan_cap_exceeded, kModule, "Lambda scan did not turn over within 1e6 terms");
}

// largest s with log_ratio(s) <= L, using that log_ratio increases (H1)
double argmax_increasing(const Modulus& M, double L, double cap) {
  if (M.log_ratio(1) > L) return 0;
  double lo = 1, hi = 2;
  while (M.log_ratio(hi) <= L) {
    lo = hi;
    hi *= 2;
    if (hi > cap) {
      if (M.log_ratio(cap) <= L)
        throw Error(ErrorCode::scan_cap_exceeded, kModule, "Lambda argmax beyond the term cap");
      hi = cap;
      break;
    }
  }
  if (hi <= 9.0e15) {
    while (hi - lo > 1) {
      double mid = std::floor(0.5 * (lo + hi));
      if (M.log_ratio(mid) <= L) lo = mid;
      else hi = mid;
    }
    return lo;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if (M.log_ratio(mid) <= L) lo = mid;
    else hi = mid;
  }
  return std::floor(lo);
}

LambdaValue lambda_impl(const Modulus& M, double L, double cap) {
  if (!(L > 0)) return {0, 0};
  if (M.kind() == Modulus::custom) return scan_literal(M, L);
  double s = argmax_increasing(M, L, cap);
  if (s == 0) return {0, 0};
  return {s * L - M.log_m(s), s};
}

}  // namespace

LambdaValue lambda_of(const Modulus& M, double y) {
  if (y < 0) throw Error(ErrorCode::invalid_argument, kModule, "Lambda needs y >= 0");
  if (y <= 1) return {0, 0};
  return lambda_impl(M, std::log(y), kScanCap);
}

LambdaValue lambda_log(const Modulus& M, double ln_y) { return lambda_impl(M, ln_y, 1e300); }

double gamma_of(const Modulus& M, double x) {
  if (!(x > 1)) throw Error(ErrorCode::invalid_argument, kModule, "Gamma needs x > 1");
  return lambda_of(M, x).argmax / std::log(x);
}

double gamma_log(const Modulus& M, double ln_x) {
  if (!(ln_x > 0)) throw Error(ErrorCode::invalid_argument, kModule, "Gamma needs x > 1");
  return lambda_log(M, ln_x).argmax / ln_x;
}

HypothesisReport check_hypotheses(const Modulus& M) {
  HypothesisReport r;
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> pick(0, 2000);
  for (int t = 0; t < 2000; ++t) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    int k = std::min({a, b, c}), s = std::max({a, b, c}), l = a + b + c - k - s;
    if (!(k < l && l < s)) continue;
    double lhs = M.log_m(k) * (s - l) + M.log_m(s) * (l - k);
    double rhs = M.log_m(l) * (s - k);
    if (!(lhs > rhs)) r.h1 = false;
  }
  for (int s = 1; s < 2000; ++s)
    if (!(M.log_ratio(s + 1) > M.log_ratio(s))) r.h1 = false;
  double prev = INFINITY;
  for (double s = 16; s <= 1e6; s *= 1.5) {
    double v = M.log_ratio(std::floor(s) + 1) / std::floor(s);
    if (!(v < prev)) r.h2 = false;
    prev = v;
  }
  r.constants_stable = M.constants_stable();
  return r;
}

ConditionAReport check_condition_a(const Modulus& M, double x_lo, double x_hi, int samples, int pairs,
                                   unsigned long long seed) {
  ConditionAReport r;
  if (!(x_lo > 1 && x_hi > x_lo && samples >= 8))
    throw Error(ErrorCode::invalid_argument, kModule, "condition (A) grid needs 1 < x_lo < x_hi, >= 8 samples");
  double llo = std::log(x_lo), lhi = std::log(x_hi);
  std::vector<double> xs(samples), sv(samples), gv(samples);
  for (int i = 0; i < samples; ++i) {
    double lx = llo + (lhi - llo) * i / (samples - 1);
    xs[i] = std::exp(lx);
    sv[i] = lambda_of(M, xs[i]).argmax;
    gv[i] = sv[i] / lx;
    if (i > 0 && sv[i] < sv[i - 1]) r.monotone = false;
  }
  // (I): minima of Gamma over the tails [x_i, x_hi] must grow block by block
  const int blocks = 4;
  double prev_min = -INFINITY;
  for (int b = 0; b < blocks; ++b) {
    int start = b * samples / blocks;
    double m = *std::min_element(gv.begin() + start, gv.end());
    if (!(m > prev_min)) r.growth = false;
    prev_min = m;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(llo, lhi);
  r.worst_increment_margin = INFINITY;
  for (int t = 0; t < pairs; ++t) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    double lx = std::min(a, b), ly = std::max(a, b);
    LambdaValue lx_v = lambda_of(M, std::exp(lx)), ly_v = lambda_of(M, std::exp(ly));
    double margin = ly_v.value - lx_v.value - (ly - lx) * lx_v.argmax;
    r.worst_increment_margin = std::min(r.worst_increment_margin, margin);
    if (margin < -1e-9 * (1 + std::fabs(ly_v.value))) r.increment = false;
  }
  return r;
}

double t1_threshold(const Modulus& M) {
  double last_fail = -1;
  for (double s = 0; s <= 1e7; s += 1) {
    double d = M.log_ratio(s + 1);
    if (d > 0 && s <= 18 * d) last_fail = s;
    if (s > 1000 && s > 4 * last_fail + 1000) break;
  }
  if (last_fail < 0) return 0.25;
  return std::exp(M.log_ratio(last_fail + 1)) / 4;
}

double log_t_tilde(const Modulus& M, double A, double tau) {
  double G = 64 * std::pow(A, 8) * std::pow(tau, 4);
  auto fails = [&](double s) { return s < G * M.log_ratio(s + 1); };
  double lo = 1, hi = 2;
  while (fails(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > 1e300) throw Error(ErrorCode::scan_cap_exceeded, kModule, "Gamma never reaches the KAM threshold");
  }
  for (int it = 0; it < 400 && hi - lo > std::max(1.0, 1e-13 * hi); ++it) {
    double mid = 0.5 * (lo + hi);
    if (fails(mid)) lo = mid;
    else hi = mid;
  }
  double l_gamma = M.log_ratio(std::floor(lo) + 1);
  // Lambda(x)/ln x is non-decreasing; bisect for Lambda(x) >= ln x
  double a = 1e-9, b = 1;
  while (lambda_log(M, b).value < b) {
    a = b;
    b *= 2;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (a + b);
    if (lambda_log(M, mid).value >= mid) b = mid;
    else a = mid;
  }
  return std::max({std::log(t1_threshold(M)), l_gamma, b});
}

}  // namespace qplab::ud
