#include "qplab/norms.hpp"

#include "qplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace qplab::ud {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double logsumexp(const std::vector<double>& v) {
  double m = -INFINITY;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double sup_weight(double base) {
  double best = 0;
  for (int s = 0; s < 200; ++s) best = std::max(best, (1.0 + s) * (1.0 + s) * std::pow(base, s));
  return best;
}

}  // namespace

double norm_constant() { return 4 * std::numbers::pi * std::numbers::pi / 3; }

NormValue norm_mr(const FourierSeries& f, const Modulus& M, double r, int s_cap) {
  if (!(r > 0)) throw Error(ErrorCode::invalid_argument, "udspace", "width r must be positive");
  NormValue out;
  std::vector<double> lc, lk;
  double l0 = -INFINITY;
  int Keff = 0;
  for (int k = -f.K(); k <= f.K(); ++k) {
    double a = std::abs(f[k]);
    if (a == 0) continue;
    if (k == 0) {
      l0 = std::log(a);
    } else {
      lc.push_back(std::log(a));
      lk.push_back(std::log(kTwoPi * std::abs(k)));
      Keff = std::max(Keff, std::abs(k));
    }
  }
  if (lc.empty() && !std::isfinite(l0)) return out;
  if (s_cap < 0) {
    double y = kTwoPi * Keff * r;
    int sy = y > 1 ? static_cast<int>(lambda_of(M, y).argmax) : 0;
    s_cap = 2 * sy + 64;
  }
  out.s_cap = s_cap;
  const double lcst = std::log(norm_constant()), lr = std::log(r);
  std::vector<double> terms(lc.size());
  double best = -INFINITY, prev = -INFINITY, last = -INFINITY;
  for (int s = 0; s <= s_cap; ++s) {
    for (std::size_t i = 0; i < lc.size(); ++i) terms[i] = lc[i] + s * lk[i];
    double logN = logsumexp(terms);
    if (s == 0) logN = std::log(std::exp(logN) + std::exp(l0));
    double t = lcst + 2 * std::log1p(static_cast<double>(s)) + s * lr + logN - M.log_m(s);
    if (t > best) {
      best = t;
      out.argmax_s = s;
    }
    prev = last;
    last = t;
  }
  out.cap_sufficient = s_cap == 0 || last < prev || !std::isfinite(last);
  out.log_value = best;
  out.value = std::exp(best);
  return out;
}

NormValue norm_mr(const MatSeries& f, const Modulus& M, double r, int s_cap) {
  NormValue best;
  bool first = true;
  for (const auto& e : f.e) {
    NormValue v = norm_mr(e, M, r, s_cap);
    if (first || v.log_value > best.log_value) {
      bool ok = first ? v.cap_sufficient : (best.cap_sufficient && v.cap_sufficient);
      best = v;
      best.cap_sufficient = ok;
    } else {
      best.cap_sufficient = best.cap_sufficient && v.cap_sufficient;
    }
    first = false;
  }
  return best;
}

NormValue norm_lambda(const FourierSeries& f, const Modulus& M, double r) {
  if (!(r > 0)) throw Error(ErrorCode::invalid_argument, "udspace", "width r must be positive");
  std::vector<double> terms;
  for (int k = -f.K(); k <= f.K(); ++k) {
    double a = std::abs(f[k]);
    if (a == 0) continue;
    terms.push_back(std::log(a) + lambda_of(M, kTwoPi * std::abs(k) * r).value);
  }
  NormValue out;
  if (terms.empty()) return out;
  out.log_value = logsumexp(terms);
  out.value = std::exp(out.log_value);
  return out;
}

double c_mr_from_lambda() { return norm_constant() * sup_weight(0.5); }

double c_tail_mr() { return norm_constant() * sup_weight(2.0 / 3.0) / 4; }

TailBounds tail_bounds(const FourierSeries& f, const Modulus& M, double r, int K) {
  TailBounds b;
  double Kr = K * r;
  b.applicable = Kr >= t1_threshold(M);
  double nf = norm_mr(f, M, r).value;
  double pre = nf / (K * r * r);
  b.c0 = pre * std::exp(-lambda_of(M, std::numbers::pi * Kr).value);
  double s4 = 4 * Kr > 1 ? lambda_of(M, 4 * Kr).argmax : 0;
  b.mr_half = c_tail_mr() * pre * std::exp(-s4 / 9);
  return b;
}

double norm(const FourierSeries& f, const NormSpec& spec) { return norm_mr(f, spec.M, spec.r).value; }

double norm(const MatSeries& f, const NormSpec& spec) { return norm_mr(f, spec.M, spec.r).value; }

}  // namespace qplab::ud
