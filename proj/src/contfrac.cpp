#include "qplab/contfrac.hpp"

#include "qplab/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>

namespace qplab::cf {

namespace {

const char* kModule = "contfrac";

[[noreturn]] void fail(ErrorCode c, const std::string& msg) { throw Error(c, kModule, msg); }

HPFloat to_hp(const BigRat& r) {
  return HPFloat(boost::multiprecision::numerator(r)) / HPFloat(boost::multiprecision::denominator(r));
}

double log_hp(const HPFloat& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(boost::multiprecision::log(x));
}

BigRat parse_decimal(const std::string& s) {
  std::size_t i = 0;
  BigInt mant = 0;
  long long scale = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '.') {
      if (dot) fail(ErrorCode::invalid_argument, "malformed decimal '" + s + "'");
      dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      if (dot) ++scale;
      any = true;
    } else {
      break;
    }
  }
  long long ex = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    try {
      std::size_t used = 0;
      ex = std::stoll(s.substr(i + 1), &used);
      i += 1 + used;
    } catch (...) {
      fail(ErrorCode::invalid_argument, "malformed exponent in '" + s + "'");
    }
  }
  if (!any || i != s.size()) fail(ErrorCode::invalid_argument, "cannot parse alpha '" + s + "'");
  long long e = ex - scale;
  BigInt ten = 10;
  if (e >= 0) return BigRat(mant * boost::multiprecision::pow(ten, static_cast<unsigned>(e)));
  return BigRat(mant, boost::multiprecision::pow(ten, static_cast<unsigned>(-e)));
}

void check_unit_interval(const HPFloat& v, const std::string& text) {
  if (!(v > 0 && v < 1)) fail(ErrorCode::invalid_argument, "alpha must lie in (0,1), got " + text);
}

}  // namespace

int working_bits() { return std::numeric_limits<HPFloat>::digits; }

Alpha golden() {
  Alpha a;
  a.value = (boost::multiprecision::sqrt(HPFloat(5)) - 1) / 2;
  a.bits = working_bits();
  a.label = "golden";
  return a;
}

Alpha rational(const BigInt& p, const BigInt& q) {
  if (q <= 0) fail(ErrorCode::invalid_argument, "denominator must be positive");
  Alpha a;
  a.exact = BigRat(p, q);
  a.value = to_hp(*a.exact);
  a.bits = working_bits();
  a.label = p.str() + "/" + q.str();
  check_unit_interval(a.value, a.label);
  return a;
}

Alpha from_hp(const HPFloat& x, std::string label) {
  Alpha a;
  a.value = x;
  a.bits = working_bits();
  a.label = std::move(label);
  check_unit_interval(a.value, a.label);
  return a;
}

Alpha parse_alpha(const std::string& text) {
  if (text == "golden") return golden();
  if (text == "sqrt2m1") {
    Alpha a;
    a.value = boost::multiprecision::sqrt(HPFloat(2)) - 1;
    a.bits = working_bits();
    a.label = "sqrt2m1";
    return a;
  }
  auto slash = text.find('/');
  if (slash != std::string::npos) {
    try {
      BigInt p(text.substr(0, slash)), q(text.substr(slash + 1));
      return rational(p, q);
    } catch (const Error&) {
      throw;
    } catch (...) {
      fail(ErrorCode::invalid_argument, "cannot parse rational '" + text + "'");
    }
  }
  // A decimal literal is an exact rational; it is expanded as such.
  BigRat r = parse_decimal(text);
  Alpha a;
  a.exact = r;
  a.value = to_hp(r);
  a.bits = working_bits();
  a.label = text;
  check_unit_interval(a.value, text);
  return a;
}

namespace {

void push_convergent(CfExpansion& e, const BigInt& ak) {
  std::size_t k = e.q.size();  // index of the new convergent
  e.a.push_back(ak);
  BigInt pk = ak * e.p[k - 1] + (k >= 2 ? e.p[k - 2] : BigInt(1));
  BigInt qk = ak * e.q[k - 1] + (k >= 2 ? e.q[k - 2] : BigInt(0));
  // seeds p_{-1} = 1, q_{-1} = 0 reproduce p_1 = 1, q_1 = a_1
  e.p.push_back(pk);
  e.q.push_back(qk);
  e.log_q.push_back(log_hp(HPFloat(qk)));
}

CfExpansion run(const Alpha& alpha, int n_max, bool strict) {
  if (n_max < 0) fail(ErrorCode::invalid_argument, "n_max must be non-negative");
  CfExpansion e;
  e.alpha = alpha;
  e.a.push_back(0);
  e.p.push_back(0);
  e.q.push_back(1);
  e.log_q.push_back(0.0);

  if (alpha.exact) {
    BigRat t = *alpha.exact;
    e.tail.push_back(to_hp(t));
    e.beta.push_back(e.tail.back());
    e.log_beta.push_back(log_hp(e.beta.back()));
    for (int k = 1; k <= n_max; ++k) {
      if (t == 0) {
        e.terminated = true;
        break;
      }
      BigRat inv = 1 / t;
      BigInt ak = boost::multiprecision::numerator(inv) / boost::multiprecision::denominator(inv);
      t = inv - BigRat(ak);
      push_convergent(e, ak);
      e.tail.push_back(to_hp(t));
      e.beta.push_back(e.beta.back() * e.tail.back());
      e.log_beta.push_back(log_hp(e.beta.back()));
    }
    if (!e.terminated && t == 0) e.terminated = true;
    return e;
  }

  // Gauss-map error grows like 1/beta_{k-1}^2; keep 40 spare bits for the floor.
  const double budget = 0.5 * (alpha.bits - 40);
  HPFloat t = alpha.value;
  e.tail.push_back(t);
  e.beta.push_back(t);
  e.log_beta.push_back(log_hp(t));
  for (int k = 1; k <= n_max; ++k) {
    double lost = -e.log_beta.back() / std::log(2.0);
    if (lost > budget) {
      e.precision_limited = true;
      if (strict)
        fail(ErrorCode::precision_exhausted,
             "working precision exhausted after " + std::to_string(k - 1) + " partial quotients (" +
                 alpha.label + ")");
      break;
    }
    HPFloat inv = 1 / t;
    HPFloat fl = boost::multiprecision::floor(inv);
    BigInt ak = fl.convert_to<BigInt>();
    t = inv - fl;
    push_convergent(e, ak);
    e.tail.push_back(t);
    e.beta.push_back(e.beta.back() * t);
    e.log_beta.push_back(log_hp(e.beta.back()));
  }
  return e;
}

}  // namespace

CfExpansion expand(const Alpha& alpha, int n_max) {
  if (n_max < 1) fail(ErrorCode::invalid_argument, "n_max must be at least 1");
  return run(alpha, n_max, true);
}

CfExpansion expand_max(const Alpha& alpha, int n_cap) { return run(alpha, n_cap, false); }

HPFloat dist_to_int(const Alpha& alpha, const BigInt& k) {
  if (alpha.exact) {
    BigRat x = BigRat(k) * *alpha.exact;
    BigInt num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    BigInt r = num % den;
    if (r < 0) r += den;
    BigInt d = std::min<BigInt>(r, BigInt(den - r));
    return HPFloat(d) / HPFloat(den);
  }
  HPFloat x = HPFloat(k) * alpha.value;
  HPFloat f = x - boost::multiprecision::floor(x);
  return std::min(f, 1 - f);
}

int compare_pow(const CfExpansion& cf, int i, double x, int j) {
  double lhs = x * cf.log_q.at(i);
  double rhs = cf.log_q.at(j);
  double tol = 1e-12 * std::max(1.0, std::max(std::fabs(lhs), std::fabs(rhs)));
  if (lhs - rhs > tol) return 1;
  if (rhs - lhs > tol) return -1;
  double xr = std::round(x);
  if (xr == x && x >= 0) {
    std::size_t bits = cf.q[i] == 0 ? 0 : boost::multiprecision::msb(cf.q[i]) + 1;
    if (bits * x <= 1 << 20) {
      BigInt pw = boost::multiprecision::pow(cf.q[i], static_cast<unsigned>(xr));
      if (pw > cf.q[j]) return 1;
      if (pw < cf.q[j]) return -1;
      return 0;
    }
  }
  return 0;
}

bool is_cd_bridge(const CfExpansion& cf, int m, int n, double A, double B, double C) {
  if (!(A > 0 && A <= B && B <= C))
    fail(ErrorCode::invalid_argument, "bridge constants must satisfy 0 < A <= B <= C");
  if (m < 0 || n < m || n > cf.depth())
    fail(ErrorCode::index_out_of_range,
         "bridge indices (" + std::to_string(m) + "," + std::to_string(n) + ") outside 0.." +
             std::to_string(cf.depth()));
  for (int i = m; i < n; ++i)
    if (compare_pow(cf, i, A, i + 1) < 0) return false;
  return compare_pow(cf, m, B, n) <= 0 && compare_pow(cf, m, C, n) >= 0;
}

namespace {

enum class Outcome { fail, done };

struct Selector {
  const CfExpansion& cf;
  double A, A3, A4;
  long long nodes = 0;
  std::vector<int> path;
  std::vector<bool> bridged;

  Outcome extend(bool needs_forward) {
    if (++nodes > 2000000) fail(ErrorCode::selection_failed, "search budget exceeded");
    int nk = path.back();
    int last = cf.depth() - 1;  // a candidate n needs q_{n+1}
    if (nk + 1 > cf.depth()) return Outcome::done;
    for (int n = nk + 1; n <= last; ++n) {
      if (compare_pow(cf, nk + 1, A4, n) < 0) return Outcome::fail;
      if (compare_pow(cf, nk + 1, A, n + 1) > 0) continue;
      if (needs_forward && !is_cd_bridge(cf, nk, n, A, A, A3)) continue;
      bool jump = compare_pow(cf, n, A, n + 1) <= 0;
      bool back = !jump && is_cd_bridge(cf, nk + 1, n, A, A, A3);
      if (!jump && !back) continue;
      path.push_back(n);
      bridged.push_back(!jump);
      if (extend(!jump) == Outcome::done) return Outcome::done;
      path.pop_back();
      bridged.pop_back();
    }
    return Outcome::done;  // range ran out before the bound closed the scan
  }
};

}  // namespace

BridgeSelection select_bridges(const CfExpansion& cf, double A) {
  if (!(A >= 1)) fail(ErrorCode::invalid_argument, "bridge constant must be >= 1");
  Selector s{cf, A, A * A * A, A * A * A * A, 0, {}, {}};
  s.path = {0};
  s.bridged = {false};
  if (s.extend(false) == Outcome::fail)
    fail(ErrorCode::selection_failed, "no admissible subsequence within the computed range (" +
                                          std::to_string(cf.depth()) + " convergents)");
  BridgeSelection sel;
  sel.A = A;
  sel.index = s.path;
  sel.via_bridge = s.bridged;
  sel.exhausted = true;
  sel.forward_pending = s.bridged.back();
  return sel;
}

InvariantReport check_bridge_invariants(const CfExpansion& cf, const BridgeSelection& sel) {
  InvariantReport rep;
  auto bad = [&](const std::string& m) {
    rep.ok = false;
    rep.failures.push_back(m);
  };
  const double A = sel.A, A3 = A * A * A, A4 = A3 * A;
  if (sel.index.empty() || sel.index[0] != 0 || cf.q[0] != 1) {
    bad("Q_0 must be q_0 = 1");
    return rep;
  }
  int K = sel.size();
  for (int k = 0; k + 1 < K; ++k)
    if (sel.index[k + 1] <= sel.index[k]) bad("indices not increasing at k=" + std::to_string(k));
  if (!rep.ok) return rep;
  for (int k = 0; k < K; ++k) {
    int n = sel.index[k];
    std::string at = " at k=" + std::to_string(k);
    if (n + 1 > cf.depth()) {
      if (k + 1 < K) bad("companion Qbar missing" + at);
      continue;
    }
    if (k + 1 < K) {
      int nn = sel.index[k + 1];
      if (nn + 1 > cf.depth()) bad("companion Qbar missing" + std::to_string(k + 1));
      else if (compare_pow(cf, n + 1, A, nn + 1) > 0) bad("Qbar growth fails" + at);
      if (compare_pow(cf, n + 1, A4, nn) < 0) bad("Q_{k+1} > Qbar_k^{A^4}" + at);
    }
    bool jump = compare_pow(cf, n, A, n + 1) <= 0;
    if (jump) continue;
    if (k == 0) {
      bad("disjunction fails" + at);
      continue;
    }
    bool back = is_cd_bridge(cf, sel.index[k - 1] + 1, n, A, A, A3);
    if (!back) bad("backward bridge fails" + at);
    if (k + 1 < K) {
      if (!is_cd_bridge(cf, n, sel.index[k + 1], A, A, A3)) bad("forward bridge fails" + at);
    } else if (!sel.exhausted) {
      bad("forward bridge missing and range not exhausted" + at);
    }
  }
  return rep;
}

DiophantineResult check_diophantine(const CfExpansion& cf, const DiophantineMode& mode, long long K) {
  if (K < 1) fail(ErrorCode::invalid_argument, "cutoff K must be >= 1");
  DiophantineResult res;
  bool first = true;
  auto consider = [&](long long k, double margin) {
    if (first || margin < res.worst_margin) {
      res.worst_k = k;
      res.worst_margin = margin;
      first = false;
    }
  };
  if (mode.kind == DiophantineMode::frequency) {
    for (long long k = 1; k <= K; ++k) {
      double d = static_cast<double>(dist_to_int(cf.alpha, BigInt(k)));
      double margin = d - mode.v / std::pow(static_cast<double>(k), mode.tau);
      consider(k, margin);
      if (!(margin > 0)) res.holds = false;
    }
    return res;
  }
  if (!(mode.rho >= 0 && mode.rho < 0.5))
    fail(ErrorCode::invalid_argument, "rotation mode needs rho in [0, 1/2)");
  HPFloat two_rho = 2 * HPFloat(mode.rho);
  for (long long k = -K; k <= K; ++k) {
    HPFloat x = HPFloat(k) * cf.alpha.value;
    double bracket = std::pow(static_cast<double>(std::max<long long>(1, std::llabs(k))), -mode.tau);
    for (int sgn : {1, -1}) {
      HPFloat y = x + sgn * two_rho;
      HPFloat f = y - boost::multiprecision::floor(y);
      double d = static_cast<double>(std::min(f, 1 - f));
      double margin = d - mode.gamma * bracket;
      consider(k, margin);
      if (!(margin >= 0)) res.holds = false;
    }
  }
  return res;
}

}  // namespace qplab::cf
