#include "doctest.h"

#include "qplab/contfrac.hpp"
#include "qplab/error.hpp"

#include <random>

using namespace qplab;
using namespace qplab::cf;

namespace {

// Partial quotients of (P + sqrt(D)) / Q by the integer recurrence for quadratic surds.
std::vector<long long> surd_quotients(long long P, long long D, long long Q, int n) {
  long long r = 0;
  while ((r + 1) * (r + 1) <= D) ++r;
  std::vector<long long> out;
  for (int i = 0; i < n; ++i) {
    long long a = (P + r) / Q;
    out.push_back(a);
    P = a * Q - P;
    Q = (D - P * P) / Q;
  }
  return out;
}

Alpha random_alpha(std::mt19937_64& rng) {
  HPFloat x = 0, w = 1;
  for (int i = 0; i < 6; ++i) {
    w /= HPFloat(std::numeric_limits<std::uint64_t>::max()) + 1;
    x += HPFloat(rng()) * w;
  }
  return from_hp(x, "random");
}

}  // namespace

TEST_CASE("golden mean gives Fibonacci denominators") {
  auto e = expand(golden(), 7);
  std::vector<int> q{1, 1, 2, 3, 5, 8, 13};
  for (int k = 1; k <= 7; ++k) CHECK(e.a[k] == 1);
  for (int k = 0; k < 7; ++k) CHECK(e.q[k] == q[k]);
}

TEST_CASE("sqrt2 - 1 matches the quadratic-surd recurrence") {
  // 1/(sqrt2 - 1) = (1 + sqrt2)/1
  auto ref = surd_quotients(1, 2, 1, 5);
  auto e = expand(parse_alpha("sqrt2m1"), 5);
  std::vector<int> q{1, 2, 5, 12, 29};
  for (int k = 1; k <= 5; ++k) CHECK(e.a[k] == ref[k - 1]);
  for (int k = 0; k < 5; ++k) CHECK(e.q[k] == q[k]);
}

TEST_CASE("rational input reproduces itself") {
  auto e = expand(parse_alpha("5/7"), 10);
  CHECK(e.terminated);
  REQUIRE(e.depth() == 3);
  CHECK(e.a[1] == 1);
  CHECK(e.a[2] == 2);
  CHECK(e.a[3] == 2);
  CHECK(e.p.back() == 5);
  CHECK(e.q.back() == 7);
}

TEST_CASE("decimal strings are exact rationals") {
  auto e = expand(parse_alpha("0.375"), 10);
  CHECK(e.terminated);
  CHECK(e.p.back() == 3);
  CHECK(e.q.back() == 8);
  CHECK_THROWS_AS(parse_alpha("1.5"), Error);
  CHECK_THROWS_AS(parse_alpha("abc"), Error);
}

TEST_CASE("precision exhaustion is reported") {
  try {
    expand(golden(), 2000);
    FAIL("expected precision_exhausted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::precision_exhausted);
  }
  auto e = expand_max(golden(), 2000);
  CHECK(e.precision_limited);
  CHECK(e.depth() > 150);
}

TEST_CASE("convergent invariants on random alpha") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 20; ++t) {
    auto e = expand(random_alpha(rng), 25);
    for (int n = 0; n + 1 <= e.depth(); ++n) {
      // for n = 0 and alpha > 1/2 the nearest integer to q_0 alpha is 1, not p_0
      HPFloat d = n == 0 ? e.beta[0] : dist_to_int(e.alpha, e.q[n]);
      CHECK(d * HPFloat(e.q[n] + e.q[n + 1]) > 1);
      CHECK(d * HPFloat(e.q[n + 1]) <= 1);
      // beta_n = |q_n alpha - p_n| = 1/(q_{n+1} + alpha_{n+1} q_n)
      HPFloat lhs = abs(HPFloat(e.q[n]) * e.alpha.value - HPFloat(e.p[n]));
      HPFloat rhs = 1 / (HPFloat(e.q[n + 1]) + e.tail[n + 1] * HPFloat(e.q[n]));
      CHECK(static_cast<double>(abs(lhs - e.beta[n]) / e.beta[n]) < 1e-20);
      CHECK(static_cast<double>(abs(rhs - e.beta[n]) / e.beta[n]) < 1e-20);
    }
  }
}

TEST_CASE("best approximation holds exhaustively for small q_n") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 3; ++t) {
    auto e = expand(random_alpha(rng), 30);
    for (int n = 1; n <= e.depth() && e.q[n] <= 10000; ++n) {
      HPFloat floor_prev = dist_to_int(e.alpha, e.q[n - 1]);
      long long qn = e.q[n].convert_to<long long>();
      for (long long k = 1; k < qn; ++k) REQUIRE(dist_to_int(e.alpha, BigInt(k)) >= floor_prev);
    }
  }
}

TEST_CASE("expansion is deterministic") {
  auto a = expand(parse_alpha("sqrt2m1"), 40), b = expand(parse_alpha("sqrt2m1"), 40);
  CHECK(a.q == b.q);
  CHECK(a.log_beta == b.log_beta);
}

TEST_CASE("CD bridge predicate") {
  auto e = expand(golden(), 12);
  int m = -1, n = -1;
  for (int i = 0; i <= e.depth(); ++i) {
    if (e.q[i] == 2 && m < 0) m = i;
    if (e.q[i] == 8 && n < 0) n = i;
  }
  REQUIRE(m >= 0);
  REQUIRE(n >= 0);
  CHECK(is_cd_bridge(e, m, n, 3, 3, 3));
  CHECK_FALSE(is_cd_bridge(e, m, n, 3, 4, 4));
  CHECK(is_cd_bridge(e, 0, 0, 1, 2, 3));
  CHECK_THROWS_AS(is_cd_bridge(e, 0, 99, 1, 1, 1), Error);
}

TEST_CASE("bridge selection passes the independent checker") {
  for (auto a : {golden(), parse_alpha("sqrt2m1")}) {
    auto e = expand_max(a);
    auto sel = select_bridges(e, 25);
    CHECK(sel.index[0] == 0);
    auto rep = check_bridge_invariants(e, sel);
    CHECK_MESSAGE(rep.ok, (rep.failures.empty() ? "" : rep.failures[0]));
  }
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto e = expand_max(random_alpha(rng));
    auto sel = select_bridges(e, 25);
    CHECK(check_bridge_invariants(e, sel).ok);
  }
}

TEST_CASE("degenerate selection") {
  auto e = expand_max(golden(), 0);
  auto sel = select_bridges(e, 25);
  CHECK(sel.size() == 1);
  CHECK(sel.exhausted);
}

TEST_CASE("tampered selections are rejected") {
  auto e = expand_max(golden());
  auto sel = select_bridges(e, 25);
  auto bad = sel;
  bad.index[0] = 1;
  CHECK_FALSE(check_bridge_invariants(e, bad).ok);
  bad = sel;
  bad.index.insert(bad.index.begin() + 1, 1);
  bad.via_bridge.insert(bad.via_bridge.begin() + 1, false);
  CHECK_FALSE(check_bridge_invariants(e, bad).ok);
}

TEST_CASE("Diophantine conditions") {
  auto g = expand(golden(), 20);
  DiophantineMode f;
  f.v = 0.2;
  f.tau = 1.5;
  CHECK(check_diophantine(g, f, 1000).holds);

  auto r = expand(parse_alpha("5/7"), 10);
  f.v = 1e-6;
  auto res = check_diophantine(r, f, 10);
  CHECK_FALSE(res.holds);
  CHECK(res.worst_k == 7);

  DiophantineMode rot;
  rot.kind = DiophantineMode::rotation;
  rot.rho = 0;
  rot.gamma = 0.1;
  rot.tau = 1.5;
  auto rr = check_diophantine(g, rot, 50);
  CHECK_FALSE(rr.holds);
  CHECK(rr.worst_k == 0);
  CHECK(rr.worst_margin == doctest::Approx(-0.1));
}
