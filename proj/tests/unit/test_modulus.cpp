#include "doctest.h"

#include "qplab/error.hpp"
#include "qplab/norms.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qplab;
using namespace qplab::ud;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::vector<Modulus> all_kinds() {
  return {Modulus::make_analytic(), Modulus::make_gevrey(0.7), Modulus::make_power(3)};
}

double brute_lambda(const Modulus& M, double y, int smax) {
  double best = 0;
  for (int s = 0; s <= smax; ++s) best = std::max(best, s * std::log(y) - M.log_m(s));
  return best;
}

FourierSeries random_series(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> n(0, 1);
  FourierSeries f(K, true);
  f.at(0) = n(rng);
  for (int k = 1; k <= K; ++k) {
    cplx c(n(rng), n(rng));
    f.at(k) = c;
    f.at(-k) = std::conj(c);
  }
  return f;
}

}  // namespace

TEST_CASE("Lambda values") {
  for (auto& M : all_kinds()) {
    CHECK(lambda_of(M, 1).value == 0);
    CHECK(lambda_of(M, 0.5).value == 0);
  }
  auto A = Modulus::make_analytic();
  auto l = lambda_of(A, std::exp(1.0));
  CHECK(l.value == doctest::Approx(2 - std::log(2.0)).epsilon(1e-12));
  CHECK(l.value == doctest::Approx(brute_lambda(A, std::exp(1.0), 100)));
  CHECK(l.argmax == 2);
  for (double y : {3.0, 17.5, 200.0}) CHECK(lambda_of(A, y).value == doctest::Approx(brute_lambda(A, y, 1000)));
  auto P = Modulus::make_power(3);
  double ratio = lambda_of(P, 1e6).value / std::pow(std::log(1e6), 3);
  CHECK(ratio > 0.9);
  CHECK(ratio < 1.1);
  auto G = Modulus::make_gevrey(0.7);
  for (double y : {5.0, 50.0, 500.0}) CHECK(lambda_of(G, y).value == doctest::Approx(brute_lambda(G, y, 3000)));
}

TEST_CASE("custom modulus uses the literal scan") {
  auto C = Modulus::make_custom([](double s) { return std::lgamma(s + 1); }, "factorial");
  auto A = Modulus::make_analytic();
  for (double y : {2.0, 10.0, 123.0}) {
    CHECK(lambda_of(C, y).value == doctest::Approx(lambda_of(A, y).value));
    CHECK(lambda_of(C, y).argmax == lambda_of(A, y).argmax);
  }
  auto bad = Modulus::make_custom([](double s) { return 0.0 * s; }, "flat");
  CHECK_THROWS_AS(lambda_of(bad, 10), Error);
}

TEST_CASE("hypotheses and constants") {
  for (auto& M : all_kinds()) {
    auto h = check_hypotheses(M);
    CHECK(h.ok());
    CHECK(std::isfinite(M.C_M()));
    CHECK(std::isfinite(M.c_M()));
  }
  CHECK_THROWS_AS(Modulus::make_power(2), Error);
  CHECK_THROWS_AS(Modulus::make_gevrey(1.5), Error);
}

TEST_CASE("Gamma and condition (A)") {
  auto P = Modulus::make_power(3);
  double prev = 0;
  for (double x = 2; x <= 1e4; x *= 1.01) {
    double s = lambda_of(P, x).argmax;
    CHECK(gamma_of(P, x) * std::log(x) == doctest::Approx(s));
    CHECK(std::fabs(s - std::round(s)) < 1e-9);
    CHECK(s >= prev);
    prev = s;
  }
  auto rep = check_condition_a(P, 1.5, 1e4, 64, 1000, 99);
  CHECK(rep.increment);
  auto A = Modulus::make_analytic();
  double x = 1e3;
  double g = gamma_of(A, x);
  CHECK(std::fabs(g / (x / std::log(x)) - 1) < 0.15);
  for (auto& M : all_kinds()) CHECK(check_condition_a(M, 2, 1e5, 64, 300, 5).ok());
}

TEST_CASE("T1 and the KAM threshold") {
  auto A = Modulus::make_analytic();
  double T1 = t1_threshold(A);
  CHECK(T1 > 1);
  // Gamma(4t) > 18 past T1: s(4t) = floor(4t) for the analytic modulus
  for (double t = T1; t < T1 * 50; t *= 1.1) CHECK(gamma_of(A, 4 * t) > 18);
  double lt = log_t_tilde(A, 25, 2);
  CHECK(lt >= std::log(T1));
  CHECK(gamma_log(A, lt * 1.01) >= 64 * std::pow(25.0, 8) * 16);
}

TEST_CASE("norm_mr basics") {
  auto A = Modulus::make_analytic();
  auto c = FourierSeries::constant(2.5);
  CHECK(norm_mr(c, A, 0.1).value == doctest::Approx(norm_constant() * 2.5));
  FourierSeries e(1, false);
  e.at(1) = 1;
  double want = 0;
  for (int s = 0; s < 60; ++s) want = std::max(want, (1.0 + s) * (1.0 + s) * std::pow(0.2 * std::numbers::pi, s) / std::tgamma(s + 1.0));
  auto v = norm_mr(e, A, 0.1);
  CHECK(v.value == doctest::Approx(norm_constant() * want));
  CHECK(v.cap_sufficient);
  CHECK(norm_lambda(c, A, 0.1).value == doctest::Approx(2.5));
}

TEST_CASE("Banach algebra, Cauchy, decay and norm comparison") {
  std::mt19937_64 rng(17);
  for (auto& M : all_kinds()) {
    for (int t = 0; t < 100; ++t) {
      int K1 = 1 + rng() % 6, K2 = 1 + rng() % 6;
      double r = 0.05 + 0.2 * (rng() % 100) / 100.0;
      auto f = random_series(rng, K1), g = random_series(rng, K2);
      double nf = norm_mr(f, M, r).value, ng = norm_mr(g, M, r).value;
      CHECK(norm_mr(mul(f, g), M, r).value <= nf * ng * (1 + 1e-12));
      CHECK(norm_mr(derive(f), M, r / 2).value <= M.C_M() / r * nf * (1 + 1e-12));
      for (int k = -K1; k <= K1; ++k)
        CHECK(std::abs(f[k]) <= nf * std::exp(-lambda_of(M, kTwoPi * std::abs(k) * r).value) * (1 + 1e-12));
      CHECK(nf <= c_mr_from_lambda() * norm_lambda(f, M, 2 * r).value * (1 + 1e-12));
      CHECK(norm_lambda(f, M, r / 2).value <= (4 + M.c_M()) / (kTwoPi * r) * nf * (1 + 1e-12));
    }
  }
}

TEST_CASE("tail bounds past T1") {
  auto G = Modulus::make_gevrey(0.7);
  const double r = 0.5;
  FourierSeries f(1200, true);
  for (int k = -1200; k <= 1200; ++k) f.at(k) = std::exp(-std::pow(kTwoPi * std::abs(k), 0.7));
  double T1 = t1_threshold(G);
  for (int K : {static_cast<int>(std::ceil(T1 / r)), static_cast<int>(std::ceil(T1 / r)) + 100}) {
    auto b = tail_bounds(f, G, r, K);
    REQUIRE(b.applicable);
    auto tail = split_truncate(f, K).tail;
    CHECK(tail.l1() <= b.c0);
    CHECK(norm_mr(tail, G, r / 2).value <= b.mr_half);
  }
}
