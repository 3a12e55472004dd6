#include "doctest.h"

#include "qplab/su11.hpp"

#include <random>

using namespace qplab;
using namespace qplab::kam;
using ud::FourierSeries;
using ud::MatSeries;

namespace {

FourierSeries random_real(std::mt19937_64& rng, int K) {
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

FourierSeries random_complex(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> n(0, 1);
  FourierSeries f(K, false);
  for (int k = -K; k <= K; ++k) f.at(k) = cplx(n(rng), n(rng));
  return f;
}

MatSeries random_sl2(std::mt19937_64& rng, int K) {
  auto x = random_real(rng, K), y = random_real(rng, K), z = random_real(rng, K);
  return MatSeries(x, y + z, y - z, -x);
}

}  // namespace

TEST_CASE("conjugation matrix maps sl(2,R) into su(1,1)") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 1);
  for (int t = 0; t < 50; ++t) {
    double x = n(rng), y = n(rng), z = n(rng);
    Mat2c X(x, y + z, y - z, -x);
    Mat2c W = to_su11(X);
    CHECK(std::abs(W.a - cplx(0, z)) < 1e-14);
    CHECK(std::abs(W.b - cplx(x, -y)) < 1e-14);
    CHECK(std::abs(W.c - std::conj(W.b)) < 1e-14);
    CHECK(std::abs(W.d + W.a) < 1e-14);
    CHECK((from_su11(W) - X).max_abs() < 1e-14);
  }
  // J <-> {1, 0}
  Mat2c J(0, 1, -1, 0);
  CHECK((to_su11(J) - Mat2c(cplx(0, 1), 0, 0, cplx(0, -1))).max_abs() < 1e-15);
}

TEST_CASE("series round trip agrees with the pointwise map") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto X = random_sl2(rng, 6);
    auto s = to_su11(X);
    auto back = from_su11(s);
    for (int i = 0; i < 4; ++i)
      for (int k = -6; k <= 6; ++k) CHECK(std::abs(back.e[i][k] - X.e[i][k]) <= 1e-13);
    for (double th : {0.1, 0.77}) {
      Mat2c want = to_su11(X.eval(th));
      CHECK((su11_value(s, th) - want).max_abs() < 1e-12);
      CHECK((su11_matrix(s).eval(th) - want).max_abs() < 1e-12);
    }
    auto again = su11_from_matrix(su11_matrix(s));
    for (int k = -6; k <= 6; ++k) {
      CHECK(std::abs(again.t[k] - s.t[k]) < 1e-15);
      CHECK(std::abs(again.v[k] - s.v[k]) < 1e-15);
    }
  }
}

TEST_CASE("resonant split") {
  std::mt19937_64 rng(3);
  Su11Series pure_v{FourierSeries(3, true), random_complex(rng, 3)};
  auto a = split_resonant(pure_v, 4);
  CHECK(a.re.t.l1() == 0);
  CHECK(a.re.v.l1() == 0);

  Su11Series pure_t{random_real(rng, 5), FourierSeries(0, false)};
  auto b = split_resonant(pure_t, 4);
  CHECK(b.nre.t.l1() == 0);
  CHECK(b.nre.v.l1() == 0);
  CHECK((b.re.t - pure_t.t).l1() == 0);

  for (int t = 0; t < 20; ++t) {
    Su11Series g{random_real(rng, 7), random_complex(rng, 9)};
    int Q = 1 + static_cast<int>(rng() % 10);
    auto s = split_resonant(g, Q);
    for (int k = -9; k <= 9; ++k) {
      CHECK((s.nre.v[k] + s.re.v[k]) == g.v[k]);
      CHECK((s.nre.t[k] + s.re.t[k]) == g.t[k]);
      if (std::abs(k) < Q) CHECK(s.re.v[k] == cplx(0));
      else CHECK(s.nre.v[k] == cplx(0));
    }
  }
}
