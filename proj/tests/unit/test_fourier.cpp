#include "doctest.h"

#include "qplab/error.hpp"
#include "qplab/fourier.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qplab;
using namespace qplab::ud;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

FourierSeries random_real(std::mt19937_64& rng, int K, double decay) {
  std::normal_distribution<double> n(0, 1);
  FourierSeries f(K, true);
  f.at(0) = n(rng);
  for (int k = 1; k <= K; ++k) {
    cplx c(n(rng), n(rng));
    c *= std::exp(-decay * k);
    f.at(k) = c;
    f.at(-k) = std::conj(c);
  }
  return f;
}

// direct sum, independent of the FFT path
cplx direct(const FourierSeries& f, double t) {
  cplx s = 0;
  for (int k = -f.K(); k <= f.K(); ++k) s += f[k] * std::exp(cplx(0, kTwoPi * k * t));
  return s;
}

}  // namespace

TEST_CASE("grid round trip") {
  std::mt19937_64 rng(1);
  for (int K : {1, 5, 17, 64}) {
    auto f = random_real(rng, K, 0.1);
    int N = grid_size_for(K);
    CHECK(N >= 4 * K);
    auto g = to_grid(f, N);
    for (int j = 0; j < N; j += 7) CHECK(std::abs(g[j] - direct(f, double(j) / N)) < 1e-12);
    auto back = from_grid(g, K, true);
    for (int k = -K; k <= K; ++k) CHECK(std::abs(back[k] - f[k]) < 1e-12);
  }
}

TEST_CASE("evaluation agrees with the defining sum") {
  std::mt19937_64 rng(2);
  auto f = random_real(rng, 9, 0.3);
  for (double t : {0.0, 0.1, 0.377, 0.9}) CHECK(std::abs(f.eval(t) - direct(f, t)) < 1e-13);
  CHECK(std::abs(f.eval(0.3).imag()) < 1e-13);
}

TEST_CASE("split_truncate partitions the coefficients") {
  FourierSeries f(10, true);
  for (int k = -10; k <= 10; ++k) f.at(k) = std::exp(-std::abs(k));
  auto s = split_truncate(f, 4);
  for (int k = -10; k <= 10; ++k) {
    CHECK((s.head[k] + s.tail[k]) == f[k]);
    if (std::abs(k) < 4) CHECK(s.tail[k] == cplx(0));
    else CHECK(s.head[k] == cplx(0));
  }
  auto big = split_truncate(f, 50);
  CHECK(big.tail.l1() == 0);
}

TEST_CASE("product is exact for band-limited inputs") {
  std::mt19937_64 rng(3);
  auto f = random_real(rng, 6, 0.2), g = random_real(rng, 4, 0.2);
  auto h = mul(f, g);
  CHECK(h.K() == 10);
  for (int k = -10; k <= 10; ++k) {
    cplx c = 0;
    for (int j = -6; j <= 6; ++j) c += f[j] * g[k - j];
    CHECK(std::abs(h[k] - c) < 1e-13);
  }
  CHECK_THROWS_AS(mul(f, g, 3), Error);
}

TEST_CASE("derive and shift") {
  auto c = FourierSeries::constant(3.0);
  CHECK(derive(c).l1() == 0);
  auto f = FourierSeries::cosine(1, 0.5);  // cos(2 pi theta)
  auto d = derive(f);
  CHECK(std::abs(d.eval(0.25) + cplx(kTwoPi)) < 1e-12);
  std::mt19937_64 rng(4);
  auto g = random_real(rng, 20, 0.1);
  double beta = (std::sqrt(5.0) - 1) / 2;
  auto back = shift(shift(g, beta), -beta);
  for (int k = -20; k <= 20; ++k) CHECK(std::abs(back[k] - g[k]) <= 1e-15 * (1 + std::abs(g[k])) * 4);
  auto s = shift(g, beta);
  for (double t : {0.1, 0.6}) CHECK(std::abs(s.eval(t) - g.eval(t + beta)) < 1e-12);
}

TEST_CASE("rotation convention R_g = exp(-2 pi g J)") {
  Mat2c J(0, 1, -1, 0);
  auto R = expm(J * cplx(-kTwoPi * 0.25));
  CHECK(std::abs(R.a) < 1e-15);
  CHECK(std::abs(R.b - cplx(-1)) < 1e-15);
  CHECK(std::abs(R.c - cplx(1)) < 1e-15);
  auto Rs = Sl2Mat::rotation(0.25);
  CHECK(std::abs(Rs.b + 1) < 1e-15);
  CHECK(std::abs(Rs.c - 1) < 1e-15);

  MatSeries X = MatSeries::constant(J * cplx(-kTwoPi * 0.25));
  auto E = exp_map(X);
  CHECK(std::abs(E.e[1][0] - cplx(-1)) < 1e-14);
}

TEST_CASE("exp_map(X) exp_map(-X) = I and det = 1") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    auto a = random_real(rng, 3, 1.0) * cplx(0.2), b = random_real(rng, 3, 1.0) * cplx(0.2),
         c = random_real(rng, 3, 1.0) * cplx(0.2);
    MatSeries X(a, b, c, -a);
    int K = 40;
    auto E = exp_map(X, K), Em = exp_map(X * cplx(-1), K);
    auto P = mul(E, Em, K);
    int N = 128;
    auto g = to_grid(P, N);
    for (auto& m : g) CHECK((m - Mat2c::identity()).max_abs() < 1e-10);
    CHECK(det_defect(E, N) < 1e-10);
    auto L = log_map(E, K);
    for (int i = 0; i < 4; ++i)
      for (int k = -3; k <= 3; ++k) CHECK(std::abs(L.e[i][k] - X.e[i][k]) < 1e-10);
  }
}

TEST_CASE("aliasing is reported") {
  MatSeries X(FourierSeries::cosine(5, 1.0), FourierSeries(0), FourierSeries(0), FourierSeries(0));
  CHECK_THROWS_AS(exp_map(X, 2), Error);
}

TEST_CASE("logm rejects the branch cut") {
  Mat2c m(-1, 0, 0, -1);
  CHECK_THROWS_AS(logm(m), Error);
}
