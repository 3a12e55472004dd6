#include "doctest.h"

#include "qplab/cocycle.hpp"
#include "qplab/error.hpp"
#include "qplab/spectra.hpp"

#include <cmath>
#include <random>

using namespace qplab;
using namespace qplab::spectra;
using ud::FourierSeries;

namespace {

const FourierSeries kFree = FourierSeries::constant(0.0);

double factorial(int q) { return std::tgamma(q + 1.0); }

}  // namespace

TEST_CASE("discriminant closed forms") {
  for (double E : {-1.3, 0.0, 0.7, 2.5}) {
    CHECK(discriminant(kFree, 0, 1, E, 0.3) == doctest::Approx(E));
    CHECK(discriminant(kFree, 1, 2, E, 0.3) == doctest::Approx(E * E - 2));
  }
  auto V = cocycle::amo_potential(0.5);
  Discriminant d(V, 3, 5);
  auto co = discriminant_fourier(d, 0.4);
  for (double th : {0.0, 0.013, 0.05, 0.11}) {
    double dev = d(0.4, th) - co.a[0].real();
    CHECK(std::fabs(std::fabs(dev) - 2 * std::pow(0.5, 5) * std::fabs(std::cos(2 * std::numbers::pi * 5 * th))) < 1e-12);
  }
  CHECK_THROWS_AS(Discriminant(V, 2, 4), Error);
}

TEST_CASE("discriminant periodicity and degree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  FourierSeries V(2, true);
  V.at(0) = 0.3;
  V.at(1) = cplx(0.4, 0.1);
  V.at(-1) = cplx(0.4, -0.1);
  V.at(2) = cplx(0, 0.2);
  V.at(-2) = cplx(0, -0.2);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 3}, {2, 5}, {3, 8}}) {
    Discriminant d(V, p, q);
    for (int t = 0; t < 20; ++t) {
      double E = 4 * u(rng) - 2, th = u(rng);
      CHECK(std::fabs(d(E, th + 1.0 / q) - d(E, th)) <= 1e-12 * std::max(1.0, std::fabs(d(E, th))));
    }
    // q-th forward difference over unit steps = q!
    double th = u(rng), acc = 0;
    for (int j = 0; j <= q; ++j) acc += std::pow(-1.0, q - j) * std::tgamma(q + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(q - j + 1.0)) * d(j - q / 2.0, th);
    CHECK(std::fabs(acc / factorial(q) - 1) < 1e-6);
    // bandwidth of t in the q theta variable is the degree of V
    auto co = discriminant_fourier(d, 0.3);
    for (int k = 3; k <= co.a.K(); ++k) CHECK(std::abs(co.a[k]) <= 1e-12 * co.a.l1());
    CHECK_FALSE(co.aliasing_warning);
  }
}

TEST_CASE("Fourier coefficients of the discriminant") {
  auto f = discriminant_fourier(Discriminant(kFree, 2, 5), 0.3);
  for (int k = 1; k <= f.a.K(); ++k) CHECK(std::abs(f.a[k]) < 1e-14);
  for (double lam : {0.3, 0.9}) {
    Discriminant d(cocycle::amo_potential(lam), 5, 8);
    auto c = discriminant_fourier(d, 1.0);
    CHECK(std::abs(c.a[1]) == doctest::Approx(std::pow(lam, 8)).epsilon(1e-9));
    for (int k = 2; k <= c.a.K(); ++k) CHECK(std::abs(c.a[k]) < 1e-10);
  }
  CHECK_THROWS_AS(discriminant_fourier(Discriminant(kFree, 1, 2), 0, 2), Error);
}

TEST_CASE("Chambers deviation") {
  CHECK(chambers_deviation(kFree, 1, 3, 0.5, 64).value < 1e-14);
  auto V = cocycle::amo_potential(0.5);
  CHECK(std::fabs(chambers_deviation(V, 3, 5, 0.0, 64).value - 0.0625) < 1e-8);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{2, 3}, {3, 5}, {5, 8}, {8, 13}})
    CHECK(std::fabs(chambers_deviation(V, p, q, 1.0, 64).value - 2 * std::pow(0.5, q)) < 1e-8);
}

TEST_CASE("band sets") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 5}, {3, 7}, {5, 8}}) {
    auto b = band_set(kFree, p, q, 0.2);
    REQUIRE(b.bands.size() == 1);
    CHECK(std::fabs(b.bands.lo() + 2) < 1e-9);
    CHECK(std::fabs(b.bands.hi() - 2) < 1e-9);
    CHECK(static_cast<int>(b.touching.size()) == q - 1);
  }
  auto V = cocycle::amo_potential(0.5);
  auto h = band_set(V, 1, 2, 0.0);
  CHECK(h.bands.size() == 2);
  const auto& iv = h.bands.intervals();
  CHECK(iv[0].a == doctest::Approx(-iv[1].b).epsilon(1e-10));
  CHECK(iv[0].b == doctest::Approx(-iv[1].a).epsilon(1e-10));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 30; ++t) {
    int q = 1 + static_cast<int>(rng() % 12), p = 1;
    while (std::gcd(p, q) != 1) ++p;
    double lam = 2 * u(rng);
    double th = u(rng);
    auto bs = band_set(cocycle::amo_potential(lam), p, q, th);
    CHECK(bs.bands.size() <= q);
    CHECK(static_cast<int>(bs.raw.size()) <= q);
    CHECK(bs.bands.measure() <= 4 + 4 * lam);
    // band edges sit on |t| = 2 up to the tangency tolerance and the E-tolerance times the slope
    Discriminant d(cocycle::amo_potential(lam), p, q);
    for (const auto& r : bs.raw)
      for (double E : {r.a, r.b}) {
        auto [tv, dv] = d.with_derivative(E, th);
        CHECK(std::fabs(tv) <= 2 + 1e-9 + 1e-11 * std::fabs(dv));
      }
  }
}

TEST_CASE("S minus and S plus") {
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}}) {
    auto s = s_sets(kFree, p, q, 16);
    REQUIRE(s.S_minus.size() == 1);
    REQUIRE(s.S_plus.size() == 1);
    CHECK(std::fabs(s.S_minus.lo() + 2) < 1e-9);
    CHECK(std::fabs(s.S_plus.hi() - 2) < 1e-9);
    CHECK(set_distance(s.S_plus, s.S_plus).hausdorff == 0);
  }
  auto V = cocycle::amo_potential(0.8);
  auto s = s_sets(V, 2, 5, 32);
  CHECK(s.converged);
  for (double th : {0.0, 0.03, 0.11, 0.17}) {
    auto b = band_set(V, 2, 5, th).bands;
    CHECK(s.S_minus.intersect(b).measure() == doctest::Approx(s.S_minus.measure()).epsilon(1e-9));
    CHECK(s.S_plus.intersect(b).measure() == doctest::Approx(b.measure()).epsilon(1e-9));
  }
  auto cross = s_minus_by_intersection(V, 2, 5, 32);
  CHECK(set_distance(cross, s.S_minus).hausdorff < 1e-6);
}

TEST_CASE("integrated density of states") {
  CHECK(ids(kFree, 1, 2, -2.5, 8) == 0);
  CHECK(ids(kFree, 1, 2, 2.5, 8) == 1);
  CHECK(ids(kFree, 0, 1, 0.0, 8) == doctest::Approx(0.5));
  CHECK(ids(kFree, 1, 3, 0.0, 8) == doctest::Approx(0.5));
  // free oracle N(E) = 1 - arccos(E/2)/pi
  for (double E : {-1.5, -0.3, 0.9, 1.7})
    CHECK(ids(kFree, 2, 5, E, 8) == doctest::Approx(1 - std::acos(E / 2) / std::numbers::pi).epsilon(1e-9));

  auto V = cocycle::amo_potential(1.5);
  const int q = 5;
  auto b = band_set(V, 2, q, 0.0);
  double prev = -1;
  for (double E = -5; E <= 5; E += 0.05) {
    double n = ids(V, 2, q, E, 16);
    CHECK(n >= prev - 1e-12);
    prev = n;
  }
  // gaps of the intersection of all phases carry the values j/q
  auto S = s_sets(V, 2, q, 32).S_plus;
  const auto& iv = S.intervals();
  for (size_t g = 0; g + 1 < iv.size(); ++g) {
    double E = 0.5 * (iv[g].b + iv[g + 1].a);
    double n = ids(V, 2, q, E, 16) * q;
    CHECK(std::fabs(n - std::round(n)) < 1e-9);
  }
}

TEST_CASE("set distance") {
  BandSet a({{0, 1}}), b({{0, 2}}), c({{0, 1}, {3, 4}});
  auto d0 = set_distance(a, a);
  CHECK(d0.hausdorff == 0);
  CHECK(d0.symdiff == 0);
  auto d1 = set_distance(a, b);
  CHECK(d1.hausdorff == 1);
  CHECK(d1.symdiff == 1);
  auto d2 = set_distance(c, a);
  CHECK(d2.hausdorff == 3);
  CHECK(d2.symdiff == 1);
  // gap midpoint is the farthest point
  BandSet e({{0, 10}}), f({{0, 1}, {9, 10}});
  CHECK(set_distance(e, f).hausdorff == 4);
  CHECK_THROWS_AS(set_distance(a, BandSet()), Error);
  BandSet m({{0, 1}, {0.5, 2}, {3, 4}});
  CHECK(m.size() == 2);
  CHECK(m.complement(-1, 5).measure() == doctest::Approx(3));
  CHECK(m.unite(BandSet({{2, 3}})).size() == 1);
}
