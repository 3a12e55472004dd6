#include "doctest.h"

#include "qplab/cocycle.hpp"
#include "qplab/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qplab;
using namespace qplab::cocycle;

namespace {

const double kGolden = (std::sqrt(5.0) - 1) / 2;

double max_diff(const Sl2Mat& x, const Sl2Mat& y) { return (x - y).max_abs(); }

}  // namespace

TEST_CASE("Schroedinger fibers") {
  auto c = schrodinger(ud::FourierSeries::constant(0.0), 0.0, kGolden);
  auto A = c.fiber(0.37);
  CHECK(A.a == 0);
  CHECK(A.b == -1);
  CHECK(A.c == 1);
  CHECK(A.d == 0);
  auto amo3 = amo(0.7, 0.2, kGolden);
  auto viaV = schrodinger(amo_potential(0.7), 0.2, kGolden);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    double th = u(rng);
    CHECK(amo3.fiber(th).trace() == doctest::Approx(0.2 - 1.4 * std::cos(2 * std::numbers::pi * th)));
    CHECK(max_diff(amo3.fiber(th), viaV.fiber(th)) < 1e-14);
    CHECK(amo3.fiber(th).det() == 1);
  }
  ud::FourierSeries complexV(1, false);
  complexV.at(1) = 1;
  CHECK_THROWS_AS(schrodinger(complexV, 0, kGolden), Error);
}

TEST_CASE("transfer matrices") {
  auto c = amo(1.3, 0.4, kGolden);
  double th = 0.123;
  CHECK(max_diff(transfer(c, th, 0), Sl2Mat::identity()) == 0);
  CHECK(max_diff(transfer(c, th, 1), c.fiber(th)) < 1e-15);
  CHECK(max_diff(transfer(c, th, -1), c.fiber(th - kGolden).inverse()) < 1e-14);
  auto two = c.fiber(th + kGolden) * c.fiber(th);
  CHECK(max_diff(transfer(c, th, 2), two) < 1e-13);
  for (long long m : {-1000LL, -37LL, 5LL, 1000LL})
    for (long long n : {-1000LL, -3LL, 64LL, 1000LL}) CHECK(cocycle_residual(c, th, m, n) < 1e-9);
  auto sub = transfer_scaled(amo(0.5, 0, kGolden), 0.2, 10000);
  CHECK(std::fabs(sub.m.det() * std::exp(2 * sub.log_scale) - 1) < 1e-8);
  auto big = transfer_scaled(amo(3, 0, kGolden), 0.2, 10000);
  CHECK(std::isfinite(big.log_norm()));
  CHECK(big.log_norm() / 10000 == doctest::Approx(std::log(3.0)).epsilon(0.05));
}

TEST_CASE("finite Lyapunov exponents") {
  auto d = constant(Sl2Mat::diag(2, 0.5), kGolden);
  CHECK(std::fabs(finite_lyapunov(d, 100, 64) - std::log(2.0)) < 1e-12);
  auto r = constant(Sl2Mat::rotation(0.3), kGolden);
  CHECK(finite_lyapunov(r, 100, 64) <= 1e-12);
  auto a = amo(3, 0, kGolden);
  double L1 = finite_lyapunov(a, 50, 128), L2 = finite_lyapunov(a, 100, 128);
  CHECK(L1 >= 0);
  CHECK(L2 <= L1 + 1e-3);
  CHECK(std::fabs(finite_lyapunov(a, 2000, 128) - std::log(3.0)) < 0.05);
}

TEST_CASE("rotation numbers") {
  auto r = constant(Sl2Mat::rotation(0.3), kGolden);
  auto res = rotation_number(r, 1000);
  CHECK(circle_dist(res.rho, 0.3) < 1e-10);
  auto id = constant(Sl2Mat::identity(), kGolden);
  CHECK(circle_dist(rotation_number(id, 1000).rho, 0) < 1e-12);
  // below the spectrum the projective action has no net turning modulo one half
  auto low = amo(1.0, -6.0, kGolden);
  auto rl = rotation_number(low, 20000);
  CHECK(std::fabs(std::remainder(rl.rho, 0.5)) < 1e-3);
}

TEST_CASE("nonzero winding is rejected") {
  QpCocycle c;
  c.alpha = kGolden;
  c.fiber = [](double t) { return Sl2Mat::rotation(t); };
  CHECK(winding(c) == 1);
  CHECK_THROWS_AS(rotation_number(c, 100), Error);
}

TEST_CASE("rotation number perturbation bound") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    double rho = 0.1 + 0.3 * (u(rng) + 1) / 2;
    double e0 = 0.01 * u(rng), e1 = 0.01 * u(rng), e2 = 0.01 * u(rng);
    QpCocycle c;
    c.alpha = kGolden;
    double bound = 0;
    c.fiber = [=](double th) {
      double s = std::sin(2 * std::numbers::pi * th);
      Mat2c F(e0 * s, e1 + e2 * s, e1 - e2 * s, -e0 * s);
      return Sl2Mat::rotation(rho) * expm(F).real();
    };
    for (int j = 0; j < 512; ++j) bound = std::max(bound, (c.fiber(j / 512.0) - Sl2Mat::rotation(rho)).norm());
    auto res = rotation_number(c, 20000, 0, 0, Estimator::weighted);
    CHECK(circle_dist(res.rho, rho) <= bound + res.error_bar);
  }
}

TEST_CASE("renormalization iterates commute") {
  auto e = cf::expand(cf::golden(), 12);
  auto c = amo(0.5, 0.3, e.alpha.to_double());
  auto r = renorm_iterates(c, e, 3, 0.1);
  CHECK(commutation_residual(r, 64) < 1e-8);
  auto r1 = renorm_iterates(c, e, 1, 0.1);
  // q_0 = 1: a single fiber at the rescaled point
  double t = 0.4;
  double x = 0.1 + static_cast<double>(e.beta[0]) * (t - 0.1);
  CHECK(max_diff(r1.A_n0(t), c.fiber(x)) < 1e-14);
  auto k = constant(Sl2Mat{2, 1, 1, 1}, e.alpha.to_double());
  auto rk = renorm_iterates(k, e, 4, 0.3);
  CHECK(max_diff(rk.A_n0(0.1), rk.A_n0(2.7)) < 1e-12);
  CHECK(max_diff(rk.A_n1(0.1), rk.A_n1(2.7)) < 1e-12);
}
