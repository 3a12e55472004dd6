#include "doctest.h"

#include "qplab/error.hpp"
#include "qplab/kam.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace qplab;
using namespace qplab::kam;
using ud::FourierSeries;
using ud::MatSeries;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1) / 2;

FourierSeries random_real(std::mt19937_64& rng, int K, double scale) {
  std::normal_distribution<double> n(0, 1);
  FourierSeries f(K, true);
  f.at(0) = scale * n(rng);
  for (int k = 1; k <= K; ++k) {
    cplx c = scale * cplx(n(rng), n(rng));
    f.at(k) = c;
    f.at(-k) = std::conj(c);
  }
  return f;
}

FourierSeries random_complex(std::mt19937_64& rng, int K, double scale) {
  std::normal_distribution<double> n(0, 1);
  FourierSeries f(K, false);
  for (int k = -K; k <= K; ++k) f.at(k) = scale * cplx(n(rng), n(rng));
  return f;
}

Su11Series scaled_to(Su11Series g, double target, const ud::NormSpec& spec) {
  double s = target / norm(g, spec);
  return {g.t * cplx(s), g.v * cplx(s)};
}

Schedule golden_ladder(const ud::NormSpec& spec, double gamma = 0.1, double tau = 2) {
  auto e = cf::expand_max(cf::golden(), 60);
  auto sel = cf::select_bridges(e, 1);
  return schedule(e, sel, spec.M, gamma, tau, spec.r, 1e3, std::log(10.0));
}

}  // namespace

TEST_CASE("cohomological equation closed forms") {
  auto g = FourierSeries::cosine(1, 0.5);  // cos(2 pi theta)
  auto r = solve_cohomological(g, kGolden, 13);
  cplx want = -0.5 / (std::exp(cplx(0, kTwoPi * kGolden)) - 1.0);
  CHECK(std::abs(r.v[1] - want) < 1e-15);
  CHECK(std::abs(r.v[-1] - std::conj(want)) < 1e-15);
  CHECK(r.v[0] == cplx(0));
  auto c = solve_cohomological(FourierSeries::constant(2.0), kGolden, 13);
  CHECK(c.v.l1() == 0);
  CHECK(c.residual == 0);
}

TEST_CASE("cohomological residual and coefficient bounds") {
  std::mt19937_64 rng(5);
  auto e = cf::expand(cf::golden(), 20);
  for (int t = 0; t < 20; ++t) {
    auto g = random_real(rng, 12, 1.0);
    auto r = solve_cohomological(g, kGolden, 13);
    CHECK(r.residual <= 1e-12);
    CHECK(r.exact_bound_ok);
    // Q a convergent denominator: |k| < q_n keeps ||k alpha|| >= 1/(2 q_n)
    int n = 3 + static_cast<int>(rng() % 10);
    int Q = e.q[n].convert_to<int>();
    auto g2 = random_real(rng, Q + 3, 1.0);
    auto r2 = solve_cohomological(g2, kGolden, Q);
    CHECK(r2.q_bound_ok);
    CHECK(r2.residual <= 1e-12 * std::max(1.0, g2.l1()));
  }
  CHECK_THROWS_AS(solve_cohomological(FourierSeries::cosine(1, 1), 5.0 / 7.0, 8), Error);
  try {
    solve_cohomological(FourierSeries::cosine(1, 1), 5.0 / 7.0, 8);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::exact_resonance);
  }
  FourierSeries cplx_g(2, false);
  cplx_g.at(1) = 1;
  CHECK_THROWS_AS(solve_cohomological(cplx_g, kGolden, 5), Error);
}

TEST_CASE("small divisor floor") {
  auto f = small_divisor_floor(kGolden, 0.25, 0.1, 2, 13, 4);
  CHECK(f.holds);
  CHECK(f.margin() > 0.1);
  // exhaustive reference
  double m = INFINITY;
  for (int k = -4; k <= 4; ++k)
    for (int s : {1, -1}) m = std::min(m, std::abs(std::exp(cplx(0, kTwoPi * (k * kGolden + s * 0.5))) - 1.0));
  CHECK(f.min_abs == doctest::Approx(m).epsilon(1e-12));
  // k = 0 term
  auto z = small_divisor_floor(kGolden, 0.1, 0.01, 2, 13, 0);
  CHECK(z.min_abs == doctest::Approx(std::abs(std::exp(cplx(0, kTwoPi * 0.2)) - 1.0)));
  // rho = <k0 alpha / 2> resonates at k = -k0
  double rho = std::fmod(3 * kGolden / 2, 1.0);
  auto r = small_divisor_floor(cf::golden(), rho, 0.1, 2, 13, 4);
  CHECK_FALSE(r.holds);
  CHECK(std::abs(r.worst_k) == 3);
}

TEST_CASE("homotopy trivial inputs") {
  ud::NormSpec spec;
  Su11Series zero{FourierSeries(2, true), FourierSeries(2, false)};
  auto h = homotopy_conjugate(0.25, zero, kGolden, 4, 0);
  CHECK(h.iterations == 0);
  CHECK(h.Y.v.l1() == 0);
  CHECK(h.g_re.v.l1() == 0);
  CHECK(h.g_re.t.l1() == 0);

  std::mt19937_64 rng(6);
  Su11Series res{random_real(rng, 3, 1e-7), FourierSeries(0, false)};
  auto h2 = homotopy_conjugate(0.25, res, kGolden, 4, 0);
  CHECK(h2.iterations == 0);
  CHECK(h2.Y.v.l1() == 0);
  for (int k = -3; k <= 3; ++k) CHECK(std::abs(h2.g_re.t[k] - res.t[k]) < 1e-20);
  CHECK(h2.g_re.v.l1() < 1e-20);
}

TEST_CASE("homotopy contract on random small g") {
  ud::NormSpec spec;
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    Su11Series g{random_real(rng, 5, 1), random_complex(rng, 5, 1)};
    g = scaled_to(g, 1e-6, spec);
    auto h = homotopy_conjugate(0.25, g, kGolden, 4, 0);
    CHECK(h.contract_ok());
    CHECK(h.residual <= 1e-9);
    CHECK(h.iterations <= 20);
    for (int k = -h.Y.v.K(); k <= h.Y.v.K(); ++k) CHECK(std::abs(k) < 4);
  }
  // above the hypothesis
  Su11Series big{random_real(rng, 3, 1), random_complex(rng, 3, 1)};
  big = scaled_to(big, 0.1, spec);
  try {
    homotopy_conjugate(0.25, big, kGolden, 4, 0);
    FAIL("expected a hypothesis violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::hypothesis_violated);
    CHECK(e.soft());
  }
}

TEST_CASE("schedule arithmetic") {
  ud::NormSpec spec;
  spec.r = 1;
  auto s = golden_ladder(spec);
  REQUIRE(s.levels.size() >= 4);
  CHECK(s.levels[0].Qbar == 13);
  CHECK(s.levels[1].Qbar == 21);
  CHECK(s.levels[0].rbar == doctest::Approx(2.0 / 169));
  CHECK(s.levels[1].r == doctest::Approx(1.0 / 169));
  double G = ud::gamma_of(spec.M, std::cbrt(21.0));
  CHECK(s.levels[1].log_eps == doctest::Approx(s.levels[0].log_eps - std::sqrt(G) * std::log(21.0)));
  CHECK(s.log_eps0 == doctest::Approx(-8 * 4 * std::log(10.0)));
  CHECK(std::isinf(s.levels[0].log_eps_tilde));
  CHECK(s.levels[1].log_eps_tilde == doctest::Approx(std::log(1e3) + s.levels[0].log_eps));

  auto P = ud::Modulus::make_power(3);
  auto e = cf::expand_max(cf::golden(), 200);
  auto sp = schedule(e, cf::select_bridges(e, 1), P, 0.1, 2, 0.5, 1e3, std::log(10.0));
  for (size_t n = 1; n < sp.levels.size(); ++n) CHECK(sp.levels[n].log_eps < sp.levels[n - 1].log_eps);

  auto paper = schedule(e, cf::select_bridges(e, 25), ud::Modulus::make_analytic(), 0.1, 2, 0.05);
  CHECK(paper.log_T == paper.log_T_paper);
  CHECK(paper.log_T >= -12 * std::log(0.05));
}

TEST_CASE("kam_step with zero input is the identity") {
  ud::NormSpec spec;
  KamParams p;
  p.K_work = 64;
  p.grid = 256;
  auto s = golden_ladder(spec);
  auto st = initial_state(MatSeries::constant(Mat2c::zero()).resized(8), kGolden, 0.25, 0, s);
  auto r = kam_step(st, s, p);
  CHECK(r.next.level == 1);
  CHECK(r.next.g.l1() == 0);
  for (auto& e : r.next.F.e) CHECK(e.l1() == 0);
  CHECK(r.report.phi_dist == 0);
}

TEST_CASE("kam_step reduces the perturbation") {
  ud::NormSpec spec;
  KamParams p;
  auto s = golden_ladder(spec);
  auto F = random_perturbation(20, 1e-4, 11, spec);
  auto st = initial_state(F, kGolden, 0.25, 0, s);
  auto r = kam_step(st, s, p);
  CHECK(r.report.residual <= 1e-8);
  CHECK(r.report.norm_F_out < r.report.norm_F_in);
  CHECK(r.next.g.support() < 21);
  CHECK(r.report.phi_dist <= r.report.phi_constant * std::sqrt(r.report.norm_F_tilde) * (1 + 1e-12));
  auto r2 = kam_step(r.next, s, p);
  CHECK(r2.report.norm_F_out < r2.report.norm_F_in);
  CHECK(r2.next.g.support() < 34);
  CHECK(r2.report.residual <= 1e-8);
}

TEST_CASE("product-norm lemma") {
  ud::NormSpec spec;
  std::mt19937_64 rng(9);
  for (int j = 1; j <= 8; ++j) {
    std::vector<MatSeries> Fs;
    double sum = 0;
    for (int i = 0; i < j; ++i) {
      Fs.push_back(random_perturbation(4, 1e-4, rng(), spec));
      sum += ud::norm(Fs.back(), spec);
    }
    auto Ft = product_log(0.3, Fs, 64);
    // j = 1 is an identity up to grid roundoff
    CHECK(ud::norm(Ft, spec) <= sum * (1 + 1e-9));
  }
}

TEST_CASE("driver") {
  auto e = cf::expand_max(cf::golden(), 80);
  DriverOptions o;
  o.rotation_iterations = 4000;

  auto idle = cocycle::from_series(MatSeries::constant(Mat2c(Sl2Mat::rotation(0.25))), kGolden);
  auto ri = almost_reducibility_driver(idle, 0.25, e, o);
  CHECK(ri.ledger.size() == 4);
  for (auto& rec : ri.ledger) CHECK(std::isinf(rec.log_eps_measured));

  ud::NormSpec spec;
  auto F = random_perturbation(12, 1e-3, 1, spec);
  auto A = ud::exp_map(F, 64);
  auto Rq = MatSeries::constant(Mat2c(Sl2Mat::rotation(0.25)));
  auto c = cocycle::from_series(ud::mul(Rq, A, 64), kGolden);
  auto rr = almost_reducibility_driver(c, 0.25, e, o);
  REQUIRE(rr.ledger.size() == 4);
  for (size_t l = 1; l < rr.ledger.size(); ++l) {
    CHECK(rr.ledger[l].log_eps_measured < rr.ledger[l - 1].log_eps_measured);
    CHECK(rr.ledger[l].residual <= 1e-8);
  }

  double rho = std::fmod(3 * kGolden / 2, 1.0);
  auto res = cocycle::from_series(MatSeries::constant(Mat2c(Sl2Mat::rotation(rho))), kGolden);
  auto rs = almost_reducibility_driver(res, rho, e, o);
  CHECK(rs.hypothesis_stop);
  CHECK(rs.ledger.size() == 1);
  CHECK(rs.stop_reason.find("small divisor") != std::string::npos);
}
