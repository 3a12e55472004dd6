#include "qplab/cocycle.hpp"

#include "qplab/error.hpp"
#include "qplab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qplab::cocycle {

namespace {

const char* kModule = "cocycle";
constexpr double kTwoPi = 2 * std::numbers::pi;

long double frac(long double x) { return x - std::floor(x); }

// direction of u in turns, (-1/2, 1/2]
double turns(double x, double y) { return std::atan2(y, x) / kTwoPi; }

double wrap_half(double d) { return d - std::round(d); }

}  // namespace

QpCocycle schrodinger(const ud::FourierSeries& V, double E, double alpha) {
  if (!V.hermitian(1e-12)) throw Error(ErrorCode::invalid_argument, kModule, "potential must be real-valued");
  QpCocycle c;
  c.alpha = alpha;
  c.potential = V.symmetrized();
  c.energy = E;
  auto Vs = *c.potential;
  c.fiber = [Vs, E](double t) { return Sl2Mat{E - Vs.eval(t).real(), -1, 1, 0}; };
  c.label = "schrodinger";
  return c;
}

ud::FourierSeries amo_potential(double lambda) { return ud::FourierSeries::cosine(1, lambda); }

QpCocycle amo(double lambda, double E, double alpha) {
  QpCocycle c;
  c.alpha = alpha;
  c.potential = amo_potential(lambda);
  c.energy = E;
  c.fiber = [lambda, E](double t) { return Sl2Mat{E - 2 * lambda * std::cos(kTwoPi * t), -1, 1, 0}; };
  c.label = "amo";
  return c;
}

QpCocycle constant(const Sl2Mat& A, double alpha, std::string label) {
  QpCocycle c;
  c.alpha = alpha;
  c.fiber = [A](double) { return A; };
  c.series = ud::MatSeries::constant(Mat2c(A));
  c.label = std::move(label);
  return c;
}

QpCocycle from_series(const ud::MatSeries& A, double alpha, std::string label) {
  QpCocycle c;
  c.alpha = alpha;
  c.series = A;
  c.fiber = [A](double t) { return A.eval(t).real(); };
  c.label = std::move(label);
  return c;
}

double ScaledMat::log_norm() const { return std::log(m.norm()) + log_scale; }

Sl2Mat ScaledMat::value() const { return m * std::exp(log_scale); }

ScaledMat transfer_scaled(const QpCocycle& c, double theta, long long n) {
  ScaledMat out;
  long double x = frac(static_cast<long double>(theta));
  const long double a = c.alpha;
  auto renorm = [&] {
    double s = out.m.norm();
    if (s > 0) {
      out.m = out.m * (1.0 / s);
      out.log_scale += std::log(s);
    }
  };
  if (n >= 0) {
    for (long long j = 0; j < n; ++j) {
      out.m = c.fiber(static_cast<double>(x)) * out.m;
      x = frac(x + a);
      if ((j + 1) % 32 == 0) renorm();
    }
  } else {
    for (long long j = 0; j < -n; ++j) {
      x = frac(x - a);
      Sl2Mat f = c.fiber(static_cast<double>(x));
      out.m = f.inverse() * out.m;
      if ((j + 1) % 32 == 0) renorm();
    }
  }
  renorm();
  return out;
}

Sl2Mat transfer(const QpCocycle& c, double theta, long long n) { return transfer_scaled(c, theta, n).value(); }

double finite_lyapunov(const QpCocycle& c, long long n, int grid) {
  if (n < 1 || grid < 1) throw Error(ErrorCode::invalid_argument, kModule, "need n >= 1 and a positive grid");
  std::vector<double> v(grid);
  parallel_for(grid, [&](long long j) { v[j] = transfer_scaled(c, static_cast<double>(j) / grid, n).log_norm(); });
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / grid) / static_cast<double>(n);
}

double cocycle_residual(const QpCocycle& c, double theta, long long m, long long n) {
  ScaledMat lhs = transfer_scaled(c, theta, m + n);
  double shifted = static_cast<double>(frac(static_cast<long double>(theta) + static_cast<long double>(n) * c.alpha));
  ScaledMat r1 = transfer_scaled(c, shifted, m), r2 = transfer_scaled(c, theta, n);
  Sl2Mat rhs = r1.m * r2.m;
  double ls = r1.log_scale + r2.log_scale;
  Sl2Mat diff = lhs.m * std::exp(lhs.log_scale - ls) - rhs;
  return diff.norm() / (r1.m.norm() * r2.m.norm());
}

namespace {

// Continuous lift of theta -> direction of A(theta) e1.
struct Lift {
  std::vector<double> h;  // h[j] at theta = j / N
  int N = 0;

  double at(const QpCocycle& c, double theta, const Sl2Mat& A) const {
    double t = theta - std::floor(theta);
    double pos = t * N;
    int j = static_cast<int>(pos);
    if (j >= N) j = N - 1;
    double w = pos - j;
    double guess = (1 - w) * h[j] + w * h[j + 1];
    double raw = turns(A.a, A.c);
    (void)c;
    return raw + std::round(guess - raw);
  }
};

Lift build_lift(const QpCocycle& c, int samples) {
  for (int N = samples; N <= (1 << 16); N *= 2) {
    Lift L;
    L.N = N;
    L.h.resize(N + 1);
    double max_step = 0;
    for (int j = 0; j <= N; ++j) {
      Sl2Mat A = c.fiber(static_cast<double>(j) / N);
      double raw = turns(A.a, A.c);
      if (j == 0) {
        L.h[0] = raw;
        continue;
      }
      double d = wrap_half(raw - L.h[j - 1]);
      max_step = std::max(max_step, std::fabs(d));
      L.h[j] = L.h[j - 1] + d;
    }
    double wind = L.h[N] - L.h[0];
    if (std::fabs(wind) > 0.5)
      throw Error(ErrorCode::winding_nonzero, kModule,
                  "fiber is not homotopic to the identity (winding " + std::to_string(std::lround(wind)) + ")");
    if (max_step < 0.2) return L;
  }
  throw Error(ErrorCode::winding_nonzero, kModule, "direction of A(theta)e1 varies too fast to unwrap");
}

}  // namespace

int winding(const QpCocycle& c, int samples) {
  double h = 0, prev = 0;
  for (int j = 0; j <= samples; ++j) {
    Sl2Mat A = c.fiber(static_cast<double>(j) / samples);
    double raw = turns(A.a, A.c);
    if (j > 0) h += wrap_half(raw - prev);
    prev = raw;
  }
  return static_cast<int>(std::lround(h));
}

double circle_dist(double a, double b) { return std::fabs(wrap_half(a - b)); }

RotationResult rotation_number(const QpCocycle& c, long long n, double theta0, double y0, Estimator est) {
  if (n < 10) throw Error(ErrorCode::invalid_argument, kModule, "rotation number needs n >= 10");
  Lift L = build_lift(c, 256);
  long double x = frac(static_cast<long double>(theta0));
  double y = y0 - std::floor(y0);  // fractional part of the fiber lift
  long double total = 0, wsum = 0, wtot = 0, whalf = 0, whalf_tot = 0;
  std::vector<double> partial;
  partial.reserve(n);
  const long double a = c.alpha;
  for (long long j = 0; j < n; ++j) {
    double th = static_cast<double>(x);
    Sl2Mat A = c.fiber(th);
    double h = L.at(c, th, A);
    double ux = std::cos(kTwoPi * y), uy = std::sin(kTwoPi * y);
    double raw = turns(A.a * ux + A.b * uy, A.c * ux + A.d * uy);
    // F(y) is the representative of raw in [h, h + 1)
    double F = raw + std::ceil(h - raw);
    if (F >= h + 1) F -= 1;
    double psi = F - y;
    total += psi;
    partial.push_back(static_cast<double>(total / (j + 1)));
    if (est == Estimator::weighted) {
      long double t = (j + 0.5L) / n;
      long double w = std::exp(-1.0L / (t * (1 - t)));
      wsum += w * psi;
      wtot += w;
      if (j < n / 2) {
        long double t2 = (j + 0.5L) / (n / 2);
        long double w2 = std::exp(-1.0L / (t2 * (1 - t2)));
        whalf += w2 * psi;
        whalf_tot += w2;
      }
    }
    double ynew = y + psi;
    y = ynew - std::floor(ynew);
    x = frac(x + a);
  }
  RotationResult r;
  r.n = n;
  double plain = partial.back();
  double bar = 0;
  for (long long m = n / 10; m < n; ++m) bar = std::max(bar, std::fabs(partial[m] - plain));
  if (est == Estimator::weighted) {
    double wv = static_cast<double>(wsum / wtot);
    double wh = static_cast<double>(whalf / whalf_tot);
    r.rho = wv - std::floor(wv);
    r.error_bar = std::fabs(wv - wh) + 1e-15;
  } else {
    r.rho = plain - std::floor(plain);
    r.error_bar = bar;
  }
  if (r.rho >= 1) r.rho -= 1;
  return r;
}

RenormIterates renorm_iterates(const QpCocycle& c, const cf::CfExpansion& cf, int n, double theta_star) {
  if (n < 1 || n > cf.depth())
    throw Error(ErrorCode::index_out_of_range, kModule, "renormalization level outside the expansion");
  double beta = static_cast<double>(cf.beta[n - 1]);
  if (!(beta > 1e-300)) throw Error(ErrorCode::precision_exhausted, kModule, "beta_{n-1} underflows");
  long long qprev = cf.q[n - 1].convert_to<long long>();
  long long qn = cf.q[n].convert_to<long long>();
  long long s0 = (n - 1) % 2 == 0 ? qprev : -qprev;
  long long s1 = n % 2 == 0 ? qn : -qn;
  RenormIterates r;
  r.beta_prev = beta;
  r.alpha_n = static_cast<double>(cf.tail[n]);
  r.level = n;
  QpCocycle cc = c;
  r.A_n0 = [cc, s0, beta, theta_star](double t) { return transfer(cc, theta_star + beta * (t - theta_star), s0); };
  r.A_n1 = [cc, s1, beta, theta_star](double t) { return transfer(cc, theta_star + beta * (t - theta_star), s1); };
  return r;
}

double commutation_residual(const RenormIterates& r, int samples) {
  double worst = 0, span = 1.0 / r.beta_prev;
  for (int j = 0; j < samples; ++j) {
    double t = span * (j + 0.5) / samples;
    Sl2Mat lhs = r.A_n1(t + 1) * r.A_n0(t);
    Sl2Mat rhs = r.A_n0(t + r.alpha_n) * r.A_n1(t);
    double scale = std::max(1.0, r.A_n1(t + 1).norm() * r.A_n0(t).norm());
    worst = std::max(worst, (lhs - rhs).norm() / scale);
  }
  return worst;
}

}  // namespace qplab::cocycle
