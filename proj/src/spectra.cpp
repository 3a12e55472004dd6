#include "qplab/spectra.hpp"

#include "qplab/error.hpp"
#include "qplab/parallel.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace qplab::spectra {

namespace {

[[noreturn]] void fail(ErrorCode c, const std::string& what) { throw Error(c, "spectra", what); }

constexpr double kRootTol = 1e-12;
constexpr double kTangency = 1e-9;

// root of a continuous f with f(a) f(b) <= 0, bracket shrunk below kRootTol
template <class F>
double bisect_root(F f, double a, double b) {
  if (a > b) std::swap(a, b);
  double fa = f(a);
  if (fa == 0) return a;
  double fb = f(b);
  if (fb == 0) return b;
  auto tol = [](double x, double y) { return std::fabs(x - y) < kRootTol; };
  auto r = boost::math::tools::bisect(f, a, b, tol);
  return 0.5 * (r.first + r.second);
}

// {E in [lo, hi] : f(E) <= 0} from a uniform scan with bisection-refined boundaries
template <class F>
BandSet level_set(F f, double lo, double hi, int M) {
  std::vector<double> x(M + 1), y(M + 1);
  for (int i = 0; i <= M; ++i) x[i] = lo + (hi - lo) * i / M;
  parallel_for(M + 1, [&](long long i) { y[i] = f(x[i]); });
  std::vector<Interval> out;
  bool inside = y[0] <= 0;
  double start = lo;
  for (int i = 1; i <= M; ++i) {
    bool now = y[i] <= 0;
    if (now == inside) continue;
    double e = bisect_root(f, x[i - 1], x[i]);
    if (inside) out.push_back({start, e});
    else start = e;
    inside = now;
  }
  if (inside) out.push_back({start, hi});
  return BandSet(out);
}

double norm_bound(const ud::FourierSeries& V) { return V.l1(); }

}  // namespace

BandSet::BandSet(std::vector<Interval> iv, double merge_tol) {
  for (auto& i : iv)
    if (i.a > i.b) fail(ErrorCode::invalid_argument, "interval with a > b");
  std::sort(iv.begin(), iv.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (auto& i : iv) {
    if (!iv_.empty() && i.a <= iv_.back().b + merge_tol) iv_.back().b = std::max(iv_.back().b, i.b);
    else iv_.push_back(i);
  }
}

double BandSet::measure() const {
  double s = 0;
  for (auto& i : iv_) s += i.b - i.a;
  return s;
}

double BandSet::lo() const {
  if (iv_.empty()) fail(ErrorCode::empty_set, "empty band set");
  return iv_.front().a;
}

double BandSet::hi() const {
  if (iv_.empty()) fail(ErrorCode::empty_set, "empty band set");
  return iv_.back().b;
}

bool BandSet::contains(double x, double tol) const {
  for (auto& i : iv_)
    if (x >= i.a - tol && x <= i.b + tol) return true;
  return false;
}

BandSet BandSet::unite(const BandSet& o) const {
  std::vector<Interval> all = iv_;
  all.insert(all.end(), o.iv_.begin(), o.iv_.end());
  return BandSet(all);
}

BandSet BandSet::intersect(const BandSet& o) const {
  std::vector<Interval> out;
  size_t i = 0, j = 0;
  while (i < iv_.size() && j < o.iv_.size()) {
    double a = std::max(iv_[i].a, o.iv_[j].a), b = std::min(iv_[i].b, o.iv_[j].b);
    if (a <= b) out.push_back({a, b});
    if (iv_[i].b < o.iv_[j].b) ++i;
    else ++j;
  }
  return BandSet(out);
}

BandSet BandSet::complement(double lo, double hi) const {
  std::vector<Interval> out;
  double cur = lo;
  for (auto& i : iv_) {
    if (i.b < lo) continue;
    if (i.a > hi) break;
    if (i.a > cur) out.push_back({cur, i.a});
    cur = std::max(cur, i.b);
  }
  if (cur < hi) out.push_back({cur, hi});
  return BandSet(out);
}

namespace {

double dist_to(const BandSet& B, double x) {
  double d = INFINITY;
  for (auto& i : B.intervals()) {
    if (x >= i.a && x <= i.b) return 0;
    d = std::min({d, std::fabs(x - i.a), std::fabs(x - i.b)});
  }
  return d;
}

double directed(const BandSet& A, const BandSet& B) {
  double h = 0;
  const auto& bi = B.intervals();
  for (auto& i : A.intervals()) {
    h = std::max({h, dist_to(B, i.a), dist_to(B, i.b)});
    for (size_t g = 0; g + 1 < bi.size(); ++g) {
      double m = 0.5 * (bi[g].b + bi[g + 1].a);
      if (m > i.a && m < i.b) h = std::max(h, dist_to(B, m));
    }
  }
  return h;
}

}  // namespace

SetDistance set_distance(const BandSet& a, const BandSet& b) {
  if (a.empty() || b.empty()) fail(ErrorCode::empty_set, "set_distance needs nonempty sets");
  SetDistance d;
  d.hausdorff = std::max(directed(a, b), directed(b, a));
  d.symdiff = a.measure() + b.measure() - 2 * a.intersect(b).measure();
  return d;
}

Discriminant::Discriminant(const ud::FourierSeries& V, int p, int q) : V_(V), p_(p), q_(q) {
  if (q < 1) fail(ErrorCode::invalid_argument, "q must be positive");
  if (std::gcd(p, q) != 1) fail(ErrorCode::invalid_argument, "p and q must be coprime");
  if (!V.hermitian(1e-12)) fail(ErrorCode::invalid_argument, "potential must be real-valued");
}

std::pair<double, double> Discriminant::with_derivative(double E, double theta) const {
  // P = S_{q-1} ... S_0 and its E-derivative; dS/dE = [[1,0],[0,0]]
  double a = 1, b = 0, c = 0, d = 1;
  double da = 0, db = 0, dc = 0, dd = 0;
  for (int s = 0; s < q_; ++s) {
    double x = theta + static_cast<double>(static_cast<long long>(s) * p_ % q_) / q_;
    double w = E - V_.eval(x).real();
    // S P with S = [[w, -1], [1, 0]]
    double na = w * a - c, nb = w * b - d, nc = a, nd = b;
    double nda = a + w * da - dc, ndb = b + w * db - dd, ndc = da, ndd = db;
    a = na, b = nb, c = nc, d = nd;
    da = nda, db = ndb, dc = ndc, dd = ndd;
  }
  return {a + d, da + dd};
}

double Discriminant::operator()(double E, double theta) const { return with_derivative(E, theta).first; }

double discriminant(const ud::FourierSeries& V, int p, int q, double E, double theta) {
  return Discriminant(V, p, q)(E, theta);
}

DiscriminantCoefficients discriminant_fourier(const Discriminant& d, double E, int oversample) {
  if (oversample < 4) fail(ErrorCode::invalid_argument, "oversample must be at least 4");
  DiscriminantCoefficients out;
  int bw = d.V().support();
  out.N = oversample * (d.q() * bw + 1);
  std::vector<cplx> vals(out.N);
  for (int j = 0; j < out.N; ++j) vals[j] = d(E, static_cast<double>(j) / out.N / d.q());
  out.a = ud::from_grid(vals, (out.N - 1) / 2, true, -1);
  double total = out.a.l1();
  int K = out.a.K();
  double top = std::max(std::abs(out.a[K]), std::abs(out.a[-K]));
  out.aliasing_warning = total > 0 && top > 1e-10 * total;
  return out;
}

Extremum theta_max(const Discriminant& d, double E, int grid, double sign) {
  const double period = 1.0 / d.q();
  auto f = [&](double th) { return sign * d(E, th); };
  int best = 0;
  double bv = -INFINITY;
  std::vector<double> v(grid);
  for (int j = 0; j < grid; ++j) {
    v[j] = f(period * j / grid);
    if (v[j] > bv) bv = v[j], best = j;
  }
  double h = period / grid;
  double c = period * best / grid;
  auto neg = [&](double th) { return -f(th); };
  auto r = boost::math::tools::brent_find_minima(neg, c - h, c + h, 40);
  Extremum e{bv, c};
  if (-r.second > bv) e = {-r.second, r.first};
  e.value *= sign;
  return e;
}

Deviation chambers_deviation(const ud::FourierSeries& V, int p, int q, double E, int grid) {
  Discriminant d(V, p, q);
  Deviation out;
  out.a0 = discriminant_fourier(d, E).a[0].real();
  const double period = 1.0 / q;
  auto dev = [&](double th) { return std::fabs(d(E, th) - out.a0); };
  int best = 0;
  double bv = -1;
  for (int j = 0; j < grid; ++j) {
    double x = dev(period * j / grid);
    if (x > bv) bv = x, best = j;
  }
  double h = period / grid, c = period * best / grid;
  auto r = boost::math::tools::brent_find_minima([&](double th) { return -dev(th); }, c - h, c + h, 40);
  out.value = std::max(bv, -r.second);
  out.theta = -r.second > bv ? r.first : c;
  return out;
}

std::pair<double, double> default_window(const ud::FourierSeries& V) {
  double m = norm_bound(V);
  return {-2 - m - 0.01, 2 + m + 0.01};
}

BandResult band_set(const ud::FourierSeries& V, int p, int q, double theta, double lo, double hi) {
  Discriminant d(V, p, q);
  BandResult out;
  auto t = [&](double E) { return d(E, theta); };
  auto dt = [&](double E) { return d.with_derivative(E, theta).second; };
  if (std::fabs(t(lo)) <= 2 || std::fabs(t(hi)) <= 2) fail(ErrorCode::invalid_argument, "E window must contain the spectrum");

  int M = 64 * q;
  for (;;) {
    out.critical_points.clear();
    std::vector<double> x(M + 1), y(M + 1);
    for (int i = 0; i <= M; ++i) {
      x[i] = lo + (hi - lo) * i / M;
      y[i] = dt(x[i]);
    }
    for (int i = 1; i <= M; ++i)
      if ((y[i - 1] < 0) != (y[i] < 0)) out.critical_points.push_back(bisect_root(dt, x[i - 1], x[i]));
    if (static_cast<int>(out.critical_points.size()) == q - 1) break;
    if (out.refinements == 2) fail(ErrorCode::root_isolation, "could not separate the critical points of t");
    ++out.refinements;
    M *= 4;
  }

  for (int i = 0; i < q; ++i) {
    double L = i == 0 ? lo : out.critical_points[i - 1];
    double R = i == q - 1 ? hi : out.critical_points[i];
    double tL = t(L), tR = t(R);
    auto edge = [&](double E0, double tv, double other) {
      if (std::fabs(tv) <= 2 + kTangency) return E0;
      double target = tv > 0 ? 2.0 : -2.0;
      return bisect_root([&](double E) { return t(E) - target; }, E0, other);
    };
    if ((tL > 2 + kTangency && tR > 2 + kTangency) || (tL < -2 - kTangency && tR < -2 - kTangency)) continue;
    double a = edge(L, tL, R), b = edge(R, tR, L);
    if (a > b) std::swap(a, b);
    out.raw.push_back({a, b});
  }
  for (size_t i = 0; i < out.critical_points.size(); ++i) {
    double c = out.critical_points[i];
    if (std::fabs(std::fabs(t(c)) - 2) <= kTangency) out.touching.push_back(c);
  }
  if (static_cast<int>(out.raw.size()) > q) fail(ErrorCode::validation, "more than q bands");
  out.bands = BandSet(out.raw);
  return out;
}

BandResult band_set(const ud::FourierSeries& V, int p, int q, double theta) {
  auto w = default_window(V);
  return band_set(V, p, q, theta, w.first, w.second);
}

namespace {

struct TRange {
  double tmin, tmax;
};

TRange t_range(const Discriminant& d, double E, int grid) {
  return {theta_max(d, E, grid, -1).value, theta_max(d, E, grid, 1).value};
}

double hausdorff_or_inf(const BandSet& a, const BandSet& b) {
  if (a.empty() && b.empty()) return 0;
  if (a.empty() || b.empty()) return INFINITY;
  return set_distance(a, b).hausdorff;
}

}  // namespace

SSets s_sets(const ud::FourierSeries& V, int p, int q, int theta_points, double lo, double hi) {
  Discriminant d(V, p, q);
  auto gm = [&](double E) {
    auto r = t_range(d, E, theta_points);
    return std::max(r.tmax - 2, -2 - r.tmin);
  };
  auto gp = [&](double E) {
    auto r = t_range(d, E, theta_points);
    return std::max(r.tmin - 2, -2 - r.tmax);
  };
  SSets out;
  int M = 256 * q;
  BandSet m0 = level_set(gm, lo, hi, M), p0 = level_set(gp, lo, hi, M);
  for (int round = 0; round < 4; ++round) {
    M *= 2;
    BandSet m1 = level_set(gm, lo, hi, M), p1 = level_set(gp, lo, hi, M);
    out.change_minus = hausdorff_or_inf(m0, m1);
    out.change_plus = hausdorff_or_inf(p0, p1);
    m0 = m1;
    p0 = p1;
    if (out.change_minus <= 1e-9 && out.change_plus <= 1e-9) {
      out.converged = true;
      break;
    }
  }
  out.S_minus = m0;
  out.S_plus = p0;
  out.E_points = M;
  return out;
}

SSets s_sets(const ud::FourierSeries& V, int p, int q, int theta_points) {
  auto w = default_window(V);
  return s_sets(V, p, q, theta_points, w.first, w.second);
}

BandSet s_minus_by_intersection(const ud::FourierSeries& V, int p, int q, int theta_points) {
  BandSet acc;
  for (int j = 0; j < theta_points; ++j) {
    BandSet b = band_set(V, p, q, static_cast<double>(j) / theta_points / q).bands;
    acc = j == 0 ? b : acc.intersect(b);
  }
  return acc;
}

BandSet mean_level_set(const ud::FourierSeries& V, int p, int q, double margin, double lo, double hi) {
  Discriminant d(V, p, q);
  auto f = [&](double E) { return std::fabs(discriminant_fourier(d, E).a[0].real()) - (2 - margin); };
  return level_set(f, lo, hi, 256 * q);
}

double ids(const ud::FourierSeries& V, int p, int q, double E, int theta_points) {
  Discriminant d(V, p, q);
  auto w = default_window(V);
  if (E <= w.first) return 0;
  if (E >= w.second) return 1;
  double sum = 0;
  for (int j = 0; j < theta_points; ++j) {
    double th = static_cast<double>(j) / theta_points / q;
    auto br = band_set(V, p, q, th, w.first, w.second);
    const auto& cp = br.critical_points;
    int below = static_cast<int>(std::lower_bound(cp.begin(), cp.end(), E) - cp.begin());
    double t = d(E, th);
    double rho = std::acos(std::clamp(t / 2, -1.0, 1.0)) / (2 * std::numbers::pi);
    // q N = k - 1 + 2 rho on even parity, k - 2 rho on odd parity
    auto count = [&](int k) { return ((q + k - 1) % 2 == 0) ? k - 1 + 2 * rho : k - 2 * rho; };
    double x = count(below + 1);
    if (!cp.empty()) {
      size_t near = 0;
      for (size_t i = 1; i < cp.size(); ++i)
        if (std::fabs(E - cp[i]) < std::fabs(E - cp[near])) near = i;
      if (std::fabs(E - cp[near]) < 1e-10) {
        int alt_below = cp[near] < E ? below - 1 : below + 1;
        if (std::fabs(count(alt_below + 1) - x) > 1e-8)
          fail(ErrorCode::band_index_ambiguity, "E sits on a critical point of the discriminant");
      }
    }
    sum += x;
  }
  return sum / theta_points / q;
}

}  // namespace qplab::spectra
