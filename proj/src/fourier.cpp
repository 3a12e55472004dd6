#include "qplab/fourier.hpp"

#include "qplab/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace qplab::ud {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct PlanCache {
  std::mutex mu;
  std::map<std::pair<int, int>, fftw_plan> plans;

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    std::vector<cplx> in(n), out(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void dft(std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
  int n = static_cast<int>(in.size());
  out.assign(n, 0.0);
  fftw_execute_dft(cache().get(n, sign), reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

[[noreturn]] void aliasing(double rel, int K_out) {
  std::ostringstream os;
  os << "output bandwidth " << K_out << " drops relative tail mass " << rel;
  throw Error(ErrorCode::aliasing, "udspace", os.str());
}

}  // namespace

FourierSeries::FourierSeries(int K, bool real) : K_(K), c_(2 * K + 1, 0.0), real_(real) {
  if (K < 0) throw Error(ErrorCode::invalid_argument, "udspace", "negative bandwidth");
}

FourierSeries::FourierSeries(int K, std::vector<cplx> coeffs, bool real)
    : K_(K), c_(std::move(coeffs)), real_(real) {
  if (K < 0 || c_.size() != static_cast<std::size_t>(2 * K + 1))
    throw Error(ErrorCode::invalid_argument, "udspace", "coefficient count must be 2K+1");
}

FourierSeries FourierSeries::constant(cplx value) {
  FourierSeries f(0, value.imag() == 0);
  f.c_[0] = value;
  return f;
}

FourierSeries FourierSeries::cosine(int m, double amp) {
  FourierSeries f(m, true);
  if (m == 0) {
    f.at(0) = 2 * amp;
  } else {
    f.at(m) = amp;
    f.at(-m) = amp;
  }
  return f;
}

cplx FourierSeries::eval(double theta) const {
  cplx w = std::polar(1.0, kTwoPi * theta);
  cplx wk = 1.0, acc = c_[K_];
  cplx wi = std::conj(w), wik = 1.0;
  for (int k = 1; k <= K_; ++k) {
    wk *= w;
    wik *= wi;
    if (k % 64 == 0) {
      wk = std::polar(1.0, kTwoPi * theta * k);
      wik = std::conj(wk);
    }
    acc += c_[K_ + k] * wk + c_[K_ - k] * wik;
  }
  return acc;
}

cplx FourierSeries::eval(cplx theta) const {
  cplx acc = c_[K_];
  for (int k = 1; k <= K_; ++k) {
    acc += c_[K_ + k] * std::exp(cplx(0, kTwoPi * k) * theta) + c_[K_ - k] * std::exp(cplx(0, -kTwoPi * k) * theta);
  }
  return acc;
}

int FourierSeries::support() const {
  for (int k = K_; k > 0; --k)
    if (c_[K_ + k] != cplx(0) || c_[K_ - k] != cplx(0)) return k;
  return 0;
}

bool FourierSeries::hermitian(double tol) const {
  double scale = std::max(1e-300, max_abs());
  for (int k = 0; k <= K_; ++k)
    if (std::abs(c_[K_ + k] - std::conj(c_[K_ - k])) > tol * scale) return false;
  return true;
}

FourierSeries FourierSeries::symmetrized() const {
  FourierSeries r(K_, true);
  for (int k = -K_; k <= K_; ++k) r.c_[K_ + k] = 0.5 * (c_[K_ + k] + std::conj(c_[K_ - k]));
  return r;
}

FourierSeries FourierSeries::resized(int K) const {
  FourierSeries r(K, real_);
  int m = std::min(K, K_);
  for (int k = -m; k <= m; ++k) r.c_[K + k] = c_[K_ + k];
  return r;
}

double FourierSeries::l1() const {
  double s = 0;
  for (auto& v : c_) s += std::abs(v);
  return s;
}

double FourierSeries::max_abs() const {
  double s = 0;
  for (auto& v : c_) s = std::max(s, std::abs(v));
  return s;
}

FourierSeries FourierSeries::operator+(const FourierSeries& o) const {
  int K = std::max(K_, o.K_);
  FourierSeries r(K, real_ && o.real_);
  for (int k = -K; k <= K; ++k) r.c_[K + k] = (*this)[k] + o[k];
  return r;
}

FourierSeries FourierSeries::operator-(const FourierSeries& o) const { return *this + (-o); }

FourierSeries FourierSeries::operator*(cplx s) const {
  FourierSeries r = *this;
  for (auto& v : r.c_) v *= s;
  r.real_ = real_ && s.imag() == 0;
  return r;
}

int grid_size_for(int K) {
  int n = 16;
  while (n < 4 * K) n *= 2;
  return n;
}

std::vector<cplx> to_grid(const FourierSeries& f, int N) {
  int K = f.K();
  if (2 * K >= N) throw Error(ErrorCode::aliasing, "udspace", "grid too small for bandwidth");
  std::vector<cplx> in(N, 0.0), out;
  for (int k = -K; k <= K; ++k) in[(k + N) % N] = f[k];
  dft(in, out, FFTW_BACKWARD);
  return out;
}

FourierSeries from_grid(const std::vector<cplx>& values, int K_out, bool real, double tail_tol) {
  int N = static_cast<int>(values.size());
  if (2 * K_out >= N) throw Error(ErrorCode::aliasing, "udspace", "grid too small for output bandwidth");
  std::vector<cplx> in(values), out;
  dft(in, out, FFTW_FORWARD);
  double total = 0, dropped = 0;
  for (int j = 0; j < N; ++j) {
    int k = j <= N / 2 ? j : j - N;
    double m = std::abs(out[j]) / N;
    total += m;
    if (std::abs(k) > K_out) dropped += m;
  }
  if (tail_tol >= 0 && total > 0 && dropped > tail_tol * total) aliasing(dropped / total, K_out);
  FourierSeries r(K_out, real);
  for (int k = -K_out; k <= K_out; ++k) r.at(k) = out[(k + N) % N] / static_cast<double>(N);
  return real ? r.symmetrized() : r;
}

Split split_truncate(const FourierSeries& f, int K) {
  if (K < 1) throw Error(ErrorCode::invalid_argument, "udspace", "cutoff must be >= 1");
  Split s{FourierSeries(std::max(0, std::min(K - 1, f.K())), f.real_flag()), FourierSeries(f.K(), f.real_flag())};
  for (int k = -f.K(); k <= f.K(); ++k) {
    if (std::abs(k) < K) s.head.at(k) = f[k];
    else s.tail.at(k) = f[k];
  }
  return s;
}

FourierSeries truncate(const FourierSeries& f, int K) { return split_truncate(f, K).head; }

FourierSeries mul(const FourierSeries& f, const FourierSeries& g, int K_out) {
  int Kp = f.K() + g.K();
  if (K_out < 0) K_out = Kp;
  int N = 16;
  while (N < 2 * Kp + 2 || N < 4 * K_out) N *= 2;
  auto a = to_grid(f, N), b = to_grid(g, N);
  for (int j = 0; j < N; ++j) a[j] *= b[j];
  return from_grid(a, K_out, f.real_flag() && g.real_flag());
}

FourierSeries derive(const FourierSeries& f) {
  FourierSeries r(f.K(), f.real_flag());
  for (int k = -f.K(); k <= f.K(); ++k) r.at(k) = cplx(0, kTwoPi * k) * f[k];
  return r;
}

FourierSeries shift(const FourierSeries& f, double beta) {
  FourierSeries r(f.K(), f.real_flag());
  for (int k = -f.K(); k <= f.K(); ++k) {
    // reduce k*beta mod 1 before forming the phase
    double x = std::fmod(static_cast<double>(k) * beta, 1.0);
    r.at(k) = f[k] * std::polar(1.0, kTwoPi * x);
  }
  return r;
}

FourierSeries conj_fn(const FourierSeries& f) {
  FourierSeries r(f.K(), f.real_flag());
  for (int k = -f.K(); k <= f.K(); ++k) r.at(k) = std::conj(f[-k]);
  return r;
}

double sup_on_grid(const FourierSeries& f, int N) {
  double s = 0;
  for (auto& v : to_grid(f, N)) s = std::max(s, std::abs(v));
  return s;
}

MatSeries MatSeries::constant(const Mat2c& m) {
  return {FourierSeries::constant(m.a), FourierSeries::constant(m.b), FourierSeries::constant(m.c),
          FourierSeries::constant(m.d)};
}

int MatSeries::K() const {
  return std::max({e[0].K(), e[1].K(), e[2].K(), e[3].K()});
}

Mat2c MatSeries::eval(double theta) const {
  return {e[0].eval(theta), e[1].eval(theta), e[2].eval(theta), e[3].eval(theta)};
}

Mat2c MatSeries::eval(cplx theta) const {
  return {e[0].eval(theta), e[1].eval(theta), e[2].eval(theta), e[3].eval(theta)};
}

MatSeries MatSeries::resized(int K) const {
  return {e[0].resized(K), e[1].resized(K), e[2].resized(K), e[3].resized(K)};
}

bool MatSeries::real_flag() const {
  return e[0].real_flag() && e[1].real_flag() && e[2].real_flag() && e[3].real_flag();
}

MatSeries MatSeries::operator+(const MatSeries& o) const {
  return {e[0] + o.e[0], e[1] + o.e[1], e[2] + o.e[2], e[3] + o.e[3]};
}

MatSeries MatSeries::operator-(const MatSeries& o) const {
  return {e[0] - o.e[0], e[1] - o.e[1], e[2] - o.e[2], e[3] - o.e[3]};
}

MatSeries MatSeries::operator*(cplx s) const { return {e[0] * s, e[1] * s, e[2] * s, e[3] * s}; }

std::vector<Mat2c> to_grid(const MatSeries& m, int N) {
  std::array<std::vector<cplx>, 4> g;
  for (int i = 0; i < 4; ++i) g[i] = to_grid(m.e[i], N);
  std::vector<Mat2c> out(N);
  for (int j = 0; j < N; ++j) out[j] = Mat2c(g[0][j], g[1][j], g[2][j], g[3][j]);
  return out;
}

MatSeries from_grid(const std::vector<Mat2c>& values, int K_out, bool real, double tail_tol) {
  std::size_t N = values.size();
  std::array<std::vector<cplx>, 4> g;
  for (auto& v : g) v.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    g[0][j] = values[j].a;
    g[1][j] = values[j].b;
    g[2][j] = values[j].c;
    g[3][j] = values[j].d;
  }
  // the tail test is taken relative to the whole matrix, not per entry
  double total = 0;
  std::array<FourierSeries, 4> full;
  for (int i = 0; i < 4; ++i) {
    full[i] = from_grid(g[i], static_cast<int>(N / 2) - 1, false, -1);
    total += full[i].l1();
  }
  double dropped = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = -full[i].K(); k <= full[i].K(); ++k)
      if (std::abs(k) > K_out) dropped += std::abs(full[i][k]);
  if (tail_tol >= 0 && total > 0 && dropped > tail_tol * total) aliasing(dropped / total, K_out);
  MatSeries r;
  for (int i = 0; i < 4; ++i) {
    FourierSeries f = full[i].resized(K_out);
    r.e[i] = real ? f.symmetrized() : f;
    r.e[i].set_real_flag(real);
  }
  return r;
}

namespace {

int pick_grid(int K_in, int K_out, int N) {
  if (N > 0) return N;
  int n = grid_size_for(std::max(K_in, K_out));
  while (n <= 2 * std::max(K_in, K_out) + 1) n *= 2;
  return n;
}

template <class F>
MatSeries pointwise(const MatSeries& x, int K_out, int N, double tail_tol, F fn) {
  if (K_out < 0) K_out = x.K();
  N = pick_grid(x.K(), K_out, N);
  auto g = to_grid(x, N);
  for (auto& v : g) v = fn(v);
  return from_grid(g, K_out, x.real_flag(), tail_tol);
}

}  // namespace

MatSeries mul(const MatSeries& x, const MatSeries& y, int K_out) {
  int Kp = x.K() + y.K();
  if (K_out < 0) K_out = Kp;
  int N = 16;
  while (N < 2 * Kp + 2 || N < 4 * K_out) N *= 2;
  auto a = to_grid(x, N), b = to_grid(y, N);
  for (int j = 0; j < N; ++j) a[j] = a[j] * b[j];
  return from_grid(a, K_out, x.real_flag() && y.real_flag());
}

MatSeries derive(const MatSeries& m) { return {derive(m.e[0]), derive(m.e[1]), derive(m.e[2]), derive(m.e[3])}; }

MatSeries shift(const MatSeries& m, double beta) {
  return {shift(m.e[0], beta), shift(m.e[1], beta), shift(m.e[2], beta), shift(m.e[3], beta)};
}

MatSeries truncate(const MatSeries& m, int K) {
  return {truncate(m.e[0], K), truncate(m.e[1], K), truncate(m.e[2], K), truncate(m.e[3], K)};
}

MatSeries exp_map(const MatSeries& x, int K_out, int N, double tail_tol) {
  return pointwise(x, K_out, N, tail_tol, [](const Mat2c& v) { return expm(v); });
}

MatSeries log_map(const MatSeries& g, int K_out, int N, double tail_tol) {
  return pointwise(g, K_out, N, tail_tol, [](const Mat2c& v) { return logm(v); });
}

MatSeries inverse(const MatSeries& g, int K_out, int N, double tail_tol) {
  return pointwise(g, K_out, N, tail_tol, [](const Mat2c& v) { return v.inverse(); });
}

double det_defect(const MatSeries& m, int N) {
  double s = 0;
  for (auto& v : to_grid(m, N)) s = std::max(s, std::abs(v.det() - 1.0));
  return s;
}

double sup_on_grid(const MatSeries& m, int N) {
  double s = 0;
  for (auto& v : to_grid(m, N)) s = std::max(s, v.norm());
  return s;
}

}  // namespace qplab::ud
