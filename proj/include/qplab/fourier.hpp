#pragma once

#include "qplab/sl2.hpp"

#include <array>
#include <vector>

namespace qplab::ud {

// Finitely supported Fourier series f(theta) = sum_{|k|<=K} c_k e^{2 pi i k theta}.
class FourierSeries {
public:
  FourierSeries() : K_(0), c_(1, 0.0) {}
  explicit FourierSeries(int K, bool real = true);
  FourierSeries(int K, std::vector<cplx> coeffs, bool real);

  static FourierSeries constant(cplx value);
  // 2*amp*cos(2 pi m theta) style helpers
  static FourierSeries cosine(int m, double amp);

  int K() const { return K_; }
  bool real_flag() const { return real_; }
  void set_real_flag(bool r) { real_ = r; }

  cplx operator[](int k) const { return (k < -K_ || k > K_) ? cplx(0) : c_[k + K_]; }
  cplx& at(int k) { return c_.at(k + K_); }
  const std::vector<cplx>& coeffs() const { return c_; }

  cplx eval(double theta) const;
  cplx eval(cplx theta) const;

  // largest |k| carrying a nonzero coefficient
  int support() const;
  bool hermitian(double tol = 1e-13) const;
  // project onto real-valued functions: c_{-k} = conj(c_k)
  FourierSeries symmetrized() const;
  FourierSeries resized(int K) const;
  double l1() const;
  double max_abs() const;

  FourierSeries operator+(const FourierSeries& o) const;
  FourierSeries operator-(const FourierSeries& o) const;
  FourierSeries operator*(cplx s) const;
  FourierSeries operator-() const { return *this * cplx(-1); }

private:
  int K_;
  std::vector<cplx> c_;
  bool real_ = true;
};

// Values on the grid theta_j = j/N.
std::vector<cplx> to_grid(const FourierSeries& f, int N);
// Coefficients |k| <= K_out from grid values. Throws aliasing when the relative
// l1 mass of the discarded modes exceeds tail_tol.
FourierSeries from_grid(const std::vector<cplx>& values, int K_out, bool real, double tail_tol = 1e-13);

int grid_size_for(int K);  // power of two >= 4K (and >= 16)

struct Split {
  FourierSeries head;  // |k| < K
  FourierSeries tail;  // |k| >= K
};
Split split_truncate(const FourierSeries& f, int K);
FourierSeries truncate(const FourierSeries& f, int K);  // keeps |k| < K

FourierSeries mul(const FourierSeries& f, const FourierSeries& g, int K_out = -1);
FourierSeries derive(const FourierSeries& f);
FourierSeries shift(const FourierSeries& f, double beta);
FourierSeries conj_fn(const FourierSeries& f);  // series of conj(f(theta))
double sup_on_grid(const FourierSeries& f, int N);

// 2x2 matrix of series, row-major.
struct MatSeries {
  std::array<FourierSeries, 4> e;

  MatSeries() = default;
  MatSeries(FourierSeries a, FourierSeries b, FourierSeries c, FourierSeries d) : e{a, b, c, d} {}

  static MatSeries constant(const Mat2c& m);
  static MatSeries identity() { return constant(Mat2c::identity()); }

  int K() const;
  Mat2c eval(double theta) const;
  Mat2c eval(cplx theta) const;
  MatSeries resized(int K) const;
  bool real_flag() const;

  MatSeries operator+(const MatSeries& o) const;
  MatSeries operator-(const MatSeries& o) const;
  MatSeries operator*(cplx s) const;
};

std::vector<Mat2c> to_grid(const MatSeries& m, int N);
MatSeries from_grid(const std::vector<Mat2c>& values, int K_out, bool real, double tail_tol = 1e-13);

MatSeries mul(const MatSeries& x, const MatSeries& y, int K_out = -1);
MatSeries derive(const MatSeries& m);
MatSeries shift(const MatSeries& m, double beta);
MatSeries truncate(const MatSeries& m, int K);
// exp/log/inverse are taken pointwise on a grid of size grid_size_for(K_out) (or N when given)
MatSeries exp_map(const MatSeries& x, int K_out = -1, int N = 0, double tail_tol = 1e-13);
MatSeries log_map(const MatSeries& g, int K_out = -1, int N = 0, double tail_tol = 1e-13);
MatSeries inverse(const MatSeries& g, int K_out = -1, int N = 0, double tail_tol = 1e-13);
// max over the grid of the pointwise determinant error
double det_defect(const MatSeries& m, int N);
double sup_on_grid(const MatSeries& m, int N);  // max operator norm on grid

}  // namespace qplab::ud
