#pragma once

#include <complex>

namespace qplab {

using cplx = std::complex<double>;

// Real 2x2 matrix, row-major [[a, b], [c, d]]. Cocycle fibers live here.
struct Sl2Mat {
  double a = 1, b = 0, c = 0, d = 1;

  static Sl2Mat identity() { return {}; }
  static Sl2Mat diag(double x, double y) { return {x, 0, 0, y}; }
  // R_g = exp(-2 pi g J), J = [[0,1],[-1,0]]
  static Sl2Mat rotation(double g);

  double det() const { return a * d - b * c; }
  double trace() const { return a + d; }
  // largest singular value, closed form
  double norm() const;
  double max_abs() const;
  // adjugate; equals the inverse when det = 1
  Sl2Mat adj() const { return {d, -b, -c, a}; }
  Sl2Mat inverse() const;

  Sl2Mat operator*(const Sl2Mat& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Sl2Mat operator+(const Sl2Mat& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Sl2Mat operator-(const Sl2Mat& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Sl2Mat operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
};

// Complex 2x2 matrix, used for grid values of series and su(1,1) work.
struct Mat2c {
  cplx a = 1, b = 0, c = 0, d = 1;

  Mat2c() = default;
  Mat2c(cplx a_, cplx b_, cplx c_, cplx d_) : a(a_), b(b_), c(c_), d(d_) {}
  explicit Mat2c(const Sl2Mat& m) : a(m.a), b(m.b), c(m.c), d(m.d) {}

  static Mat2c identity() { return {}; }
  static Mat2c zero() { return {0, 0, 0, 0}; }

  cplx det() const { return a * d - b * c; }
  cplx trace() const { return a + d; }
  double norm() const;  // largest singular value
  double max_abs() const;
  Mat2c adj() const { return {d, -b, -c, a}; }
  Mat2c inverse() const;
  Sl2Mat real() const { return {a.real(), b.real(), c.real(), d.real()}; }
  double max_imag() const;

  Mat2c operator*(const Mat2c& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  Mat2c operator+(const Mat2c& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  Mat2c operator-(const Mat2c& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  Mat2c operator*(cplx s) const { return {a * s, b * s, c * s, d * s}; }
};

Mat2c expm(const Mat2c& x);
// principal logarithm; throws branch_cut when an eigenvalue sits on (-inf, 0]
Mat2c logm(const Mat2c& g);

}  // namespace qplab
