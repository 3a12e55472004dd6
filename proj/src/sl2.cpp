#include "qplab/sl2.hpp"

#include "qplab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qplab {

Sl2Mat Sl2Mat::rotation(double g) {
  double c = std::cos(2 * std::numbers::pi * g), s = std::sin(2 * std::numbers::pi * g);
  return {c, -s, s, c};
}

double Sl2Mat::norm() const {
  double p = std::hypot(a + d, c - b), q = std::hypot(a - d, b + c);
  return 0.5 * (p + q);
}

double Sl2Mat::max_abs() const {
  return std::max({std::fabs(a), std::fabs(b), std::fabs(c), std::fabs(d)});
}

Sl2Mat Sl2Mat::inverse() const {
  double dt = det();
  if (dt == 0) throw Error(ErrorCode::invalid_argument, "sl2", "singular matrix");
  return adj() * (1.0 / dt);
}

double Mat2c::norm() const {
  // sigma_max^2 = (S + sqrt(S^2 - 4|det|^2)) / 2
  double S = std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
  double D = std::abs(det());
  double disc = std::max(0.0, S * S - 4 * D * D);
  return std::sqrt(0.5 * (S + std::sqrt(disc)));
}

double Mat2c::max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }

double Mat2c::max_imag() const {
  return std::max({std::fabs(a.imag()), std::fabs(b.imag()), std::fabs(c.imag()), std::fabs(d.imag())});
}

Mat2c Mat2c::inverse() const {
  cplx dt = det();
  if (dt == cplx(0)) throw Error(ErrorCode::invalid_argument, "sl2", "singular matrix");
  return adj() * (1.0 / dt);
}

namespace {

// sinh(z)/z and cosh(z) with a series near zero
cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-4) {
    cplx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

}  // namespace

Mat2c expm(const Mat2c& x) {
  cplx half = 0.5 * x.trace();
  Mat2c t(x.a - half, x.b, x.c, x.d - half);
  // traceless: t^2 = -det(t) I
  cplx mu = std::sqrt(-t.det());
  cplx ch = std::cosh(mu), sc = sinhc(mu);
  Mat2c r(ch + sc * t.a, sc * t.b, sc * t.c, ch + sc * t.d);
  return r * std::exp(half);
}

Mat2c logm(const Mat2c& g) {
  cplx dt = g.det();
  if (std::abs(dt) == 0) throw Error(ErrorCode::branch_cut, "sl2", "log of singular matrix");
  cplx root = std::sqrt(dt);
  Mat2c u = g * (1.0 / root);
  cplx z = 0.5 * u.trace();
  // eigenvalues of u are exp(+-mu) with cosh(mu) = z; principal branch needs them off (-inf,0]
  cplx disc = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
  cplx l1 = z + disc, l2 = z - disc;
  auto on_cut = [](cplx l) { return l.real() <= 0 && std::fabs(l.imag()) <= 1e-12 * std::max(1.0, std::abs(l)); };
  if (on_cut(l1) || on_cut(l2) || on_cut(root))
    throw Error(ErrorCode::branch_cut, "sl2", "eigenvalue on the negative real axis");
  cplx mu = std::log(l1);
  if (std::fabs(mu.imag()) > std::numbers::pi - 1e-9) mu = -std::log(l2);
  Mat2c t(u.a - z, u.b, u.c, u.d - z);  // u - cosh(mu) I = sinh(mu)/mu * X
  cplx sc = sinhc(mu);
  Mat2c x = t * (1.0 / sc);
  cplx ld = std::log(root);
  return Mat2c(x.a + ld, x.b, x.c, x.d + ld);
}

}  // namespace qplab
