#include "qplab/su11.hpp"

namespace qplab::kam {

using ud::FourierSeries;
using ud::MatSeries;

namespace {
const cplx I(0, 1);
}

Mat2c conj_matrix() {
  cplx s = 1.0 / cplx(1, 1);
  return Mat2c(s, -I * s, s, I * s);
}

Mat2c to_su11(const Mat2c& X) {
  Mat2c M = conj_matrix();
  return M * X * M.inverse();
}

Mat2c from_su11(const Mat2c& Y) {
  Mat2c M = conj_matrix();
  return M.inverse() * Y * M;
}

// X = [[x, y+z], [y-z, -x]]  <->  {t, v} = {z, x - i y}
Su11Series to_su11(const MatSeries& X) {
  const FourierSeries& x = X.e[0];
  FourierSeries y = (X.e[1] + X.e[2]) * cplx(0.5);
  FourierSeries z = (X.e[1] - X.e[2]) * cplx(0.5);
  Su11Series s;
  s.t = z;
  s.t.set_real_flag(true);
  s.v = x - y * I;
  s.v.set_real_flag(false);
  return s;
}

MatSeries from_su11(const Su11Series& s) {
  FourierSeries vc = ud::conj_fn(s.v);
  FourierSeries x = (s.v + vc) * cplx(0.5);
  FourierSeries y = (s.v - vc) * cplx(0, 0.5);
  x.set_real_flag(true);
  y.set_real_flag(true);
  FourierSeries z = s.t;
  z.set_real_flag(true);
  return MatSeries(x, y + z, y - z, -x);
}

MatSeries su11_matrix(const Su11Series& s) {
  FourierSeries it = s.t * I;
  it.set_real_flag(false);
  FourierSeries vc = ud::conj_fn(s.v);
  vc.set_real_flag(false);
  return MatSeries(it, s.v, vc, -it);
}

Su11Series su11_from_matrix(const MatSeries& m) {
  Su11Series s;
  s.t = ((m.e[0] - m.e[3]) * cplx(0, -0.5)).symmetrized();
  s.v = m.e[1];
  s.v.set_real_flag(false);
  return s;
}

Mat2c su11_value(const Su11Series& s, double theta) {
  cplx t = s.t.eval(theta).real(), v = s.v.eval(theta);
  return Mat2c(I * t, v, std::conj(v), -I * t);
}

ResonantSplit split_resonant(const Su11Series& g, int Q_half) {
  auto sp = ud::split_truncate(g.v, Q_half);
  ResonantSplit out;
  out.nre.t = FourierSeries(g.t.K(), true);
  out.nre.v = sp.head;
  out.nre.v.set_real_flag(false);
  out.re.t = g.t;
  out.re.v = sp.tail;
  out.re.v.set_real_flag(false);
  return out;
}

double norm(const Su11Series& s, const ud::NormSpec& spec) {
  return std::max(ud::norm(s.t, spec), ud::norm(s.v, spec));
}

}  // namespace qplab::kam
