#pragma once

#include "qplab/fourier.hpp"
#include "qplab/norms.hpp"

namespace qplab::kam {

// {t, v} = [[i t, v], [conj v, -i t]] with t real-valued and v complex-valued.
struct Su11Series {
  ud::FourierSeries t;
  ud::FourierSeries v{0, false};

  int K() const { return std::max(t.K(), v.K()); }
  Su11Series operator+(const Su11Series& o) const { return {t + o.t, v + o.v}; }
  Su11Series operator-(const Su11Series& o) const { return {t - o.t, v - o.v}; }
};

// M = (1+i)^{-1} [[1, -i], [1, i]]; X -> M X M^{-1} maps sl(2,R) onto su(1,1).
Mat2c conj_matrix();
Mat2c to_su11(const Mat2c& X);
Mat2c from_su11(const Mat2c& Y);

// Coefficientwise versions for real sl(2,R)-valued series.
Su11Series to_su11(const ud::MatSeries& X);
ud::MatSeries from_su11(const Su11Series& s);

// The complex matrix series [[i t, v], [conj v, -i t]] and its inverse reading.
ud::MatSeries su11_matrix(const Su11Series& s);
Su11Series su11_from_matrix(const ud::MatSeries& m);
Mat2c su11_value(const Su11Series& s, double theta);

struct ResonantSplit {
  Su11Series nre;  // {0, T_Q v}
  Su11Series re;   // {t, R_Q v}
};
ResonantSplit split_resonant(const Su11Series& g, int Q_half);

// entrywise max of the (M, r) norms, i.e. max(||t||, ||v||)
double norm(const Su11Series& s, const ud::NormSpec& spec);

}  // namespace qplab::kam
