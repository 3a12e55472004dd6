#pragma once

#include "qplab/fourier.hpp"
#include "qplab/modulus.hpp"

namespace qplab::ud {

// c = 4 pi^2 / 3
double norm_constant();

struct NormValue {
  double value = 0;
  double log_value = -INFINITY;
  int argmax_s = 0;
  int s_cap = 0;
  bool cap_sufficient = true;  // supremand already decreasing at the cap
};

// ||f||_{M,r} with ||D^s f|| replaced by sum_k |c_k| |2 pi k|^s. s_cap < 0 picks a default.
NormValue norm_mr(const FourierSeries& f, const Modulus& M, double r, int s_cap = -1);
NormValue norm_mr(const MatSeries& f, const Modulus& M, double r, int s_cap = -1);

// ||f||_{Lambda,r} = sum_k |c_k| exp(Lambda(|2 pi k| r))
NormValue norm_lambda(const FourierSeries& f, const Modulus& M, double r);

// constants that appear in the tail and norm-comparison bounds
double c_mr_from_lambda();   // c * sup_s (1+s)^2 2^{-s}
double c_tail_mr();          // c * sup_s (1+s)^2 (2/3)^s / 4

// Upper bounds for the tail R_K f = f - T_K f when K r >= T1.
struct TailBounds {
  double c0 = 0;          // (K r^2)^{-1} ||f|| exp(-Lambda(pi K r))
  double mr_half = 0;     // C (K r^2)^{-1} ||f|| exp(-Gamma(4Kr) ln(4Kr) / 9)
  bool applicable = false;  // K r >= T1
};
TailBounds tail_bounds(const FourierSeries& f, const Modulus& M, double r, int K);

// Norm of a series with a NormSpec bundle: used by the KAM layer.
struct NormSpec {
  Modulus M = Modulus::make_analytic();
  double r = 0.1;
};
double norm(const FourierSeries& f, const NormSpec& spec);
double norm(const MatSeries& f, const NormSpec& spec);

}  // namespace qplab::ud
