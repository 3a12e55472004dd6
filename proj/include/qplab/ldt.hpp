#pragma once

#include "qplab/cocycle.hpp"
#include "qplab/contfrac.hpp"
#include "qplab/fourier.hpp"
#include "qplab/sl2.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qplab::ldt {

using cf::BigInt;

// K_R^p(t) = ((1/R) sum_{j<R} e^{2 pi i j t})^p = R^{-p} sum_j c(j) e^{2 pi i j t}
struct FejerKernel {
  int R = 1, p = 1;
  std::vector<BigInt> c;  // j = 0 .. p(R-1)

  BigInt R_pow() const;
  // sum_j c(j) == R^p, exact
  bool identity_holds() const;
  std::vector<double> weights() const;  // c(j) / R^p
  cplx value(double t) const;           // closed form
};

FejerKernel fejer_kernel(int R, int p);
// min{1, (R ||t||)^{-p}}
double fejer_envelope(int R, int p, double t);

// R^{-p} sum_j c(j) u(theta + j alpha)
double fejer_average(const std::function<double(double)>& u, double alpha, const FejerKernel& k, double theta);

struct LdtScales {
  double kappa = 0.1;
  double sigma = 1.5, sigma1 = 0;
  double gamma = 0;
  double p = 0.2;
  double delta = 0;
  double b = 1;
  double nu = 0.95;
  double C1 = 1, C2 = 1e6;

  // derives delta = b(1/nu - 1), gamma = 1 + p(1 - sigma), sigma1 = p(sigma - 1)/delta
  // and checks 1 > gamma > 0, sigma1 > sigma > 1, delta < 1/sigma, delta sigma/(sigma-1) < p < 1/(sigma-1)
  static LdtScales make(double kappa, double sigma, double p, double b, double nu, double C1 = 1, double C2 = 1e6);
  // scales used for the sequence generator and the deviation-measure experiment
  static LdtScales induction();
  static LdtScales deviation();
};

struct DeviationMeasure {
  double measure = 0;    // grid fraction of the deviation set
  double bound = 0;      // R^{2 s1} / (2^8 exp(R^{s3}))
  double threshold = 0;  // s2 R^{-s1} unless overridden
  int R = 0;
  double s1 = 0, s2 = 0, s3 = 0;
  double mean = 0;
  bool below_floor = false;  // bound >= 1: nothing to test at this q
  bool ok() const { return below_floor || measure <= bound; }
};

// Fejer averages of u along alpha with R = q^sigma, a/q an approximant of alpha.
// |u| <= S on the circle; rho is the strip half-width of the subharmonic extension.
DeviationMeasure deviation_set_measure(const std::function<double(double)>& u, double alpha, long long a, long long q,
                                       const LdtScales& sc, int grid, double S, double rho,
                                       std::optional<double> threshold = std::nullopt);

struct Truncation {
  ud::MatSeries A_trunc;
  int N_tilde = 0;               // N^{delta/(1-nu)}
  double rho_N = 0;              // (rho / 4 pi) N_tilde^{nu - 1}
  double log_certificate = 0;    // ln max_k ||A(k)|| e^{rho |2 pi k|^nu}
  double error_measured = 0;     // sup over the grid of ||A - A_trunc||
  double error_bound = 0;        // certified tail sum
  double c_measured = 0;         // -ln(error) / N_tilde^nu
  double surrogate_sup = 0;      // sup of ln||A_trunc|| on |Im| = rho_N
  double surrogate_cap = 0;      // max{ln 2, C1}
  bool surrogate_ok = true;
};

// C1 defaults to ln(2 sup ||A||) on the real circle.
Truncation gevrey_truncate(const ud::MatSeries& A, int N, double nu, double rho, double delta,
                           std::optional<double> C1 = std::nullopt);

struct LdtPoint {
  long long q = 0;
  long long N = 0;
  double kappa = 0;
  double L_N = 0;
  double measure = 0;
  double reference = 0;  // exp(-c q^gamma)
  bool window_ok = true;       // C1 q^sigma < N < C2 q^sigma1
  bool approximant_ok = true;  // |alpha - a/q| < 1/q^2
};

// floor(C1 q^sigma) + 1
long long smallest_admissible_N(long long q, const LdtScales& sc);

// grid fraction of {theta : |ln||A_N(alpha, theta)||/N - L_N| > kappa}, alpha = c.alpha;
// a/q only fixes the admissible range of N
LdtPoint ldt_experiment(const cocycle::QpCocycle& c, long long a, long long q, long long N, double kappa, int grid,
                        const LdtScales& sc, double c_ref = 1);

struct Avalanche {
  double lhs = 0;
  double rhs_unit = 0;  // n / mu
  double min_norm = 0;
  bool norm_ok = true;         // min ||A_j|| >= mu > n
  bool cancellation_ok = true; // ln||A_{j+1}|| + ln||A_j|| - ln||A_{j+1} A_j|| < ln(mu) / 2
  bool hypothesis_ok() const { return norm_ok && cancellation_ok; }
};
Avalanche avalanche_check(const std::vector<Sl2Mat>& mats, double mu);

struct InductionTerm {
  int s = 0;
  int cf_index = 0;
  BigInt q_tilde;
  double log_q = 0;
  BigInt m;              // m_s (m_0 = N_0 / q_0)
  double log_m = 0;
  double log_N = 0;
  std::optional<BigInt> N;  // kept exactly while it fits comfortably
};

struct InductionResult {
  std::vector<InductionTerm> terms;
  bool exhausted = false;  // the expansion ran out before s_max
  int deepest = 0;
};

// q_0 is the first convergent denominator >= q0; c enters only the checker.
InductionResult induction_sequences(const cf::CfExpansion& cf, const LdtScales& sc, int s_max, const BigInt& q0);

// Independent re-check of the selection rule, the sandwich, divisibility and the m bounds.
std::vector<std::string> verify_induction(const cf::CfExpansion& cf, const LdtScales& sc, double c,
                                          const InductionResult& r);

struct PeriodicBound {
  double L_n = 0;
  double L_periodic = 0;
  double C1 = 0;  // max over the grid of ln||A||
  long long m = 0, r = 0;
  double bound = 0;  // L + 2 (ln m + q C1) / n
  double slack = 0;  // bound - L_n
};
PeriodicBound periodic_ln_bound(const ud::FourierSeries& V, double E, long long p, long long q, long long n, int grid);

}  // namespace qplab::ldt
