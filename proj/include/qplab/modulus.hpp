#pragma once

#include <functional>
#include <string>

namespace qplab::ud {

// The weight sequence M_s, held as s -> ln M_s.
class Modulus {
public:
  enum Kind { analytic, gevrey, power, custom };

  static Modulus make_analytic();
  static Modulus make_gevrey(double nu);
  // ln M_s = kappa * s^{delta/(delta-1)}, kappa chosen so that Lambda(y) ~ (ln y)^delta
  static Modulus make_power(double delta);
  static Modulus make_custom(std::function<double(double)> log_m, std::string name);

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  std::string name() const;

  double log_m(double s) const;
  // ln M_s - ln M_{s-1}, accurate for large s
  double log_ratio(double s) const;

  double C_M() const { return C_M_; }
  double c_M() const { return c_M_; }
  // the scans behind C_M/c_M peaked well inside the scanned range
  bool constants_stable() const { return stable_; }

private:
  Modulus(Kind k, double p, std::function<double(double)> f, std::string name);
  void scan_constants();

  Kind kind_;
  double param_;
  double power_scale_ = 1;
  std::function<double(double)> custom_;
  std::string name_;
  double C_M_ = 0, c_M_ = 0;
  bool stable_ = false;
};

struct LambdaValue {
  double value = 0;
  double argmax = 0;  // s(y); integral, kept as double for the log-domain variant
};

// Lambda(y) = sup_s (s ln y - ln M_s). Errors past 10^6 terms.
LambdaValue lambda_of(const Modulus& M, double y);
// Same with ln y supplied directly; no term cap (closed-form moduli only).
LambdaValue lambda_log(const Modulus& M, double ln_y);
double gamma_of(const Modulus& M, double x);
double gamma_log(const Modulus& M, double ln_x);

struct HypothesisReport {
  bool h1 = true;  // log-convexity on sampled triples
  bool h2 = true;  // s^{-1}(ln M_{s+1} - ln M_s) decreasing on the sampled tail
  bool constants_stable = true;
  bool ok() const { return h1 && h2 && constants_stable; }
};
HypothesisReport check_hypotheses(const Modulus& M);

struct ConditionAReport {
  bool growth = true;     // (I) Gamma tends to infinity along the grid
  bool monotone = true;   // (II) s(x) non-decreasing
  bool increment = true;  // (III) Lambda(y)-Lambda(x) >= (ln y - ln x) s(x)
  double worst_increment_margin = 0;
  bool ok() const { return growth && monotone && increment; }
};
ConditionAReport check_condition_a(const Modulus& M, double x_lo, double x_hi, int samples, int pairs,
                                   unsigned long long seed);

// Smallest T with Gamma(4t) > 18 for every t >= T.
double t1_threshold(const Modulus& M);
// ln of the threshold past which Gamma(x) >= 64 A^8 tau^4 and Lambda(x) >= ln x (never below T1).
double log_t_tilde(const Modulus& M, double A, double tau);

}  // namespace qplab::ud
