#pragma once

#include "qplab/cocycle.hpp"
#include "qplab/contfrac.hpp"
#include "qplab/fourier.hpp"
#include "qplab/norms.hpp"
#include "qplab/su11.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace qplab::kam {

// v(theta + alpha) - v(theta) = -(T_Q g - g_0)
struct CohomResult {
  ud::FourierSeries v;
  double residual = 0;      // sup over the grid
  double min_divisor = 0;   // min |e^{2 pi i k alpha} - 1| over 0 < |k| < Q
  double max_ratio = 0;     // max |v_k| / |g_k|
  bool exact_bound_ok = true;  // |v_k| <= |g_k| / |e^{2 pi i k alpha} - 1|
  bool q_bound_ok = true;      // |v_k| <= Q |g_k|
};
CohomResult solve_cohomological(const ud::FourierSeries& g, double alpha, int Q);

struct DivisorFloor {
  double min_abs = 0;
  double bound = 0;  // gamma Q_next^{-tau^2}
  bool holds = true;
  long long worst_k = 0;
  int worst_sign = 1;
  double margin() const { return min_abs - bound; }
};
// min over |k| <= K and both signs of |e^{2 pi i (k alpha +- 2 rho)} - 1|
DivisorFloor small_divisor_floor(double alpha, double rho, double gamma, double tau, double Q_next, int K);
DivisorFloor small_divisor_floor(const cf::Alpha& alpha, double rho, double gamma, double tau, double Q_next, int K);

struct HomotopyOptions {
  ud::NormSpec norm;
  bool enforce_hypothesis = true;
  int max_iter = 50;
  double tol = 1e-12;
  int K_out = -1;  // bandwidth kept for g_re; default from the inputs
  int N = 0;       // grid; default from K_out
};

struct HomotopyResult {
  Su11Series Y;     // {0, y} with y supported on |k| < Q_half
  Su11Series g_re;
  double residual = 0;  // grid residual of e^{Y(.+a)} A e^g e^{-Y} = A e^{g_re}
  int iterations = 0;
  std::vector<double> trace;  // ||F(Y)|| per accepted iterate
  double norm_g = 0, norm_Y = 0, norm_g_re = 0;
  double nre_defect = 0;  // ||P_nre g_re||
  double divisor_min = 0;
  double divisor_floor = 0;
  bool contract_ok() const;
};
// A = diag(e^{-2 pi i rho}, e^{2 pi i rho}). divisor_floor <= 0 uses the measured minimum.
HomotopyResult homotopy_conjugate(double rho, const Su11Series& g, double alpha, int Q_half, double divisor_floor,
                                  const HomotopyOptions& opt = {});

struct ScheduleLevel {
  double Qbar = 0;  // may be inf when the denominator overflows a double
  double log_Qbar = 0;
  int cf_index = 0;  // Qbar = q_{cf_index}
  double r = 0, rbar = 0;
  double log_eps = 0, log_eps_tilde = -INFINITY;
};

struct Schedule {
  double log_T = 0;
  double log_T_paper = 0;
  double log_eps0 = 0;
  double A = 1, gamma = 0, tau = 0, r0 = 0, C = 1e3;
  int n0 = 0;  // selection index re-based to level 0
  std::vector<ScheduleLevel> levels;
  bool exhausted = false;  // no Qbar >= T in the computed range
};

// log T = max{3 ln c_M, 3 ln T~, -12 ln r0, 2 tau ln(4/gamma)} unless log_T_override is finite.
Schedule schedule(const cf::CfExpansion& cf, const cf::BridgeSelection& sel, const ud::Modulus& M, double gamma,
                  double tau, double r0, double C = 1e3, double log_T_override = NAN);

struct KamParams {
  ud::NormSpec norm;  // modulus and r_0
  double gamma = 0.1, tau = 2;
  int K_work = 256;
  int grid = 1024;
  bool paper_mode = false;
  double A = 25;         // bridge constant in paper mode; measured mode uses consecutive convergents
  double C = 1e3;        // paper-mode constant in eps~_n
  double T_measured = 10;  // first Qbar used by the measured ladder
};

struct KamState {
  int level = 0;
  double alpha = 0, rho_f = 0;
  ud::FourierSeries g;  // real, support < Qbar_n
  ud::MatSeries F;      // sl(2,R)-valued
  ud::MatSeries B = ud::MatSeries::identity();  // accumulated conjugation
  double r = 0, rbar = 0;
  double log_eps = 0, log_eps_tilde = -INFINITY;
};

// (alpha, R_{rho_f + g/2pi} e^{F}) as a cocycle
cocycle::QpCocycle state_cocycle(const KamState& s);
Sl2Mat state_fiber(const KamState& s, double theta);

struct StepReport {
  int level = 0;
  double Qbar = 0, Qbar_next = 0;
  int Q_half = 0;
  double norm_F_in = 0, norm_F_out = 0;  // at r_n and r_{n+1}
  double norm_F_tilde = 0;               // at rbar_n
  double phi_dist = 0;                   // ||Phi_n - I|| at r_{n+1}
  double phi_constant = 0;               // phi_dist / ||F~||^{1/2}
  double residual = 0;                   // grid residual of the step conjugation
  double cohom_residual = 0;
  DivisorFloor divisor;
  int newton_iterations = 0;
  double log_eps_schedule = 0;
};

struct StepResult {
  KamState next;
  StepReport report;
};

// One full step: remove g_n, homotopy in su(1,1), split off g~_n, restore.
StepResult kam_step(const KamState& s, const Schedule& sch, const KamParams& p);

KamState initial_state(const ud::MatSeries& F0, double alpha, double rho_f, double g0, const Schedule& sch);

// sl(2,R) perturbation with coefficients ~ e^{-|k|}, scaled to the requested norm
ud::MatSeries random_perturbation(int K, double eps, unsigned long long seed, const ud::NormSpec& spec);

// F~ = log(R_{-j rho} R_rho e^{F_j} ... R_rho e^{F_1}) on a grid
ud::MatSeries product_log(double rho, const std::vector<ud::MatSeries>& F, int K_out);

struct LedgerRecord {
  int level = 0;
  double log_eps_measured = 0;
  double log_eps_schedule = 0;
  double residual = 0;
  double phi_dist = 0;
  double divisor_margin = 0;
};

struct DriverOptions {
  int steps = 3;
  double tol = 0;  // stop once ||F_l|| <= tol
  KamParams params;
  std::optional<double> rho_f;  // measured from the cocycle when unset
  long long rotation_iterations = 20000;
};

struct DriverResult {
  std::vector<LedgerRecord> ledger;
  std::vector<StepReport> steps;
  KamState final_state;
  Schedule sched;
  bool hypothesis_stop = false;
  std::string stop_reason;
  double rho_initial = 0, rho_initial_err = 0;
  double rho_final = 0, rho_final_err = 0;
};

// c must carry a series; A = R_{rho_ref} e^{F_0}.
DriverResult almost_reducibility_driver(const cocycle::QpCocycle& c, double rho_ref, const cf::CfExpansion& cf,
                                        const DriverOptions& opt);

}  // namespace qplab::kam
