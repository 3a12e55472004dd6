#pragma once

#include "qplab/contfrac.hpp"
#include "qplab/fourier.hpp"
#include "qplab/sl2.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qplab::cocycle {

using Fiber = std::function<Sl2Mat(double)>;

struct QpCocycle {
  double alpha = 0;
  Fiber fiber;
  std::string label;
  std::optional<ud::MatSeries> series;   // set for series-defined fibers
  std::optional<ud::FourierSeries> potential;  // set for Schroedinger fibers
  double energy = 0;
};

QpCocycle schrodinger(const ud::FourierSeries& V, double E, double alpha);
// almost Mathieu: V(theta) = 2 lambda cos(2 pi theta)
QpCocycle amo(double lambda, double E, double alpha);
ud::FourierSeries amo_potential(double lambda);
QpCocycle constant(const Sl2Mat& A, double alpha, std::string label = "constant");
QpCocycle from_series(const ud::MatSeries& A, double alpha, std::string label = "series");

// value = m * exp(log_scale)
struct ScaledMat {
  Sl2Mat m;
  double log_scale = 0;

  double log_norm() const;
  Sl2Mat value() const;
};

ScaledMat transfer_scaled(const QpCocycle& c, double theta, long long n);
Sl2Mat transfer(const QpCocycle& c, double theta, long long n);

double finite_lyapunov(const QpCocycle& c, long long n, int grid);

// relative residual of A_{m+n}(theta) = A_m(theta + n alpha) A_n(theta)
double cocycle_residual(const QpCocycle& c, double theta, long long m, long long n);

// Winding number of theta -> direction of A(theta) e1 over `samples` points.
int winding(const QpCocycle& c, int samples = 256);

enum class Estimator { plain, weighted };

struct RotationResult {
  double rho = 0;        // in [0,1)
  double error_bar = 0;
  long long n = 0;
};

RotationResult rotation_number(const QpCocycle& c, long long n, double theta0 = 0, double y0 = 0,
                               Estimator est = Estimator::plain);

// circular distance on R/Z
double circle_dist(double a, double b);

struct RenormIterates {
  Fiber A_n0, A_n1;
  double beta_prev = 0;  // beta_{n-1}; the maps live on [0, 1/beta_prev]
  double alpha_n = 0;
  int level = 0;
};

RenormIterates renorm_iterates(const QpCocycle& c, const cf::CfExpansion& cf, int n, double theta_star);
// max relative residual of A1(t+1) A0(t) = A0(t+alpha_n) A1(t) over samples in [0, 1/beta_prev]
double commutation_residual(const RenormIterates& r, int samples);

}  // namespace qplab::cocycle
