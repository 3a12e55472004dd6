#pragma once

#include "qplab/fourier.hpp"

#include <utility>
#include <vector>

namespace qplab::spectra {

struct Interval {
  double a = 0, b = 0;
};

// Sorted, disjoint closed intervals with b_i < a_{i+1}.
class BandSet {
public:
  BandSet() = default;
  // sorts and merges intervals that overlap or lie within merge_tol of each other
  explicit BandSet(std::vector<Interval> iv, double merge_tol = 0);

  const std::vector<Interval>& intervals() const { return iv_; }
  int size() const { return static_cast<int>(iv_.size()); }
  bool empty() const { return iv_.empty(); }
  double measure() const;
  double lo() const;
  double hi() const;
  bool contains(double x, double tol = 0) const;

  BandSet unite(const BandSet& o) const;
  BandSet intersect(const BandSet& o) const;
  BandSet complement(double lo, double hi) const;

private:
  std::vector<Interval> iv_;
};

struct SetDistance {
  double hausdorff = 0;
  double symdiff = 0;
};
SetDistance set_distance(const BandSet& a, const BandSet& b);

// t_{p/q}(E, theta) = tr S(theta + (q-1)p/q) ... S(theta), S = [[E - V, -1], [1, 0]]
class Discriminant {
public:
  Discriminant(const ud::FourierSeries& V, int p, int q);

  double operator()(double E, double theta) const;
  // (t, dt/dE)
  std::pair<double, double> with_derivative(double E, double theta) const;

  const ud::FourierSeries& V() const { return V_; }
  int p() const { return p_; }
  int q() const { return q_; }

private:
  ud::FourierSeries V_;
  int p_, q_;
};

double discriminant(const ud::FourierSeries& V, int p, int q, double E, double theta);

// t(E, theta) = sum_k a_k e^{2 pi i q k theta}
struct DiscriminantCoefficients {
  ud::FourierSeries a;
  int N = 0;                      // samples over one period 1/q
  bool aliasing_warning = false;  // top retained coefficient above 1e-10 of ||t||
};
DiscriminantCoefficients discriminant_fourier(const Discriminant& d, double E, int oversample = 4);

struct Extremum {
  double value = 0;
  double theta = 0;
};
// max over theta of +-t, grid over [0, 1/q) refined locally
Extremum theta_max(const Discriminant& d, double E, int grid, double sign = 1);

// max over theta of |t - a_{q,0}|
struct Deviation {
  double value = 0;
  double theta = 0;
  double a0 = 0;
};
Deviation chambers_deviation(const ud::FourierSeries& V, int p, int q, double E, int grid);

// [-2 - ||V||, 2 + ||V||] with a small margin, ||V|| bounded by the coefficient l1 norm
std::pair<double, double> default_window(const ud::FourierSeries& V);

struct BandResult {
  BandSet bands;
  std::vector<Interval> raw;            // one band per monotone piece of t
  std::vector<double> critical_points;  // zeros of dt/dE, q - 1 of them
  std::vector<double> touching;         // critical points with |t| = 2 (closed gaps)
  int refinements = 0;
};
BandResult band_set(const ud::FourierSeries& V, int p, int q, double theta, double lo, double hi);
BandResult band_set(const ud::FourierSeries& V, int p, int q, double theta);

struct SSets {
  BandSet S_minus, S_plus;
  int E_points = 0;
  double change_minus = 0, change_plus = 0;  // Hausdorff change under E-grid doubling
  bool converged = false;
};
// S_- = {max_theta |t| <= 2}, S_+ = {min_theta |t| <= 2}
SSets s_sets(const ud::FourierSeries& V, int p, int q, int theta_points, double lo, double hi);
SSets s_sets(const ud::FourierSeries& V, int p, int q, int theta_points);

// cross-check: intersection of band_set over the theta grid
BandSet s_minus_by_intersection(const ud::FourierSeries& V, int p, int q, int theta_points);

// {E : |a_{q,0}(E)| <= 2 - margin}; with margin 2 lambda^q this is S_- for the almost Mathieu family
BandSet mean_level_set(const ud::FourierSeries& V, int p, int q, double margin, double lo, double hi);

// Integrated density of states of the p/q approximant, averaged over theta_points phases.
double ids(const ud::FourierSeries& V, int p, int q, double E, int theta_points);

}  // namespace qplab::spectra
