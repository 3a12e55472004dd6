#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

namespace qplab::cf {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;
using HPFloat = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                              boost::multiprecision::et_off>;

// Bits carried by HPFloat (about 332).
int working_bits();

// A frequency in (0,1). `exact` is set for rational input; `bits` is the
// number of trustworthy binary digits of `value` (less than working_bits()
// for short decimal strings).
struct Alpha {
  HPFloat value;
  std::optional<BigRat> exact;
  int bits = 0;
  std::string label;

  double to_double() const { return static_cast<double>(value); }
};

// Accepts "golden", "sqrt2m1", "p/q" or a decimal string.
Alpha parse_alpha(const std::string& text);
Alpha golden();
Alpha rational(const BigInt& p, const BigInt& q);
Alpha from_hp(const HPFloat& x, std::string label = "hp");

struct CfExpansion {
  Alpha alpha;
  std::vector<BigInt> a;       // a[0] = 0, a[k] for k >= 1
  std::vector<BigInt> p, q;    // indices 0..depth()
  std::vector<HPFloat> tail;   // alpha_k, indices 0..depth()
  std::vector<HPFloat> beta;   // prod_{l<=n} alpha_l
  std::vector<double> log_beta;
  std::vector<double> log_q;
  bool terminated = false;       // rational input, tail reached 0
  bool precision_limited = false;  // stopped because the working precision ran out

  int depth() const { return static_cast<int>(q.size()) - 1; }
  double q_double(int n) const { return static_cast<double>(q.at(n)); }
};

// Throws precision_exhausted if n_max steps cannot be trusted.
CfExpansion expand(const Alpha& alpha, int n_max);
// Expands as deep as the precision allows (at most n_cap steps).
CfExpansion expand_max(const Alpha& alpha, int n_cap = 4096);

// ||x||_Z of k*alpha computed at working precision.
HPFloat dist_to_int(const Alpha& alpha, const BigInt& k);

// Sign of q_i^x - q_j, decided in the log domain with an exact fallback on near-ties.
int compare_pow(const CfExpansion& cf, int i, double x, int j);

bool is_cd_bridge(const CfExpansion& cf, int m, int n, double A, double B, double C);

struct BridgeSelection {
  double A = 0;
  std::vector<int> index;         // n_k with Q_k = q_{n_k}
  std::vector<bool> via_bridge;   // disjunction at k satisfied by the bridge branch
  bool exhausted = false;         // computed range ran out before the scan could close
  bool forward_pending = false;   // last element still owes its forward bridge

  int size() const { return static_cast<int>(index.size()); }
};

BridgeSelection select_bridges(const CfExpansion& cf, double A);

struct InvariantReport {
  bool ok = true;
  std::vector<std::string> failures;
};

// Independent re-check of the selection postconditions.
InvariantReport check_bridge_invariants(const CfExpansion& cf, const BridgeSelection& sel);

struct DiophantineMode {
  enum Kind { frequency, rotation } kind = frequency;
  double v = 0;      // frequency mode constant
  double rho = 0;    // rotation mode
  double gamma = 0;  // rotation mode constant
  double tau = 1;
};

struct DiophantineResult {
  bool holds = true;
  long long worst_k = 0;
  double worst_margin = 0;
};

DiophantineResult check_diophantine(const CfExpansion& cf, const DiophantineMode& mode, long long K);

}  // namespace qplab::cf
