#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace migsim {

using BigInt = boost::multiprecision::cpp_int;

// Stirling numbers of the second kind S(n, l), exact integers up to
// n = 64 (S(64, l) tops 1e57, far past any fixed-width type).
class StirlingTable {
 public:
  explicit StirlingTable(int max_n = kDefaultMaxN);

  static constexpr int kDefaultMaxN = 64;

  int max_n() const { return max_n_; }

  // S(n, l); requires 0 <= l <= n <= max_n().
  const BigInt& operator()(int n, int l) const;

  // Row sum: the Bell number B_n.
  BigInt bell(int n) const;

  static const StirlingTable& shared();

 private:
  int max_n_;
  std::vector<std::vector<BigInt>> rows_;
};

// S(n, l) through the shared table; throws std::invalid_argument outside
// 0 <= l <= n <= 64.
const BigInt& stirling2(int n, int l);

// Touchard polynomial T_n(x) = sum_l S(n, l) x^l, the n-th moment of a
// Poisson variable with mean x.  Requires x >= 0 and n <= 64.
double touchard(int n, double x);

// Poisson count law for a region of mass `mass`, evaluated in log space so
// n in the thousands still works.
double log_poisson_count_pmf(int n, double mass);
double poisson_count_pmf(int n, double mass);

// Upper envelope for the probability of seeing exactly n points in a region
// of volume `volume` under any configuration law dominated by the kappa
// benchmark: n! (e/n)^n times the Poisson pmf at mass kappa * volume.
// Requires n >= 1.
double subpoisson_pmf_bound(int n, double kappa, double volume);

// Moment generating function of the Poisson count, exp(mass * (e^beta - 1)),
// and its Touchard-series truncation sum_{n<=terms} beta^n T_n(mass) / n!.
double poisson_mgf(double beta, double mass);
double poisson_mgf_touchard_series(double beta, double mass, int terms = 30);

}  // namespace migsim
