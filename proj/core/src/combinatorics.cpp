#include "migsim/combinatorics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace migsim {

StirlingTable::StirlingTable(int max_n) : max_n_(max_n) {
  if (max_n < 0) throw std::invalid_argument("stirling: max_n must be nonnegative");
  rows_.resize(max_n + 1);
  rows_[0] = {BigInt(1)};  // S(0, 0) = 1
  for (int n = 1; n <= max_n; ++n) {
    rows_[n].assign(n + 1, BigInt(0));
    // S(n, l) = l S(n-1, l) + S(n-1, l-1)
    for (int l = 1; l <= n; ++l) {
      BigInt v = (l <= n - 1) ? BigInt(l) * rows_[n - 1][l] : BigInt(0);
      v += rows_[n - 1][l - 1];
      rows_[n][l] = std::move(v);
    }
  }
}

const BigInt& StirlingTable::operator()(int n, int l) const {
  if (n < 0 || n > max_n_ || l < 0 || l > n) {
    throw std::invalid_argument("stirling: need 0 <= l <= n <= " +
                                std::to_string(max_n_));
  }
  return rows_[n][l];
}

BigInt StirlingTable::bell(int n) const {
  if (n < 0 || n > max_n_) {
    throw std::invalid_argument("stirling: n out of range");
  }
  BigInt s = 0;
  for (const BigInt& v : rows_[n]) s += v;
  return s;
}

const StirlingTable& StirlingTable::shared() {
  static const StirlingTable table(kDefaultMaxN);
  return table;
}

const BigInt& stirling2(int n, int l) { return StirlingTable::shared()(n, l); }

double touchard(int n, double x) {
  const StirlingTable& t = StirlingTable::shared();
  if (n < 0 || n > t.max_n()) {
    throw std::invalid_argument("touchard: n out of table range");
  }
  if (x < 0.0) throw std::invalid_argument("touchard: x must be nonnegative");
  if (n == 0) return 1.0;
  // Horner over l keeps intermediate magnitudes tame.
  double acc = 0.0;
  for (int l = n; l >= 1; --l) {
    acc = acc * x + static_cast<double>(t(n, l));
  }
  return acc * x;
}

double log_poisson_count_pmf(int n, double mass) {
  if (n < 0) throw std::invalid_argument("count pmf: n must be nonnegative");
  if (mass < 0.0) throw std::invalid_argument("count pmf: mass must be nonnegative");
  if (mass == 0.0) {
    return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return n * std::log(mass) - mass - std::lgamma(n + 1.0);
}

double poisson_count_pmf(int n, double mass) {
  return std::exp(log_poisson_count_pmf(n, mass));
}

double subpoisson_pmf_bound(int n, double kappa, double volume) {
  if (n < 1) throw std::invalid_argument("pmf bound: n must be >= 1");
  if (kappa < 0.0 || volume <= 0.0) {
    throw std::invalid_argument("pmf bound: need kappa >= 0 and volume > 0");
  }
  // log of n! (e/n)^n, then the Poisson factor.
  const double log_prefactor = std::lgamma(n + 1.0) + n * (1.0 - std::log(double(n)));
  return std::exp(log_prefactor + log_poisson_count_pmf(n, kappa * volume));
}

double poisson_mgf(double beta, double mass) {
  if (mass < 0.0) throw std::invalid_argument("mgf: mass must be nonnegative");
  return std::exp(mass * std::expm1(beta));
}

double poisson_mgf_touchard_series(double beta, double mass, int terms) {
  if (mass < 0.0) throw std::invalid_argument("mgf: mass must be nonnegative");
  if (terms < 0 || terms > StirlingTable::kDefaultMaxN) {
    throw std::invalid_argument("mgf: series length out of table range");
  }
  double sum = 1.0;  // n = 0 term
  double beta_pow_over_fact = 1.0;
  for (int n = 1; n <= terms; ++n) {
    beta_pow_over_fact *= beta / n;
    sum += beta_pow_over_fact * touchard(n, mass);
  }
  return sum;
}

}  // namespace migsim
