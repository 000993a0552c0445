#pragma once

#include <functional>
#include <span>
#include <vector>

#include "migsim/geometry.hpp"
#include "migsim/model.hpp"

namespace migsim {

// Quasi-observable: a function on finite point sets given by symmetric
// per-cardinality components, bounded and supported in a box.  Evaluates to
// zero as soon as a point leaves the support or the cardinality exceeds the
// cap, which is what makes the combinatorial sums below finite.
class FiniteFunction {
 public:
  using Component = std::function<double(std::span<const Position>)>;

  FiniteFunction(int dim, int max_points, Box support, double bound,
                 std::vector<Component> components);

  double operator()(std::span<const Position> eta) const;

  int dim() const { return dim_; }
  int max_points() const { return max_points_; }
  const Box& support() const { return support_; }
  double bound() const { return bound_; }

 private:
  int dim_;
  int max_points_;
  Box support_;
  double bound_;
  std::vector<Component> components_;
};

// Sum of G over all finite subsets of gamma (the combinatorial transform
// turning quasi-observables into observables).  Enumerates subsets of the
// in-support points up to G's cardinality cap; requires |gamma| <= 24.
double k_transform(const FiniteFunction& G, std::span<const Position> gamma);

// Single-point test profile with values in (-1, 0], supported in a box.
// The sign and range keep the product statistic below bounded by one.
class ThetaFunction {
 public:
  using Profile = std::function<double(const Position&)>;

  ThetaFunction(Profile profile, Box support, int dim, int quad_nodes = 512);

  double operator()(const Position& x) const;
  const Box& support() const { return support_; }
  int dim() const { return dim_; }

  // Signed integral of theta over its support (midpoint rule, cached).
  double integral() const { return integral_; }
  double l1_norm() const { return -integral_; }

 private:
  Profile profile_;
  Box support_;
  int dim_;
  double integral_;
};

// Indicator-of-cardinality product statistic: product of theta over eta when
// |eta| = n, else zero.
double e_n_eval(const ThetaFunction& theta, int n, std::span<const Position> eta);

// Product statistic over a full configuration: product of (1 + theta(x)).
double f_theta_eval(const ThetaFunction& theta, std::span<const Position> gamma);

struct QuadratureGrid {
  int nodes_per_axis = 32;
  std::size_t max_evals = std::size_t(1) << 26;
};

// Integral of G against the independent-scatter reference measure with
// intensity `weight`: G(empty) + sum_n weight^n / n! times the n-fold
// tensor-quadrature integral of the n-point component over the support.
double lebesgue_poisson_integral(const FiniteFunction& G, double weight,
                                 const QuadratureGrid& quad);

// Action of the lifted evolution operator on G at a finite set eta, with
// spatial integrals discretized on the shared midpoint grid over G's
// support.  Four terms: immigration pressure integrated against
// G(eta + x), kernel transport of one point, total emigration rate times
// -G(eta), and the pair-interaction deletion term.
double lhat_apply(const FiniteFunction& G, std::span<const Position> eta,
                  const ModelParams& params, const QuadratureGrid& quad);

// (generator applied to the transform of G) at gamma, same grid.
double generator_on_k_transform(const FiniteFunction& G,
                                std::span<const Position> gamma,
                                const ModelParams& params,
                                const QuadratureGrid& quad);

// (transform of the lifted action) at gamma, same grid.
double k_of_lhat(const FiniteFunction& G, std::span<const Position> gamma,
                 const ModelParams& params, const QuadratureGrid& quad);

// Absolute difference between the two routes; pure floating-point noise
// when the discretization is shared, since the identity is exact term by
// term under any fixed quadrature.
double check_duality(const FiniteFunction& G, std::span<const Position> gamma,
                     const ModelParams& params, const QuadratureGrid& quad);

// Exact integer identity tying the n-th power of a box count to binomial
// subset counts weighted by Stirling numbers and falling factorials.
struct MomentIdentity {
  long long lhs = 0;  // (count in box)^n
  long long rhs = 0;  // sum_l l! S(n, l) C(count, l)
};

MomentIdentity moment_identity_check(int n, const Box& box,
                                     std::span<const Position> gamma, int dim);

}  // namespace migsim
