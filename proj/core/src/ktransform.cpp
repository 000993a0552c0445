#include "migsim/ktransform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "migsim/combinatorics.hpp"

namespace migsim {

namespace {

struct QuadNode {
  Position x;
  double w;
};

// Midpoint tensor grid over a box.
std::vector<QuadNode> make_nodes(const Box& box, int dim,
                                 const QuadratureGrid& quad) {
  const int m = quad.nodes_per_axis;
  if (m < 1) throw std::invalid_argument("quadrature: need at least one node");
  std::vector<QuadNode> nodes;
  if (dim == 1) {
    const double h = (box.hi[0] - box.lo[0]) / m;
    nodes.reserve(m);
    for (int i = 0; i < m; ++i) {
      nodes.push_back({Position{box.lo[0] + (i + 0.5) * h, 0.0}, h});
    }
  } else {
    const double h0 = (box.hi[0] - box.lo[0]) / m;
    const double h1 = (box.hi[1] - box.lo[1]) / m;
    nodes.reserve(std::size_t(m) * m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        nodes.push_back({Position{box.lo[0] + (i + 0.5) * h0,
                                  box.lo[1] + (j + 0.5) * h1},
                         h0 * h1});
      }
    }
  }
  return nodes;
}

double pair_rate(const Kernel& k, const Position& a, const Position& b,
                 const TorusWindow& w) {
  return k.is_zero() ? 0.0 : k.value(w.distance(a, b));
}

}  // namespace

FiniteFunction::FiniteFunction(int dim, int max_points, Box support,
                               double bound, std::vector<Component> components)
    : dim_(dim),
      max_points_(max_points),
      support_(support),
      bound_(bound),
      components_(std::move(components)) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("finite function: dimension must be 1 or 2");
  }
  if (max_points_ < 0) {
    throw std::invalid_argument("finite function: cardinality cap must be >= 0");
  }
  if (components_.size() != static_cast<std::size_t>(max_points_) + 1) {
    throw std::invalid_argument(
        "finite function: need one component per cardinality 0..max_points");
  }
}

double FiniteFunction::operator()(std::span<const Position> eta) const {
  if (eta.size() > static_cast<std::size_t>(max_points_)) return 0.0;
  for (const Position& x : eta) {
    if (!support_.contains(x, dim_)) return 0.0;
  }
  return components_[eta.size()](eta);
}

double k_transform(const FiniteFunction& G, std::span<const Position> gamma) {
  if (gamma.size() > 24) {
    throw std::invalid_argument("k_transform: configuration too large (max 24)");
  }
  // Points outside the support kill every subset containing them.
  std::vector<Position> live;
  for (const Position& x : gamma) {
    if (G.support().contains(x, G.dim())) live.push_back(x);
  }
  const int cap = std::min<int>(G.max_points(), static_cast<int>(live.size()));

  double sum = G({});  // empty set
  std::vector<Position> subset;
  subset.reserve(cap);
  // Depth-first combination enumeration by size.
  auto recurse = [&](auto&& self, std::size_t start, int remaining) -> void {
    if (remaining == 0) {
      sum += G(subset);
      return;
    }
    for (std::size_t i = start; i + remaining <= live.size(); ++i) {
      subset.push_back(live[i]);
      self(self, i + 1, remaining - 1);
      subset.pop_back();
    }
  };
  for (int n = 1; n <= cap; ++n) {
    recurse(recurse, 0, n);
  }
  return sum;
}

ThetaFunction::ThetaFunction(Profile profile, Box support, int dim,
                             int quad_nodes)
    : profile_(std::move(profile)), support_(support), dim_(dim) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("theta: dimension must be 1 or 2");
  }
  if (quad_nodes < 8) {
    throw std::invalid_argument("theta: need at least 8 quadrature nodes");
  }
  // Midpoint integral; the same sweep validates the value range.
  QuadratureGrid q;
  q.nodes_per_axis = quad_nodes;
  double acc = 0.0;
  const auto nodes = make_nodes(support_, dim_, q);
  for (const auto& n : nodes) {
    const double v = profile_(n.x);
    if (!(v <= 0.0) || v <= -1.0) {
      throw std::invalid_argument("theta: values must lie in (-1, 0]");
    }
    acc += v * n.w;
  }
  integral_ = acc;
}

double ThetaFunction::operator()(const Position& x) const {
  if (!support_.contains(x, dim_)) return 0.0;
  return profile_(x);
}

double e_n_eval(const ThetaFunction& theta, int n,
                std::span<const Position> eta) {
  if (n < 0) throw std::invalid_argument("e_n: order must be nonnegative");
  if (eta.size() != static_cast<std::size_t>(n)) return 0.0;
  double prod = 1.0;
  for (const Position& x : eta) prod *= theta(x);
  return prod;
}

double f_theta_eval(const ThetaFunction& theta,
                    std::span<const Position> gamma) {
  double prod = 1.0;
  for (const Position& x : gamma) prod *= 1.0 + theta(x);
  return prod;
}

double lebesgue_poisson_integral(const FiniteFunction& G, double weight,
                                 const QuadratureGrid& quad) {
  if (weight < 0.0) {
    throw std::invalid_argument("lp integral: weight must be nonnegative");
  }
  const auto nodes = make_nodes(G.support(), G.dim(), quad);
  const std::size_t m = nodes.size();

  double total = G({});
  double factorial = 1.0;
  std::vector<Position> tuple;
  std::vector<std::size_t> idx;
  for (int n = 1; n <= G.max_points(); ++n) {
    factorial *= n;
    double evals = std::pow(static_cast<double>(m), n);
    if (evals > static_cast<double>(quad.max_evals)) {
      throw std::invalid_argument("lp integral: quadrature budget exceeded");
    }
    // Odometer over the n-fold tensor grid.
    idx.assign(n, 0);
    tuple.assign(n, Position{0.0, 0.0});
    double level = 0.0;
    for (;;) {
      double w = 1.0;
      for (int k = 0; k < n; ++k) {
        tuple[k] = nodes[idx[k]].x;
        w *= nodes[idx[k]].w;
      }
      level += w * G(tuple);
      int k = n - 1;
      for (; k >= 0; --k) {
        if (++idx[k] < m) break;
        idx[k] = 0;
      }
      if (k < 0) break;
    }
    total += std::pow(weight, n) / factorial * level;
  }
  return total;
}

double lhat_apply(const FiniteFunction& G, std::span<const Position> eta,
                  const ModelParams& params, const QuadratureGrid& quad) {
  const TorusWindow& w = params.window;
  const auto nodes = make_nodes(G.support(), G.dim(), quad);

  std::vector<Position> grown(eta.begin(), eta.end());
  grown.push_back(Position{0.0, 0.0});
  std::vector<Position> swapped(eta.begin(), eta.end());

  double a1 = 0.0;  // immigration pressure against G(eta + x)
  for (const auto& q : nodes) {
    double pressure = params.b_plus.value(q.x, w);
    for (const Position& y : eta) pressure += pair_rate(params.a_plus, q.x, y, w);
    grown.back() = q.x;
    a1 += q.w * pressure * G(grown);
  }

  double a2 = 0.0;  // transport: one point of eta replaced by a grid point
  for (std::size_t i = 0; i < eta.size(); ++i) {
    for (const auto& q : nodes) {
      const double rate = pair_rate(params.a_plus, eta[i], q.x, w);
      if (rate == 0.0) continue;
      swapped[i] = q.x;
      a2 += q.w * rate * G(swapped);
    }
    swapped[i] = eta[i];
  }

  double total_emigration = 0.0;
  double a4 = 0.0;  // pair-interaction deletion
  std::vector<Position> reduced(eta.size() > 0 ? eta.size() - 1 : 0,
                                Position{0.0, 0.0});
  for (std::size_t i = 0; i < eta.size(); ++i) {
    double rate = params.b_minus.value(eta[i], w);
    double pair_sum = 0.0;
    for (std::size_t j = 0; j < eta.size(); ++j) {
      if (j == i) continue;
      pair_sum += pair_rate(params.a_minus, eta[i], eta[j], w);
    }
    rate += pair_sum;
    total_emigration += rate;

    if (pair_sum != 0.0) {
      std::size_t k = 0;
      for (std::size_t j = 0; j < eta.size(); ++j) {
        if (j != i) reduced[k++] = eta[j];
      }
      a4 -= pair_sum * G(reduced);
    }
  }
  const double a3 = -total_emigration * G(eta);

  return a1 + a2 + a3 + a4;
}

double generator_on_k_transform(const FiniteFunction& G,
                                std::span<const Position> gamma,
                                const ModelParams& params,
                                const QuadratureGrid& quad) {
  const TorusWindow& w = params.window;
  const auto nodes = make_nodes(G.support(), G.dim(), quad);
  const double kg = k_transform(G, gamma);

  std::vector<Position> grown(gamma.begin(), gamma.end());
  grown.push_back(Position{0.0, 0.0});

  double birth_part = 0.0;
  for (const auto& q : nodes) {
    double pressure = params.b_plus.value(q.x, w);
    for (const Position& y : gamma) pressure += pair_rate(params.a_plus, q.x, y, w);
    grown.back() = q.x;
    birth_part += q.w * pressure * (k_transform(G, grown) - kg);
  }

  double death_part = 0.0;
  std::vector<Position> reduced(gamma.size() > 0 ? gamma.size() - 1 : 0,
                                Position{0.0, 0.0});
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    double rate = params.b_minus.value(gamma[i], w);
    std::size_t k = 0;
    for (std::size_t j = 0; j < gamma.size(); ++j) {
      if (j == i) continue;
      rate += pair_rate(params.a_minus, gamma[i], gamma[j], w);
      reduced[k++] = gamma[j];
    }
    death_part += rate * (kg - k_transform(G, reduced));
  }
  return birth_part - death_part;
}

double k_of_lhat(const FiniteFunction& G, std::span<const Position> gamma,
                 const ModelParams& params, const QuadratureGrid& quad) {
  if (gamma.size() > 20) {
    throw std::invalid_argument("k_of_lhat: configuration too large (max 20)");
  }
  const std::size_t n = gamma.size();
  double sum = 0.0;
  std::vector<Position> subset;
  subset.reserve(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint64_t(1) << i)) subset.push_back(gamma[i]);
    }
    sum += lhat_apply(G, subset, params, quad);
  }
  return sum;
}

double check_duality(const FiniteFunction& G, std::span<const Position> gamma,
                     const ModelParams& params, const QuadratureGrid& quad) {
  const double lhs = generator_on_k_transform(G, gamma, params, quad);
  const double rhs = k_of_lhat(G, gamma, params, quad);
  return std::fabs(lhs - rhs);
}

MomentIdentity moment_identity_check(int n, const Box& box,
                                     std::span<const Position> gamma, int dim) {
  if (n < 1 || n > StirlingTable::kDefaultMaxN) {
    throw std::invalid_argument("moment identity: order out of range");
  }
  long long count = 0;
  for (const Position& x : gamma) {
    if (box.contains(x, dim)) ++count;
  }

  BigInt lhs = 1;
  for (int k = 0; k < n; ++k) lhs *= count;

  BigInt rhs = 0;
  BigInt falling = 1;  // l! C(count, l) = count (count-1) ... (count-l+1)
  for (int l = 1; l <= n; ++l) {
    falling *= (count - (l - 1));
    if (falling == 0) break;
    rhs += stirling2(n, l) * falling;
  }

  const BigInt limit = BigInt(std::numeric_limits<long long>::max());
  if (lhs > limit || rhs > limit) {
    throw std::overflow_error("moment identity: value exceeds 64-bit range");
  }
  return {lhs.convert_to<long long>(), rhs.convert_to<long long>()};
}

}  // namespace migsim
