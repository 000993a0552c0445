#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "migsim/kernel.hpp"
#include "migsim/rng.hpp"

using namespace migsim;

namespace {

// Independent mass oracle: fine composite-Simpson quadrature of the radial
// profile over [0, cutoff] with the d-dimensional surface weight.
double quadrature_mass(const Kernel& k, int panels = 400000) {
  const double R = k.cutoff_radius();
  REQUIRE(std::isfinite(R));
  if (R == 0.0) return 0.0;
  const double h = R / panels;
  auto weighted = [&](double r) {
    const double v = k.value(std::min(r, R));
    return k.dimension() == 1 ? 2.0 * v : 2.0 * std::numbers::pi * r * v;
  };
  double acc = weighted(0.0) + weighted(R);
  for (int i = 1; i < panels; ++i) {
    acc += weighted(i * h) * (i % 2 ? 4.0 : 2.0);
  }
  return acc * h / 3.0;
}

double full_mass(const Kernel& k) {
  // Untruncated closed forms, independent of the library's bookkeeping.
  const double a = k.amplitude(), s = k.scale();
  switch (k.family()) {
    case KernelFamily::Tophat:
      return k.dimension() == 1 ? 2.0 * a * s
                                : a * std::numbers::pi * s * s;
    case KernelFamily::Gaussian:
      return k.dimension() == 1 ? a * s * std::sqrt(2.0 * std::numbers::pi)
                                : a * 2.0 * std::numbers::pi * s * s;
    case KernelFamily::Exponential:
      return k.dimension() == 1 ? 2.0 * a * s
                                : a * 2.0 * std::numbers::pi * s * s;
    default:
      REQUIRE(false);
      return 0.0;
  }
}

}  // namespace

TEST_CASE("tophat mass and value are exact") {
  for (int dim : {1, 2}) {
    const Kernel k = Kernel::tophat(0.7, 1.3, dim);
    CHECK(k.cutoff_radius() == doctest::Approx(1.3));
    CHECK(k.truncated_mass() == 0.0);
    CHECK(k.value(0.0) == 0.7);
    CHECK(k.value(1.2999) == 0.7);
    CHECK(k.value(1.3001) == 0.0);
    const double expect = dim == 1 ? 2.0 * 0.7 * 1.3
                                   : 0.7 * std::numbers::pi * 1.3 * 1.3;
    CHECK(k.l1_norm() == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("smooth kernel masses agree with the quadrature oracle") {
  for (int dim : {1, 2}) {
    for (int fam : {0, 1}) {
      const Kernel k = fam == 0 ? Kernel::gaussian(0.9, 0.4, dim)
                                : Kernel::exponential(1.1, 0.3, dim);
      const double oracle = quadrature_mass(k);
      CHECK(k.l1_norm() == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("cutoff leaves at most eps_cut of the full mass outside") {
  for (int dim : {1, 2}) {
    for (double eps : {1e-3, 1e-6, 1e-9}) {
      for (int fam : {0, 1}) {
        const Kernel k = fam == 0 ? Kernel::gaussian(1.0, 0.5, dim, eps)
                                  : Kernel::exponential(1.0, 0.5, dim, eps);
        const double full = full_mass(k);
        const double kept = quadrature_mass(k);
        // The quadrature oracle resolves the tail to ~1e-13 of the full
        // mass, so the bands are relative to eps, not machine-tight.
        const double tail_fraction = (full - kept) / full;
        CHECK(tail_fraction <= eps * (1.0 + 1e-3));
        // The cutoff sits at the tail-mass level, not far beyond it.
        CHECK(tail_fraction >= eps * (1.0 - 1e-3));
        CHECK(k.truncated_mass() == doctest::Approx(full - kept).epsilon(1e-2));
        CHECK(k.l1_norm() == doctest::Approx(kept).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("cutoff radius shrinks as eps_cut grows") {
  for (int dim : {1, 2}) {
    const Kernel loose = Kernel::gaussian(1.0, 0.5, dim, 1e-3);
    const Kernel tight = Kernel::gaussian(1.0, 0.5, dim, 1e-9);
    CHECK(loose.cutoff_radius() < tight.cutoff_radius());
    const Kernel el = Kernel::exponential(1.0, 0.5, dim, 1e-3);
    const Kernel et = Kernel::exponential(1.0, 0.5, dim, 1e-9);
    CHECK(el.cutoff_radius() < et.cutoff_radius());
  }
}

TEST_CASE("eps_cut = 0 keeps the full support") {
  const Kernel k = Kernel::gaussian(1.0, 0.5, 2, 0.0);
  CHECK(std::isinf(k.cutoff_radius()));
  CHECK(k.truncated_mass() == 0.0);
  CHECK(k.value(3.0) == doctest::Approx(std::exp(-9.0 / 0.5)).epsilon(1e-12));
  // Far out the profile underflows to zero even though nothing is cut.
  CHECK(k.value(100.0) == 0.0);
  const double full = full_mass(k);
  CHECK(k.l1_norm() == doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("zero amplitude collapses to the zero kernel") {
  const Kernel k = Kernel::gaussian(0.0, 0.5, 2);
  CHECK(k.is_zero());
  CHECK(k.cutoff_radius() == 0.0);
  CHECK(k.value(0.0) == 0.0);
}

TEST_CASE("constant family has sup but no mass") {
  const Kernel k = Kernel::constant(0.4, 2);
  CHECK(k.sup_norm() == 0.4);
  CHECK(k.value(1e9) == 0.4);
  CHECK(std::isinf(k.cutoff_radius()));
  CHECK_THROWS_AS((void)k.l1_norm(), std::invalid_argument);
}

TEST_CASE("kernel argument validation") {
  CHECK_THROWS_AS(Kernel::tophat(-1.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::tophat(1.0, 0.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::gaussian(1.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::gaussian(1.0, 1.0, 2, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::gaussian(1.0, 1.0, 2, 0.5), std::invalid_argument);
  const Kernel k = Kernel::tophat(1.0, 1.0, 2);
  CHECK_THROWS_AS((void)k.value(-0.1), std::invalid_argument);
}

TEST_CASE("tophat radial sampling inverts the exact CDF") {
  // d = 2: density proportional to r, so F^{-1}(u) = R sqrt(u).
  const Kernel k2 = Kernel::tophat(1.0, 2.0, 2);
  for (double u : {0.0, 0.1, 0.25, 0.5, 0.9, 0.999, 1.0}) {
    CHECK(k2.sample_radius(u) ==
          doctest::Approx(2.0 * std::sqrt(u)).epsilon(1e-5));
  }
  // d = 1: flat density, F^{-1}(u) = R u.
  const Kernel k1 = Kernel::tophat(1.0, 2.0, 1);
  for (double u : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(k1.sample_radius(u) == doctest::Approx(2.0 * u).epsilon(1e-5));
  }
}

TEST_CASE("smooth kernel sampling passes a KS test against the quadrature CDF") {
  auto ks_check = [](const Kernel& k) {
    const double R = k.cutoff_radius();
    // CDF oracle on a fine grid by trapezoid accumulation.
    const int m = 20000;
    std::vector<double> cdf(m + 1, 0.0);
    auto w = [&](double r) {
      return k.dimension() == 1 ? k.value(r) : r * k.value(r);
    };
    for (int i = 1; i <= m; ++i) {
      const double r0 = R * (i - 1) / m, r1 = R * i / m;
      cdf[i] = cdf[i - 1] + 0.5 * (w(r0) + w(r1)) * (r1 - r0);
    }
    for (auto& c : cdf) c /= cdf[m];
    auto cdf_at = [&](double r) {
      const double t = std::clamp(r / R, 0.0, 1.0) * m;
      const int i = std::min(static_cast<int>(t), m - 1);
      return cdf[i] + (cdf[i + 1] - cdf[i]) * (t - i);
    };

    Rng rng(777);
    const int n = 50000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = k.sample_radius(rng.uniform());
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      const double F = cdf_at(xs[i]);
      ks = std::max(ks, std::abs(F - double(i) / n));
      ks = std::max(ks, std::abs(F - double(i + 1) / n));
    }
    // 0.1% critical value 1.95/sqrt(n) plus slack for the sampler's own
    // 4096-interval inverse table.
    CHECK(ks < 2.2 / std::sqrt(double(n)));
  };
  ks_check(Kernel::gaussian(1.0, 0.5, 2));
  ks_check(Kernel::exponential(1.0, 0.3, 1));
  ks_check(Kernel::exponential(2.0, 0.4, 2));
}

TEST_CASE("background profiles integrate to level times volume") {
  const TorusWindow w{6.0, 2};
  const Background flat = Background::constant(0.7);
  CHECK(flat.value({1.0, 2.0}, w) == 0.7);
  CHECK(flat.integral(w) == doctest::Approx(0.7 * 36.0));
  CHECK(flat.is_constant());

  const Background cos2 = Background::cosine(1.0, 0.4, 2);
  CHECK_FALSE(cos2.is_constant());
  CHECK(cos2.sup() == doctest::Approx(1.4));
  CHECK(cos2.inf() == doctest::Approx(0.6));
  CHECK(cos2.integral(w) == doctest::Approx(1.0 * 36.0));
  // Check the profile against the formula and its quadrature mean.
  const int m = 100000;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x = 6.0 * (i + 0.5) / m;
    const double v = cos2.value({x, 3.0}, w);
    const double expect =
        1.0 + 0.4 * std::cos(2.0 * std::numbers::pi * 2.0 * x / 6.0);
    REQUIRE(v == doctest::Approx(expect).epsilon(1e-12));
    acc += v;
  }
  CHECK(acc / m == doctest::Approx(1.0).epsilon(1e-9));

  CHECK_THROWS_AS(Background::cosine(1.0, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(Background::cosine(-0.1, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Background::cosine(1.0, 0.5, 0), std::invalid_argument);
}

TEST_CASE("competition classification covers the regime catalogue") {
  // Wide competition over narrow attraction: long range.
  const auto longc = classify_competition(Kernel::gaussian(1.0, 0.3, 2),
                                          Kernel::gaussian(0.5, 1.0, 2));
  CHECK(longc.regime == CompetitionRegime::Long);
  CHECK(longc.theta > 0.0);

  // Swapped reach: attraction out-ranges competition.
  const auto shortc = classify_competition(Kernel::gaussian(0.5, 1.0, 2),
                                           Kernel::gaussian(1.0, 0.3, 2));
  CHECK(shortc.regime == CompetitionRegime::Short);

  // No competition at all is the extreme short case.
  const auto none = classify_competition(Kernel::tophat(1.0, 0.5, 2),
                                         Kernel::tophat(0.0, 1.0, 2));
  CHECK(none.regime == CompetitionRegime::Short);

  // No attraction: vacuously long with infinite margin.
  const auto noattr = classify_competition(Kernel::tophat(0.0, 1.0, 2),
                                           Kernel::gaussian(1.0, 0.5, 2));
  CHECK(noattr.regime == CompetitionRegime::Long);
  CHECK(std::isinf(noattr.theta));

  // Same-shape kernels: the ratio is flat, theta equals the amplitude ratio.
  const auto same = classify_competition(Kernel::gaussian(1.0, 0.5, 2),
                                         Kernel::gaussian(0.25, 0.5, 2));
  CHECK(same.regime == CompetitionRegime::Long);
  CHECK(same.theta == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(classify_competition(Kernel::constant(1.0, 2),
                                       Kernel::gaussian(1.0, 0.5, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify_competition(Kernel::gaussian(1.0, 0.5, 1),
                                       Kernel::gaussian(1.0, 0.5, 2)),
                  std::invalid_argument);
}

TEST_CASE("theta certificate justifies the long-range domination bound") {
  // For the classified pair, a_minus >= theta * a_plus must hold on a dense
  // independent radius grid (not just the classifier's probes).
  const Kernel ap = Kernel::gaussian(1.0, 0.3, 2);
  const Kernel am = Kernel::gaussian(0.5, 1.0, 2);
  const auto cls = classify_competition(ap, am);
  REQUIRE(cls.regime == CompetitionRegime::Long);
  for (int i = 0; i <= 5000; ++i) {
    const double r = ap.cutoff_radius() * i / 5000.0;
    CHECK(am.value(r) >= cls.theta * ap.value(r) * (1.0 - 1e-9));
  }
}
