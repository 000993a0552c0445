#include <doctest.h>

#include <cmath>
#include <vector>

#include "migsim/errors.hpp"
#include "migsim/estimators.hpp"
#include "migsim/rng.hpp"

using namespace migsim;

namespace {

Position uniform_point(Rng& rng, const TorusWindow& w) {
  Position x{0.0, 0.0};
  for (int k = 0; k < w.dim; ++k) x[k] = rng.uniform(0.0, w.side);
  return x;
}

// Independent scatter: Poisson count, uniform positions.
SnapshotEnsemble csr_ensemble(double kappa, const TorusWindow& w, int reps,
                              std::uint64_t seed) {
  SnapshotEnsemble ens;
  ens.window = w;
  ens.time = 0.0;
  Rng rng(seed);
  for (int r = 0; r < reps; ++r) {
    const std::uint64_t n = rng.poisson(kappa * w.volume());
    std::vector<Position> pts;
    pts.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) pts.push_back(uniform_point(rng, w));
    ens.replicates.push_back(std::move(pts));
  }
  return ens;
}

// Deterministic total count: box counts are binomial, hence under-dispersed.
SnapshotEnsemble fixed_count_ensemble(std::size_t n, const TorusWindow& w,
                                      int reps, std::uint64_t seed) {
  SnapshotEnsemble ens;
  ens.window = w;
  ens.time = 0.0;
  Rng rng(seed);
  for (int r = 0; r < reps; ++r) {
    std::vector<Position> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pts.push_back(uniform_point(rng, w));
    ens.replicates.push_back(std::move(pts));
  }
  return ens;
}

// Poisson cluster process: Poisson parents, Poisson offspring scattered by a
// Gaussian around each parent.  Over-dispersed at every scale above the
// cluster size.
SnapshotEnsemble cluster_ensemble(double parent_kappa, double mean_offspring,
                                  double sigma, const TorusWindow& w, int reps,
                                  std::uint64_t seed) {
  SnapshotEnsemble ens;
  ens.window = w;
  ens.time = 0.0;
  Rng rng(seed);
  for (int r = 0; r < reps; ++r) {
    std::vector<Position> pts;
    const std::uint64_t parents = rng.poisson(parent_kappa * w.volume());
    for (std::uint64_t p = 0; p < parents; ++p) {
      const Position c = uniform_point(rng, w);
      const std::uint64_t kids = rng.poisson(mean_offspring);
      for (std::uint64_t k = 0; k < kids; ++k) {
        // Box-Muller pair for the displacement.
        const double u1 = rng.uniform(), u2 = rng.uniform();
        const double rad = sigma * std::sqrt(-2.0 * std::log(1.0 - u1));
        Position x = c;
        x[0] += rad * std::cos(6.283185307179586 * u2);
        if (w.dim == 2) x[1] += rad * std::sin(6.283185307179586 * u2);
        pts.push_back(w.wrap(x));
      }
    }
    ens.replicates.push_back(std::move(pts));
  }
  return ens;
}

SnapshotEnsemble from_counts(std::span<const std::size_t> counts,
                             const TorusWindow& w) {
  // Puts `count` points at distinct spots inside [0,1)^d so any box
  // containing the unit square sees exactly the requested counts.
  SnapshotEnsemble ens;
  ens.window = w;
  ens.time = 0.0;
  for (std::size_t c : counts) {
    std::vector<Position> pts;
    for (std::size_t i = 0; i < c; ++i) {
      pts.push_back(Position{0.05 + 0.9 * static_cast<double>(i) / (c + 1), 0.5});
    }
    ens.replicates.push_back(std::move(pts));
  }
  return ens;
}

}  // namespace

TEST_CASE("ensemble extraction checks snapshot layout") {
  const TorusWindow w{10.0, 2};
  ReplicateRecord a, b;
  a.snapshots = {Snapshot{1.0, {{0, Position{1.0, 1.0}}}},
                 Snapshot{2.0, {{1, Position{2.0, 2.0}}, {2, Position{3.0, 3.0}}}}};
  b.snapshots = {Snapshot{1.0, {}},
                 Snapshot{2.0, {{7, Position{4.0, 4.0}}}}};
  const std::vector<ReplicateRecord> recs{a, b};

  const auto ens = ensemble_at(recs, 1, w);
  CHECK(ens.time == 2.0);
  REQUIRE(ens.replicates.size() == 2);
  CHECK(ens.replicates[0].size() == 2);
  CHECK(ens.replicates[1].size() == 1);
  CHECK(ens.replicates[1][0][0] == 4.0);

  CHECK_THROWS_AS(ensemble_at(recs, 2, w), std::invalid_argument);
  CHECK_THROWS_AS(ensemble_at(std::vector<ReplicateRecord>{}, 0, w),
                  std::invalid_argument);

  ReplicateRecord c = b;
  c.snapshots[1].time = 2.5;
  const std::vector<ReplicateRecord> bad{a, c};
  CHECK_THROWS_AS(ensemble_at(bad, 1, w), std::invalid_argument);
}

TEST_CASE("box counts and the count law on handcrafted points") {
  const TorusWindow w{10.0, 2};
  SnapshotEnsemble ens;
  ens.window = w;
  ens.replicates = {
      {{1.5, 1.5}, {2.9, 2.9}, {5.0, 5.0}},  // two inside
      {{0.0, 0.0}},                          // none inside
      {{1.0, 1.0}, {2.0, 2.0}, {2.5, 1.2}, {9.0, 9.0}}};  // three inside

  const Box box{Position{1.0, 1.0}, Position{3.0, 3.0}};
  const auto counts = box_counts(ens, box);
  REQUIRE(counts.size() == 3);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 0);
  CHECK(counts[2] == 3);

  const auto law = count_law(ens, box);
  CHECK(law.replicates == 3);
  REQUIRE(law.freq.size() == 4);
  CHECK(law.freq[0] == 1);
  CHECK(law.freq[1] == 0);
  CHECK(law.freq[2] == 1);
  CHECK(law.freq[3] == 1);
  CHECK(law.mean == doctest::Approx(5.0 / 3.0));

  const Box outside{Position{8.0, 8.0}, Position{11.0, 9.0}};
  CHECK_THROWS_AS(box_counts(ens, outside), std::invalid_argument);
}

TEST_CASE("empirical moments on fixed counts") {
  const TorusWindow w{10.0, 2};
  const std::vector<std::size_t> counts{3, 5};
  const auto ens = from_counts(counts, w);
  const Box box{Position{0.0, 0.0}, Position{1.0, 1.0}};

  const auto m1 = empirical_moment(ens, box, 1);
  CHECK(m1.value == doctest::Approx(4.0));
  CHECK(m1.ci_lo <= m1.value);
  CHECK(m1.ci_hi >= m1.value);
  const auto m2 = empirical_moment(ens, box, 2);
  CHECK(m2.value == doctest::Approx(17.0));

  CHECK_THROWS_AS(empirical_moment(ens, box, 0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_moment(ens, box, 9), std::invalid_argument);

  const auto single = from_counts(std::vector<std::size_t>{3}, w);
  CHECK_THROWS_AS(empirical_moment(single, box, 1), statistics_error);
}

TEST_CASE("dispersion index degenerate and analytic cases") {
  const TorusWindow w{10.0, 2};
  const Box box{Position{0.0, 0.0}, Position{1.0, 1.0}};

  const auto constant = from_counts(std::vector<std::size_t>{2, 2, 2, 2}, w);
  const auto di0 = dispersion_index(constant, box);
  REQUIRE(di0.has_value());
  CHECK(di0->value == doctest::Approx(0.0));

  const auto empty = from_counts(std::vector<std::size_t>{0, 0, 0}, w);
  CHECK(!dispersion_index(empty, box).has_value());

  const auto single = from_counts(std::vector<std::size_t>{3}, w);
  CHECK_THROWS_AS(dispersion_index(single, box), statistics_error);
}

TEST_CASE("dispersion index separates the three dispersion regimes") {
  const TorusWindow w{10.0, 2};
  const Box box{Position{2.0, 2.0}, Position{7.0, 7.0}};  // volume 25

  SUBCASE("independent scatter sits at one") {
    const auto ens = csr_ensemble(1.0, w, 500, 11);
    const auto di = dispersion_index(ens, box);
    REQUIRE(di.has_value());
    CHECK(di->value > 0.8);
    CHECK(di->value < 1.25);
    CHECK(di->ci_lo < 1.0);
    CHECK(di->ci_hi > 1.0);
  }

  SUBCASE("fixed total count is under-dispersed") {
    // Binomial thinning of a deterministic total: ratio 1 - 25/100 = 0.75.
    const auto ens = fixed_count_ensemble(100, w, 500, 12);
    const auto di = dispersion_index(ens, box);
    REQUIRE(di.has_value());
    CHECK(di->value > 0.6);
    CHECK(di->value < 0.9);
    CHECK(di->ci_hi < 1.0);
  }

  SUBCASE("clusters are over-dispersed") {
    const auto ens = cluster_ensemble(0.05, 8.0, 0.3, w, 400, 13);
    const auto di = dispersion_index(ens, box);
    REQUIRE(di.has_value());
    CHECK(di->value > 1.5);
    CHECK(di->ci_lo > 1.0);
  }
}

TEST_CASE("pair correlation normalization is exact on a handcrafted pattern") {
  // One deterministic pair per replicate, straddling the seam; checks the
  // wrap, the 1D shell measure, and the independent-scatter normalization
  // in a single closed form.
  const TorusWindow w{10.0, 1};
  SnapshotEnsemble ens;
  ens.window = w;
  ens.replicates = {{{0.1, 0.0}, {9.4, 0.0}}, {{3.0, 0.0}, {2.3, 0.0}}};

  const std::vector<double> edges{0.6, 0.8};
  const auto bins = pair_correlation(ens, edges);
  REQUIRE(bins.size() == 1);
  // kappa = 0.2, expected pairs per replicate in the shell:
  // 0.5 * kappa^2 * V * 2 * (0.8 - 0.6) = 0.08; observed 1.
  CHECK(bins[0].g == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(bins[0].r_mid == doctest::Approx(0.7));
}

TEST_CASE("pair correlation flags clustering and stays flat for scatter") {
  const TorusWindow w{10.0, 2};
  const std::vector<double> edges{0.0, 0.3, 1.0, 2.0, 3.0};

  const auto csr = csr_ensemble(1.0, w, 300, 21);
  const auto flat = pair_correlation(csr, edges);
  REQUIRE(flat.size() == 4);
  for (const auto& b : flat) {
    CHECK(b.g > 0.9);
    CHECK(b.g < 1.1);
    CHECK(b.ci_lo <= b.g);
    CHECK(b.ci_hi >= b.g);
  }

  const auto clustered = cluster_ensemble(0.05, 8.0, 0.3, w, 300, 22);
  const auto peaked = pair_correlation(clustered, edges);
  CHECK(peaked[0].g > 5.0);   // strong short-range excess
  CHECK(peaked[3].g > 0.8);   // and no structure past the cluster scale
  CHECK(peaked[3].g < 1.2);
}

TEST_CASE("pair correlation input validation") {
  const TorusWindow w{10.0, 2};
  const auto ens = csr_ensemble(0.5, w, 10, 31);

  CHECK_THROWS_AS(pair_correlation(ens, std::vector<double>{0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_correlation(ens, std::vector<double>{0.5, 0.4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_correlation(ens, std::vector<double>{-0.1, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pair_correlation(ens, std::vector<double>{0.0, 5.5}),
                  std::invalid_argument);

  SnapshotEnsemble one;
  one.window = w;
  one.replicates = {{{1.0, 1.0}}};
  CHECK_THROWS_AS(pair_correlation(one, std::vector<double>{0.0, 1.0}),
                  statistics_error);

  SnapshotEnsemble bare;
  bare.window = w;
  bare.replicates = {{}, {}};
  CHECK_THROWS_AS(pair_correlation(bare, std::vector<double>{0.0, 1.0}),
                  statistics_error);
}

TEST_CASE("chi-square tail probabilities match tabulated points") {
  CHECK(chi_square_pvalue(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_pvalue(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_pvalue(11.070, 5) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(chi_square_pvalue(6.635, 1) == doctest::Approx(0.01).epsilon(1e-3));
  CHECK(chi_square_pvalue(5.0, 3) > chi_square_pvalue(9.0, 3));
  CHECK_THROWS_AS(chi_square_pvalue(1.0, 0), std::invalid_argument);
}

TEST_CASE("count-law goodness of fit calibration and power") {
  const TorusWindow w{10.0, 2};
  const Box box{Position{2.0, 2.0}, Position{7.0, 7.0}};

  SUBCASE("p-values are roughly uniform under the null") {
    // Histograms drawn straight from the reference law; positions are not
    // needed for this part.
    Rng rng(41);
    const double mass = 5.0;
    double psum = 0.0;
    const int trials = 60;
    for (int t = 0; t < trials; ++t) {
      CountHistogram hist;
      hist.replicates = 400;
      for (int i = 0; i < 400; ++i) {
        const std::uint64_t n = rng.poisson(mass);
        if (hist.freq.size() <= n) hist.freq.resize(n + 1, 0);
        ++hist.freq[n];
      }
      psum += poisson_count_gof_pvalue(hist, mass);
    }
    const double pmean = psum / trials;
    CHECK(pmean > 0.3);
    CHECK(pmean < 0.7);
  }

  SUBCASE("clustered counts are rejected") {
    const auto ens = cluster_ensemble(0.05, 8.0, 0.3, w, 400, 42);
    const auto law = count_law(ens, box);
    CHECK(poisson_count_gof_pvalue(law, law.mean) < 0.01);
  }

  SUBCASE("scatter is not rejected") {
    const auto ens = csr_ensemble(1.0, w, 400, 43);
    const auto law = count_law(ens, box);
    CHECK(poisson_count_gof_pvalue(law, law.mean) > 0.01);
  }

  CHECK_THROWS_AS(poisson_count_gof_pvalue(CountHistogram{}, -1.0),
                  std::invalid_argument);
}

TEST_CASE("certificate verdicts across the dispersion regimes") {
  const TorusWindow w{10.0, 2};
  const Box box{Position{2.0, 2.0}, Position{6.0, 6.0}};  // volume 16

  SUBCASE("independent scatter passes") {
    const auto ens = csr_ensemble(0.5, w, 400, 51);
    const auto rep = subpoisson_certificate(ens, box, 6, 0.99);
    CHECK(rep.pass);
    CHECK(rep.replicates == 400);
    CHECK(rep.box_volume == doctest::Approx(16.0));
    CHECK(rep.kappa_hat == doctest::Approx(0.5).epsilon(0.1));
    CHECK(rep.n_max == 6);
    CHECK(rep.rows.size() == 6);
    CHECK(rep.tests == 13);
    CHECK(rep.alpha_each == doctest::Approx(0.01 / 13.0));
    CHECK(rep.dispersion_defined);
    CHECK(rep.di_hat > 0.8);
    CHECK(rep.di_hat < 1.25);
    CHECK(!rep.note.empty());
    for (const auto& row : rep.rows) {
      CHECK(row.pmf_hat >= 0.0);
      CHECK(row.pmf_bound > 0.0);
      CHECK(row.moment_ref > 0.0);
    }
  }

  SUBCASE("under-dispersed patterns pass with a low ratio") {
    // Half the window is probed, so the binomial ratio target is far from
    // one: 1 - 49/100.
    const auto ens = fixed_count_ensemble(100, w, 400, 52);
    const Box wide{Position{1.0, 1.0}, Position{8.0, 8.0}};
    const auto rep = subpoisson_certificate(ens, wide, 6, 0.99);
    CHECK(rep.pass);
    CHECK(rep.di_hat < 0.75);
  }

  SUBCASE("clusters are caught") {
    const auto ens = cluster_ensemble(0.05, 8.0, 0.3, w, 400, 53);
    const auto rep = subpoisson_certificate(ens, box, 6, 0.99);
    CHECK(!rep.pass);
    CHECK(rep.di_violation);
    CHECK(rep.di_lo > 1.0);
  }

  SUBCASE("argument validation") {
    const auto ens = csr_ensemble(0.5, w, 220, 54);
    CHECK_THROWS_AS(subpoisson_certificate(ens, box, 0, 0.99),
                    std::invalid_argument);
    CHECK_THROWS_AS(subpoisson_certificate(ens, box, 9, 0.99),
                    std::invalid_argument);
    CHECK_THROWS_AS(subpoisson_certificate(ens, box, 4, 1.0),
                    std::invalid_argument);
    const auto thin = csr_ensemble(0.5, w, 150, 55);
    CHECK_THROWS_AS(subpoisson_certificate(thin, box, 4, 0.99),
                    statistics_error);
  }
}
