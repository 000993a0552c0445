#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "migsim/dynamics.hpp"
#include "migsim/geometry.hpp"

namespace migsim {

// All replicate states observed at one snapshot time.
struct SnapshotEnsemble {
  TorusWindow window;
  double time = 0.0;
  std::vector<std::vector<Position>> replicates;
};

// Extracts the ensemble at snapshot index `snap` from a batch of replicate
// records; every record must carry that snapshot at the same time.
SnapshotEnsemble ensemble_at(std::span<const ReplicateRecord> records,
                             std::size_t snap, const TorusWindow& window);

// Per-replicate point counts inside a probe box.
std::vector<std::size_t> box_counts(const SnapshotEnsemble& ens, const Box& box);

struct CountHistogram {
  std::vector<std::size_t> freq;  // freq[n] = replicates with count n
  std::size_t replicates = 0;
  double mean = 0.0;
};

CountHistogram count_law(const SnapshotEnsemble& ens, const Box& box);

struct Estimate {
  double value = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct BootstrapOptions {
  int resamples = 1000;
  double confidence = 0.95;
  std::uint64_t seed = 0x5eedb001u;
};

// Empirical n-th raw moment of the box count with a percentile-bootstrap
// confidence interval.  Order is capped at 8.
Estimate empirical_moment(const SnapshotEnsemble& ens, const Box& box,
                          int order, const BootstrapOptions& opts = {});

// Variance-to-mean ratio of the box count; nullopt when the mean is zero.
std::optional<Estimate> dispersion_index(const SnapshotEnsemble& ens,
                                         const Box& box,
                                         const BootstrapOptions& opts = {});

struct PairCorrelationBin {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double r_mid = 0.0;
  double g = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Isotropic pair correlation over the whole torus: observed unordered pair
// counts per distance shell against the independent-scatter expectation at
// the fitted intensity.  Shell measures are exact on the torus, which is
// why edges beyond half the side are rejected.
std::vector<PairCorrelationBin> pair_correlation(
    const SnapshotEnsemble& ens, std::span<const double> edges,
    const BootstrapOptions& opts = {});

// Upper-tail p-value for a chi-square statistic on prebuilt bins.
double chi_square_pvalue(double chi2, int dof);

// Goodness of fit of observed counts against the Poisson law of known mass;
// adjacent bins are pooled until every expected count reaches min_expected.
// Degrees of freedom: pooled bins minus one (no fitted parameter).
double poisson_count_gof_pvalue(const CountHistogram& hist, double mass,
                                double min_expected = 5.0);

struct CertificateRow {
  int order = 0;
  double pmf_hat = 0.0;
  double pmf_lo = 0.0;     // one-sided lower confidence limit
  double pmf_bound = 0.0;  // envelope at the fitted benchmark
  bool pmf_violation = false;
  double moment_hat = 0.0;
  double moment_lo = 0.0;
  double moment_ref = 0.0;  // Poisson moment at the fitted benchmark
  bool moment_violation = false;
};

// Statistical certificate against the independent-scatter benchmark fitted
// by intensity.  Every test is one-sided (only exceeding the envelope can
// fail it) at a Bonferroni-split level.  PASS means "no violation was
// detectable at this sample size", not a proof; the note says so.
struct CertificateReport {
  std::size_t replicates = 0;
  double box_volume = 0.0;
  double kappa_hat = 0.0;
  double benchmark_mass = 0.0;
  int n_max = 0;
  double confidence = 0.0;
  int tests = 0;
  double alpha_each = 0.0;
  std::vector<CertificateRow> rows;
  bool dispersion_defined = false;
  double di_hat = 0.0;
  double di_lo = 0.0;
  bool di_violation = false;
  bool pass = false;
  std::string note;
};

CertificateReport subpoisson_certificate(const SnapshotEnsemble& ens,
                                         const Box& box, int n_max,
                                         double confidence,
                                         const BootstrapOptions& opts = {});

}  // namespace migsim
