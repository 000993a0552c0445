#include "migsim/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "migsim/combinatorics.hpp"
#include "migsim/errors.hpp"
#include "migsim/estimators.hpp"
#include "migsim/io.hpp"
#include "migsim/kinetic.hpp"
#include "migsim/ktransform.hpp"
#include "migsim/rng.hpp"

namespace migsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> effective_snapshots(const ExperimentConfig& cfg) {
  if (!cfg.snapshot_times.empty()) return cfg.snapshot_times;
  return {cfg.t_end};
}

// Density the mean-field references start from: explicit override, else the
// density implied by the initial condition.
double compare_rho0(const ExperimentConfig& cfg) {
  if (cfg.rho0 >= 0.0) return cfg.rho0;
  if (cfg.init == "poisson") return cfg.init_kappa;
  if (cfg.init == "points") {
    const TorusWindow w{cfg.side, cfg.dimension};
    const double n = static_cast<double>(cfg.init_points.size()) / cfg.dimension;
    return n / w.volume();
  }
  return 0.0;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe r;
  const std::size_t n = xs.size();
  if (n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(n);
  if (n < 2) return r;
  double ss = 0.0;
  for (double x : xs) {
    const double d = x - r.mean;
    ss += d * d;
  }
  r.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return r;
}

json fixed_point_json(const HomogeneousFixedPoint& fp) {
  json j;
  switch (fp.kind) {
    case HomogeneousFixedPoint::Kind::Value:
      j["kind"] = "value";
      j["density"] = fp.density;
      break;
    case HomogeneousFixedPoint::Kind::Extinct:
      j["kind"] = "extinct";
      j["density"] = 0.0;
      break;
    case HomogeneousFixedPoint::Kind::Unbounded:
      j["kind"] = "unbounded";
      break;
  }
  return j;
}

}  // namespace

std::vector<ReplicateRecord> run_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  const ModelParams params = cfg.model();
  const InitialCondition init = cfg.initial_condition();
  const ReplicateOptions opts = cfg.replicate_options();
  const std::vector<double> snaps = effective_snapshots(cfg);
  const std::uint64_t n = cfg.replicates;

  std::vector<ReplicateRecord> records(n);
  auto one = [&](std::uint64_t i) {
    ReplicateRecord rec = run_replicate(params, init, cfg.t_end,
                                        mix_seed(cfg.seed, i), snaps, opts);
    rec.replicate_id = i;
    records[i] = std::move(rec);
  };

  const int workers =
      std::max(1, std::min<int>(cfg.effective_workers(),
                                static_cast<int>(std::min<std::uint64_t>(
                                    n, std::numeric_limits<int>::max()))));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < n; ++i) one(i);
    return records;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto work = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      try {
        one(i);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lk(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
        stop.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return records;
}

CompareReport build_compare(const ExperimentConfig& cfg,
                            std::span<const ReplicateRecord> records) {
  const TorusWindow window{cfg.side, cfg.dimension};
  const double volume = window.volume();
  const std::vector<double> times = effective_snapshots(cfg);
  if (records.empty()) throw std::invalid_argument("compare: no replicates");

  CompareReport rep;
  rep.rho0 = compare_rho0(cfg);
  rep.replicates = records.size();

  const ModelParams params = cfg.model();
  const bool closed_form = params.a_plus.is_zero() && params.a_minus.is_zero() &&
                           params.b_minus.is_constant();
  rep.reference_kind = closed_form ? "closed_form_noninteracting" : "kinetic_grid";

  std::vector<double> meso(times.size(), 0.0);
  if (closed_form) {
    // The cosine mode integrates to zero over the window, so the ensemble
    // mean sees only the levels.
    for (std::size_t s = 0; s < times.size(); ++s) {
      meso[s] = noninteracting_mean_density(params.b_plus.level(),
                                            params.b_minus.level(), rep.rho0,
                                            times[s]);
    }
  } else {
    KineticSolver solver(params, cfg.nodes);
    const DensityField rho0 = DensityField::constant(
        cfg.dimension, cfg.nodes, cfg.side, rep.rho0);
    KineticOptions kopts;
    kopts.dt = cfg.dt;
    const double t_end = times.back();
    auto result = solver.integrate(rho0, t_end, times, kopts);
    for (std::size_t s = 0; s < times.size(); ++s) {
      meso[s] = result.snapshots[s].mean_value();
    }
  }

  rep.within_3se = true;
  std::vector<double> dens(records.size());
  for (std::size_t s = 0; s < times.size(); ++s) {
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto& snap = records[r].snapshots.at(s);
      dens[r] = static_cast<double>(snap.points.size()) / volume;
    }
    const MeanSe ms = mean_and_se(dens);
    CompareRow row;
    row.time = times[s];
    row.micro_mean = ms.mean;
    row.micro_se = ms.se;
    row.meso_mean = meso[s];
    row.abs_gap = std::abs(ms.mean - meso[s]);
    if (row.abs_gap == 0.0) {
      row.gap_in_se = 0.0;
    } else if (ms.se > 0.0) {
      row.gap_in_se = row.abs_gap / ms.se;
    } else {
      row.gap_in_se = std::numeric_limits<double>::infinity();
    }
    if (!(row.gap_in_se <= 3.0)) rep.within_3se = false;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

// Every mode leaves the fully resolved settings next to its outputs; the
// dump re-parses into an identical run.
void dump_resolved_config(const ExperimentConfig& cfg, const fs::path& out) {
  write_text_file(out / "config_resolved.toml", cfg.to_document().canonical());
}

}  // namespace

void run_simulate_mode(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  dump_resolved_config(cfg, out);
  const auto records = run_simulation(cfg);
  const std::uint64_t h = cfg.config_hash();

  write_snapshots_csv(out / "snapshots.csv", records, cfg.dimension, h);
  write_replicates_json(out / "replicates.json", records, h);
  if (cfg.event_log) {
    for (const auto& rec : records) {
      write_event_log_csv(
          out / ("events_rep" + std::to_string(rec.replicate_id) + ".csv"), rec,
          cfg.dimension);
    }
  }

  const TorusWindow window{cfg.side, cfg.dimension};
  const double volume = window.volume();
  const auto boxes = cfg.probe_box_list();
  BootstrapOptions bopts;
  bopts.resamples = cfg.bootstrap_resamples;
  bopts.confidence = cfg.confidence;

  json j;
  j["config_hash"] = hash_hex(h);
  j["replicates"] = records.size();
  json snaps = json::array();
  const std::size_t n_snaps = records.empty() ? 0 : records[0].snapshots.size();
  std::vector<double> dens(records.size());
  for (std::size_t s = 0; s < n_snaps; ++s) {
    const SnapshotEnsemble ens = ensemble_at(records, s, window);
    json entry;
    entry["time"] = ens.time;
    for (std::size_t r = 0; r < records.size(); ++r) {
      dens[r] = static_cast<double>(ens.replicates[r].size()) / volume;
    }
    const MeanSe ms = mean_and_se(dens);
    entry["mean_density"] = ms.mean;
    entry["mean_density_se"] = ms.se;
    json jboxes = json::array();
    for (const Box& box : boxes) {
      json jb;
      jb["lo"] = std::vector<double>(box.lo.begin(),
                                     box.lo.begin() + cfg.dimension);
      jb["hi"] = std::vector<double>(box.hi.begin(),
                                     box.hi.begin() + cfg.dimension);
      jb["volume"] = box.volume(cfg.dimension);
      const CountHistogram hist = count_law(ens, box);
      jb["mean_count"] = hist.mean;
      if (records.size() >= 2) {
        const Estimate m1 = empirical_moment(ens, box, 1, bopts);
        const Estimate m2 = empirical_moment(ens, box, 2, bopts);
        jb["moment1"] = {{"value", m1.value}, {"ci_lo", m1.ci_lo},
                         {"ci_hi", m1.ci_hi}};
        jb["moment2"] = {{"value", m2.value}, {"ci_lo", m2.ci_lo},
                         {"ci_hi", m2.ci_hi}};
        const auto di = dispersion_index(ens, box, bopts);
        if (di) {
          jb["dispersion_index"] = {{"value", di->value}, {"ci_lo", di->ci_lo},
                                    {"ci_hi", di->ci_hi}};
        } else {
          jb["dispersion_index"] = nullptr;
        }
      }
      jboxes.push_back(std::move(jb));
    }
    entry["boxes"] = std::move(jboxes);
    snaps.push_back(std::move(entry));
  }
  j["snapshots"] = std::move(snaps);
  write_text_file(out / "ensemble.json", j.dump(2) + "\n");
}

void run_kinetic_mode(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  fs::create_directories(out);
  dump_resolved_config(cfg, out);
  const std::uint64_t h = cfg.config_hash();
  const ModelParams params = cfg.model();

  KineticSolver solver(params, cfg.nodes);
  const double rho0 = cfg.effective_rho0();
  const double t_end = cfg.effective_kinetic_t_end();
  std::vector<double> snaps;
  for (double t : cfg.snapshot_times) {
    if (t <= t_end) snaps.push_back(t);
  }
  KineticOptions kopts;
  kopts.dt = cfg.dt;
  const DensityField init =
      DensityField::constant(cfg.dimension, cfg.nodes, cfg.side, rho0);
  const auto result = solver.integrate(init, t_end, snaps, kopts);

  write_trajectory_csv(out / "trajectory.csv", result.trajectory, h);

  json j;
  j["config_hash"] = hash_hex(h);
  j["nodes"] = cfg.nodes;
  j["dt"] = cfg.dt;
  j["t_end"] = t_end;
  j["rho0"] = rho0;
  j["masses"] = {
      {"attraction_closed", params.attraction_mass()},
      {"attraction_lattice", solver.a_plus_lattice_mass()},
      {"competition_closed", params.competition_mass()},
      {"competition_lattice", solver.a_minus_lattice_mass()},
  };
  if (params.b_plus.is_constant() && params.b_minus.is_constant()) {
    j["fixed_point_closed"] = fixed_point_json(homogeneous_fixed_point(params));
    j["fixed_point_lattice"] = fixed_point_json(homogeneous_fixed_point(
        params.b_plus.level(), params.b_minus.level(),
        solver.a_plus_lattice_mass(), solver.a_minus_lattice_mass()));
  } else {
    j["fixed_point_closed"] = nullptr;
    j["fixed_point_lattice"] = nullptr;
  }
  const CompetitionClass cc = classify_competition(params.a_plus, params.a_minus);
  j["competition"] = {{"regime", to_string(cc.regime)},
                      {"theta", std::isfinite(cc.theta)
                                    ? json(cc.theta)
                                    : json("inf")}};
  const auto& last = result.trajectory.back();
  j["final"] = {{"time", last[0]}, {"mean", last[1]}, {"min", last[2]},
                {"max", last[3]}};
  j["steps"] = result.stats.steps;
  j["halvings"] = result.stats.halvings;
  j["clipped_nodes"] = result.stats.clipped_nodes;

  json fields = json::array();
  if (cfg.field_dumps) {
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
      const std::string name = "field_" + std::to_string(k) + ".bin";
      write_field(out / name, result.snapshots[k]);
      fields.push_back({{"file", name}, {"time", result.snapshots[k].time}});
    }
  }
  j["fields"] = std::move(fields);
  write_text_file(out / "kinetic_report.json", j.dump(2) + "\n");
}

CompareReport run_compare_mode(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  dump_resolved_config(cfg, out);
  const auto records = run_simulation(cfg);
  const CompareReport rep = build_compare(cfg, records);

  json j;
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["reference"] = rep.reference_kind;
  j["rho0"] = rep.rho0;
  j["replicates"] = rep.replicates;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"time", r.time},
                    {"micro_mean", r.micro_mean},
                    {"micro_se", r.micro_se},
                    {"meso_mean", r.meso_mean},
                    {"abs_gap", r.abs_gap},
                    {"gap_in_se", std::isfinite(r.gap_in_se)
                                      ? json(r.gap_in_se)
                                      : json("inf")}});
  }
  j["rows"] = std::move(rows);
  j["within_3se"] = rep.within_3se;
  write_text_file(out / "compare.json", j.dump(2) + "\n");
  return rep;
}

void run_analyze_mode(const ExperimentConfig& cfg, const fs::path& out) {
  cfg.validate();
  if (cfg.analysis_input.empty()) {
    throw config_error(
        "analysis.input: analyze mode needs a stored snapshots csv");
  }
  fs::create_directories(out);
  dump_resolved_config(cfg, out);
  const std::uint64_t h = cfg.config_hash();
  const auto records = read_snapshots_csv(cfg.analysis_input, cfg.dimension);
  if (records.empty()) {
    throw config_error("analysis.input: no replicates in " + cfg.analysis_input);
  }

  const TorusWindow window{cfg.side, cfg.dimension};
  const auto boxes = cfg.probe_box_list();
  BootstrapOptions bopts;
  bopts.resamples = cfg.bootstrap_resamples;
  bopts.confidence = cfg.confidence;

  const int bins = cfg.r_bins;
  const double r_max = cfg.effective_r_max();
  std::vector<double> edges(bins + 1);
  for (int i = 0; i <= bins; ++i) edges[i] = r_max * i / bins;

  json j;
  j["config_hash"] = hash_hex(h);
  j["input"] = cfg.analysis_input;
  j["replicates"] = records.size();
  json snaps = json::array();
  const std::size_t n_snaps = records[0].snapshots.size();
  for (std::size_t s = 0; s < n_snaps; ++s) {
    const SnapshotEnsemble ens = ensemble_at(records, s, window);
    json entry;
    entry["time"] = ens.time;

    json certs = json::array();
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      const CertificateReport cert = subpoisson_certificate(
          ens, boxes[b], cfg.n_max, cfg.confidence, bopts);
      const std::string name = "certificate_s" + std::to_string(s) + "_b" +
                               std::to_string(b) + ".json";
      write_certificate_json(out / name, cert, ens.time, b, h);
      certs.push_back({{"file", name},
                       {"box", b},
                       {"pass", cert.pass},
                       {"kappa_hat", cert.kappa_hat}});
    }
    entry["certificates"] = std::move(certs);

    bool any_points = false;
    for (const auto& r : ens.replicates) {
      if (!r.empty()) { any_points = true; break; }
    }
    if (any_points) {
      const auto g = pair_correlation(ens, edges, bopts);
      const std::string name = "gpair_s" + std::to_string(s) + ".csv";
      write_pair_correlation_csv(out / name, g, ens.time, h);
      entry["pair_correlation"] = name;
    } else {
      entry["pair_correlation"] = nullptr;
    }
    snaps.push_back(std::move(entry));
  }
  j["snapshots"] = std::move(snaps);
  write_text_file(out / "analysis.json", j.dump(2) + "\n");
}

namespace {

// Randomized model with smooth inhomogeneous backgrounds and kernels drawn
// across all families; ranges are sized so the L = 8 window always satisfies
// the no-self-interaction constraint.
ModelParams random_duality_model(Rng& rng, int dim) {
  const double side = 8.0;
  auto random_kernel = [&](int which) {
    const double amp = rng.uniform(0.2, 1.2);
    switch (which) {
      case 0:
        return Kernel::tophat(amp, rng.uniform(0.3, 0.8), dim);
      case 1:
        return Kernel::gaussian(amp, rng.uniform(0.15, 0.35), dim);
      default:
        return Kernel::exponential(amp, rng.uniform(0.1, 0.2), dim);
    }
  };
  ModelParams params;
  params.window = TorusWindow{side, dim};
  params.a_plus = random_kernel(static_cast<int>(rng.uniform_index(3)));
  params.a_minus = rng.uniform() < 0.2
                       ? Kernel::tophat(0.0, 1.0, dim)
                       : random_kernel(static_cast<int>(rng.uniform_index(3)));
  const double bp = rng.uniform(0.2, 1.0);
  const double bm = rng.uniform(0.2, 1.0);
  params.b_plus = rng.uniform() < 0.5
                      ? Background::constant(bp)
                      : Background::cosine(bp, 0.5 * bp, 1);
  params.b_minus = rng.uniform() < 0.5
                       ? Background::constant(bm)
                       : Background::cosine(bm, 0.5 * bm, 2);
  params.validate();
  return params;
}

FiniteFunction random_quasi_observable(Rng& rng, int dim, double side) {
  const int max_points = 2 + static_cast<int>(rng.uniform_index(2));
  Box support;
  for (int k = 0; k < dim; ++k) {
    support.lo[k] = 0.25 * side;
    support.hi[k] = 0.75 * side;
  }
  const double a1 = rng.uniform(-0.25, 0.25);
  const double a2 = rng.uniform(-0.25, 0.25);
  auto phi = [dim, side, a1, a2](const Position& x) {
    double v = 0.6 + a1 * std::cos(2.0 * std::numbers::pi * x[0] / side);
    if (dim == 2) v += a2 * std::sin(2.0 * std::numbers::pi * x[1] / side);
    return v;
  };
  auto psi = [](double r) { return std::exp(-r * r / 0.18); };

  std::vector<FiniteFunction::Component> comps(max_points + 1);
  double bound = 0.0;
  for (int n = 0; n <= max_points; ++n) {
    const double c = rng.uniform(-1.0, 1.0);
    const double e = n >= 2 ? rng.uniform(-1.0, 1.0) : 0.0;
    comps[n] = [c, e, dim, phi, psi](std::span<const Position> pts) {
      double prod = c;
      for (const auto& p : pts) prod *= phi(p);
      double pairs = 0.0;
      if (e != 0.0) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double s = 0.0;
            for (int k = 0; k < dim; ++k) {
              const double d = pts[i][k] - pts[j][k];
              s += d * d;
            }
            pairs += psi(std::sqrt(s));
          }
        }
      }
      return prod + e * pairs;
    };
    bound = std::max(bound, std::abs(c) * std::pow(1.1, n) +
                                std::abs(e) * 0.5 * n * (n - 1));
  }
  return FiniteFunction(dim, max_points, support, bound, std::move(comps));
}

struct VerifyCheck {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string detail;
};

VerifyCheck duality_check(std::uint64_t master) {
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Rng rng(mix_seed(master, 0x0d0a1000u + inst));
    const int dim = 1 + inst % 2;
    const ModelParams params = random_duality_model(rng, dim);
    const FiniteFunction G =
        random_quasi_observable(rng, dim, params.window.side);
    const std::size_t n_pts = 3 + rng.uniform_index(4);
    std::vector<Position> gamma(n_pts);
    for (auto& p : gamma) {
      p = {rng.uniform(0.0, params.window.side),
           dim == 2 ? rng.uniform(0.0, params.window.side) : 0.0};
    }
    QuadratureGrid quad;
    quad.nodes_per_axis = dim == 1 ? 256 : 24;
    worst = std::max(worst, check_duality(G, gamma, params, quad));
  }
  VerifyCheck c;
  c.name = "transform_duality";
  c.statistic = worst;
  c.threshold = 1e-9;
  c.pass = worst <= c.threshold;
  c.detail = "max |direct - lifted| over 20 randomized instances";
  return c;
}

VerifyCheck moment_identity_verify(std::uint64_t master) {
  Rng rng(mix_seed(master, 0x0d0a2000u));
  long long worst = 0;
  for (int inst = 0; inst < 60; ++inst) {
    const int dim = 1 + inst % 2;
    Box box;
    for (int k = 0; k < dim; ++k) {
      box.lo[k] = 0.25;
      box.hi[k] = 0.75;
    }
    const std::size_t n_pts = rng.uniform_index(13);
    std::vector<Position> gamma(n_pts);
    for (auto& p : gamma) {
      p = {rng.uniform(), dim == 2 ? rng.uniform() : 0.0};
    }
    const int order = 1 + static_cast<int>(rng.uniform_index(8));
    const MomentIdentity mi = moment_identity_check(order, box, gamma, dim);
    worst = std::max(worst, std::llabs(mi.lhs - mi.rhs));
  }
  VerifyCheck c;
  c.name = "count_power_identity";
  c.statistic = static_cast<double>(worst);
  c.threshold = 0.0;
  c.pass = worst == 0;
  c.detail = "max |lhs - rhs| over 60 randomized integer instances";
  return c;
}

VerifyCheck mgf_series_check() {
  // Points where 30 terms leave a tail far below the threshold; at
  // |beta| = 1 the polynomial growth already eats most of 30!'s decay.
  const double pairs[][2] = {{-1.0, 0.25}, {-0.5, 1.0}, {-0.5, 2.0},
                             {0.25, 1.0},  {0.25, 2.0}, {0.5, 1.0},
                             {0.5, 2.0}};
  double worst = 0.0;
  for (const auto& p : pairs) {
    const double closed = poisson_mgf(p[0], p[1]);
    const double series = poisson_mgf_touchard_series(p[0], p[1], 30);
    worst = std::max(worst, std::abs(closed - series) / std::abs(closed));
  }
  VerifyCheck c;
  c.name = "mgf_series";
  c.statistic = worst;
  c.threshold = 1e-10;
  c.pass = worst <= c.threshold;
  c.detail = "max relative gap, closed form vs 30-term polynomial series";
  return c;
}

VerifyCheck product_functional_check(std::uint64_t master) {
  const int dim = 2;
  const double side = 6.0;
  const double kappa = 0.8;
  const TorusWindow window{side, dim};
  Box support;
  for (int k = 0; k < dim; ++k) {
    support.lo[k] = 1.5;
    support.hi[k] = 4.5;
  }
  const ThetaFunction theta(
      [](const Position& x) {
        const double dx = x[0] - 3.0;
        const double dy = x[1] - 3.0;
        return -0.6 * std::exp(-(dx * dx + dy * dy) / 0.98);
      },
      support, dim, 256);
  const double target = std::exp(kappa * theta.integral());

  Rng rng(mix_seed(master, 0x0d0a3000u));
  const int samples = 4000;
  double sum = 0.0, sum2 = 0.0;
  std::vector<Position> pts;
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t n = rng.poisson(kappa * window.volume());
    pts.resize(n);
    for (auto& p : pts) {
      p = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
    }
    const double f = f_theta_eval(theta, pts);
    sum += f;
    sum2 += f * f;
  }
  const double mean = sum / samples;
  const double var = (sum2 - samples * mean * mean) / (samples - 1);
  const double se = std::sqrt(std::max(var, 0.0) / samples);
  const double z = se > 0.0 ? std::abs(mean - target) / se
                            : (mean == target ? 0.0
                                              : std::numeric_limits<double>::infinity());
  VerifyCheck c;
  c.name = "product_functional";
  c.statistic = z;
  c.threshold = 3.0;
  c.pass = z <= c.threshold;
  c.detail = "z-score of the Monte Carlo mean against the exponential formula";
  return c;
}

}  // namespace

bool run_verify_mode(const ExperimentConfig& cfg, const fs::path& out,
                     std::ostream& log) {
  cfg.validate();
  fs::create_directories(out);
  const std::uint64_t master = cfg.seed;

  std::vector<VerifyCheck> checks;
  checks.push_back(duality_check(master));
  checks.push_back(moment_identity_verify(master));
  checks.push_back(mgf_series_check());
  checks.push_back(product_functional_check(master));

  bool all_pass = true;
  json jchecks = json::array();
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    log << c.name << ": statistic " << c.statistic << " (threshold "
        << c.threshold << ") " << (c.pass ? "PASS" : "FAIL") << "\n";
    jchecks.push_back({{"name", c.name},
                       {"statistic", c.statistic},
                       {"threshold", c.threshold},
                       {"detail", c.detail},
                       {"pass", c.pass}});
  }
  json j;
  j["config_hash"] = hash_hex(cfg.config_hash());
  j["checks"] = std::move(jchecks);
  j["all_pass"] = all_pass;
  write_text_file(out / "verify.json", j.dump(2) + "\n");
  return all_pass;
}

}  // namespace migsim
