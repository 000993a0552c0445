#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "migsim/dynamics.hpp"
#include "migsim/model.hpp"
#include "migsim/toml.hpp"

namespace migsim {

struct KernelSpec {
  std::string family = "tophat";
  double amplitude = 0.0;
  double radius = 0.5;  // tophat
  double scale = 1.0;   // gaussian / exponential
  double eps_cut = Kernel::kDefaultEpsCut;
};

struct BackgroundSpec {
  double level = 0.0;
  double cosine_amplitude = 0.0;
  int cosine_mode = 1;
};

// Everything one experiment needs, resolved from a config document plus CLI
// overrides.  Validation reports offending keys by name.
struct ExperimentConfig {
  // model
  int dimension = 2;
  double side = 20.0;
  KernelSpec a_plus;
  KernelSpec a_minus;
  BackgroundSpec b_plus;
  BackgroundSpec b_minus;

  // run
  double t_end = 10.0;
  std::vector<double> snapshot_times;
  std::uint64_t replicates = 100;
  bool seed_set = false;
  std::uint64_t seed = 0;  // mandatory; no wall-clock fallback
  std::uint64_t event_cap = 100'000'000;
  std::uint64_t audit_interval = 10'000;
  int workers = 0;  // 0: one per hardware thread
  bool event_log = false;
  std::string init = "empty";  // empty | poisson | points
  double init_kappa = 0.0;
  std::vector<double> init_points;  // flattened coordinates

  // analysis
  std::vector<double> probe_boxes;  // flattened lo/hi groups, 2*dim each
  int n_max = 6;
  double confidence = 0.95;
  int bootstrap_resamples = 1000;
  int r_bins = 24;
  double r_max = 0.0;  // 0: side / 4
  std::string analysis_input;  // analyze mode: snapshots csv path

  // kinetic
  int nodes = 64;
  double dt = 0.01;
  double kinetic_t_end = -1.0;  // negative: run t_end
  double rho0 = -1.0;           // negative: init_kappa
  bool field_dumps = false;

  static ExperimentConfig from_document(const TomlDocument& doc);
  static ExperimentConfig from_file(const std::string& path,
                                    const std::vector<std::string>& overrides);
  static ExperimentConfig from_text(const std::string& text,
                                    const std::string& origin,
                                    const std::vector<std::string>& overrides);

  void validate() const;  // throws config_error naming the key

  ModelParams model() const;
  InitialCondition initial_condition() const;
  std::vector<Box> probe_box_list() const;
  ReplicateOptions replicate_options() const;

  double effective_r_max() const { return r_max > 0.0 ? r_max : side / 4.0; }
  double effective_rho0() const { return rho0 >= 0.0 ? rho0 : init_kappa; }
  double effective_kinetic_t_end() const {
    return kinetic_t_end >= 0.0 ? kinetic_t_end : t_end;
  }
  int effective_workers() const;

  // Resolved settings as a document; hashing and dumps go through this.
  TomlDocument to_document() const;
  std::uint64_t config_hash() const;
};

std::string hash_hex(std::uint64_t h);

}  // namespace migsim
