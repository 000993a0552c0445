#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "migsim/config.hpp"
#include "migsim/dynamics.hpp"

namespace migsim {

// Runs every replicate of the experiment across a bounded worker pool and
// returns the records ordered by replicate id, independent of completion
// order.  Replicate i always uses seed mix_seed(master, i), so the result is
// identical for any worker count.  An empty snapshot schedule defaults to
// the single time t_end.  The first replicate failure aborts the pool and is
// rethrown.
std::vector<ReplicateRecord> run_simulation(const ExperimentConfig& cfg);

struct CompareRow {
  double time = 0.0;
  double micro_mean = 0.0;  // ensemble mean density
  double micro_se = 0.0;    // standard error of that mean
  double meso_mean = 0.0;   // reference mean density at the same time
  double abs_gap = 0.0;
  double gap_in_se = 0.0;   // abs_gap / micro_se; 0 when both vanish
};

struct CompareReport {
  // closed_form_noninteracting: both kernels zero and b- constant, so the
  // ensemble mean obeys the linear balance law exactly.  kinetic_grid: the
  // mean-field solver on the configured lattice, a model approximation with
  // no a-priori error bar; the gap is reported, not asserted against.
  std::string reference_kind;
  double rho0 = 0.0;
  std::size_t replicates = 0;
  std::vector<CompareRow> rows;
  bool within_3se = false;
};

CompareReport build_compare(const ExperimentConfig& cfg,
                            std::span<const ReplicateRecord> records);

// Mode entry points.  Each creates `out` if needed and stamps every file it
// writes with the config hash.
void run_simulate_mode(const ExperimentConfig& cfg,
                       const std::filesystem::path& out);
void run_kinetic_mode(const ExperimentConfig& cfg,
                      const std::filesystem::path& out);
CompareReport run_compare_mode(const ExperimentConfig& cfg,
                               const std::filesystem::path& out);
void run_analyze_mode(const ExperimentConfig& cfg,
                      const std::filesystem::path& out);

// Identity self-test battery: transform duality on randomized instances,
// the power-to-subset count identity, the moment generating function
// closed form against its polynomial series, and the Monte Carlo product
// functional against its exponential formula.  Prints one line per check,
// writes verify.json, returns true when everything is within threshold.
bool run_verify_mode(const ExperimentConfig& cfg,
                     const std::filesystem::path& out, std::ostream& log);

}  // namespace migsim
