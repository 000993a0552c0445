#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "migsim/configuration.hpp"
#include "migsim/errors.hpp"
#include "migsim/model.hpp"
#include "migsim/rng.hpp"

namespace migsim {

enum class EventKind : std::uint8_t { Birth, Death };

struct Event {
  EventKind kind;
  double time;
  Position position;
  std::uint64_t point_id;
};

// Aggregate rates maintained alongside the configuration.  The total birth
// pressure is exact by linearity: the background mass is fixed and every
// particle contributes the full (truncated) attraction mass.  Death rates
// are per-particle and updated incrementally as neighbors come and go.
struct RateCache {
  std::vector<double> death_rate;      // parallel to the dense slot order
  double total_death = 0.0;
  double background_birth_mass = 0.0;  // integral of b_plus over the window
  double attraction_mass = 0.0;        // L1 mass of a_plus

  double total_birth(std::size_t population) const {
    return background_birth_mass + static_cast<double>(population) * attraction_mass;
  }
};

struct SimOptions {
  std::uint64_t event_cap = 100'000'000;
  std::uint64_t audit_interval = 10'000;  // events between from-scratch audits
  double audit_rel_tol = 1e-9;
};

struct PoissonInit { double kappa = 0.0; };
struct ExplicitInit { std::vector<Position> points; };
struct EmptyInit {};
using InitialCondition = std::variant<EmptyInit, PoissonInit, ExplicitInit>;

// Exact event-driven sampler: exponential holding times at the total rate,
// birth versus death by rate share, death victim by per-particle rate.
class Simulator {
 public:
  Simulator(const ModelParams& params, std::uint64_t seed,
            const SimOptions& options = {});

  void initialize(const InitialCondition& init);

  enum class StepResult { DidEvent, ReachedTarget, Absorbed };

  // Advances to the next event, or to t_max if the holding time overshoots
  // it (memorylessness makes discarding the overshoot exact).  Absorbed
  // means zero total rate: the empty configuration with no background
  // immigration, which no event ever leaves.
  StepResult advance(double t_max, Event* out);

  // Single unconditional step; nullopt when absorbed.
  std::optional<Event> step();

  double time() const { return time_; }
  std::uint64_t events() const { return events_; }
  const Configuration& config() const { return cfg_; }
  const RateCache& rates() const { return rates_; }
  const ModelParams& params() const { return *params_; }

  double total_birth_rate() const { return rates_.total_birth(cfg_.size()); }
  double total_death_rate() const { return rates_.total_death; }
  double death_rate_of(std::uint64_t id) const;

  // Draws a birth location from the exact immigration profile: background
  // component by rejection against its sup, attraction component as a
  // uniformly chosen parent plus a radial displacement from the kernel.
  Position sample_birth_location();

  // Recomputes every death rate from scratch; beyond-tolerance disagreement
  // with the cache throws rate_drift_error (always a bug), agreement adopts
  // the fresh values so drift cannot compound.
  void audit(double rel_tol);

 private:
  void insert_particle(const Position& p, Event* out);
  void remove_particle(std::size_t dense, Event* out);
  double fresh_death_rate(std::size_t dense) const;

  const ModelParams* params_;
  SimOptions options_;
  Configuration cfg_;
  RateCache rates_;
  Rng rng_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::vector<Configuration::Neighbor> scratch_;
};

enum class ReplicateStatus { Completed, AbsorbedEmpty };

struct Snapshot {
  double time = 0.0;
  std::vector<std::pair<std::uint64_t, Position>> points;
};

struct ReplicateRecord {
  std::uint64_t replicate_id = 0;
  std::uint64_t seed = 0;
  ReplicateStatus status = ReplicateStatus::Completed;
  std::uint64_t events = 0;
  std::size_t final_population = 0;
  double final_time = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<Event> event_log;  // filled only when requested
};

struct ReplicateOptions {
  SimOptions sim;
  bool record_events = false;
};

// Runs one replicate to t_end, recording the state at each snapshot time
// (sorted ascending; the state recorded at time tau is the one left by all
// events up to tau).  Deterministic in (params, init, seed, t_end, snapshot
// schedule).
ReplicateRecord run_replicate(const ModelParams& params,
                              const InitialCondition& init, double t_end,
                              std::uint64_t seed,
                              std::span<const double> snapshot_times,
                              const ReplicateOptions& options = {});

}  // namespace migsim
