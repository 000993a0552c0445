#pragma once

#include <stdexcept>
#include <string>

namespace migsim {

// Thrown when a replicate exceeds its event budget; the process may be
// supercritical and the trajectory non-explosive only up to the budget.
class explosion_suspected : public std::runtime_error {
 public:
  explosion_suspected(std::uint64_t events, double sim_time)
      : std::runtime_error("event budget exhausted after " + std::to_string(events) +
                           " events at t=" + std::to_string(sim_time) +
                           "; explosion suspected"),
        events_(events),
        time_(sim_time) {}
  std::uint64_t events() const { return events_; }
  double time() const { return time_; }

 private:
  std::uint64_t events_;
  double time_;
};

// Thrown when the incrementally maintained rate cache disagrees with a
// from-scratch recomputation beyond tolerance.  Always a bug, never noise.
class rate_drift_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configuration file / CLI override problems; message names the offending key.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Insufficient data for a statistical procedure (for example a certificate
// asked of too few replicates).
class statistics_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid integrator could not hold positivity / stability at any usable step.
class stiffness_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class positivity_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace migsim
