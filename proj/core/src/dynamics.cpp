#include "migsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace migsim {

Simulator::Simulator(const ModelParams& params, std::uint64_t seed,
                     const SimOptions& options)
    : params_(&params),
      options_(options),
      cfg_(params.window, params.max_interaction_radius()),
      rng_(seed) {
  params.validate();
  rates_.background_birth_mass = params.b_plus.integral(params.window);
  rates_.attraction_mass = params.attraction_mass();
}

void Simulator::initialize(const InitialCondition& init) {
  if (events_ != 0 || !cfg_.empty()) {
    throw std::logic_error("simulator: initialize requires a fresh instance");
  }
  if (std::holds_alternative<EmptyInit>(init)) return;
  if (const auto* p = std::get_if<PoissonInit>(&init)) {
    if (p->kappa < 0.0) {
      throw std::invalid_argument("simulator: initial intensity must be nonnegative");
    }
    const std::uint64_t n = rng_.poisson(p->kappa * params_->window.volume());
    for (std::uint64_t i = 0; i < n; ++i) {
      Position x{0.0, 0.0};
      for (int k = 0; k < params_->dim(); ++k) {
        x[k] = rng_.uniform(0.0, params_->window.side);
      }
      insert_particle(x, nullptr);
    }
    return;
  }
  for (const Position& x : std::get<ExplicitInit>(init).points) {
    insert_particle(x, nullptr);
  }
}

double Simulator::death_rate_of(std::uint64_t id) const {
  return rates_.death_rate[cfg_.dense_index(id)];
}

void Simulator::insert_particle(const Position& p, Event* out) {
  const Position q = params_->window.wrap(p);
  const Kernel& am = params_->a_minus;
  double own = params_->b_minus.value(q, params_->window);
  if (!am.is_zero()) {
    cfg_.neighbors_within(q, am.cutoff_radius(), scratch_);
    for (const auto& nb : scratch_) {
      const double w = am.value(nb.dist);
      own += w;
      rates_.death_rate[nb.dense] += w;
      rates_.total_death += w;
    }
  }
  const std::uint64_t id = cfg_.insert(q);
  rates_.death_rate.push_back(own);
  rates_.total_death += own;
  if (out) *out = Event{EventKind::Birth, time_, q, id};
}

void Simulator::remove_particle(std::size_t dense, Event* out) {
  const Position pos = cfg_.position_at(dense);
  const std::uint64_t id = cfg_.id_at(dense);
  const double own = rates_.death_rate[dense];

  const std::size_t vacated = cfg_.remove(id);
  rates_.death_rate[vacated] = rates_.death_rate.back();
  rates_.death_rate.pop_back();
  rates_.total_death -= own;

  const Kernel& am = params_->a_minus;
  if (!am.is_zero()) {
    // The victim is gone; everything still in range loses its contribution.
    cfg_.neighbors_within(pos, am.cutoff_radius(), scratch_);
    for (const auto& nb : scratch_) {
      const double w = am.value(nb.dist);
      rates_.death_rate[nb.dense] -= w;
      rates_.total_death -= w;
    }
  }
  if (out) *out = Event{EventKind::Death, time_, pos, id};
}

Position Simulator::sample_birth_location() {
  const double bg = rates_.background_birth_mass;
  const double total = total_birth_rate();
  if (total <= 0.0) {
    throw std::logic_error("simulator: no birth pressure to sample from");
  }
  const TorusWindow& w = params_->window;
  const double pick = rng_.uniform(0.0, total);
  if (pick < bg) {
    // Background component: rejection against the sup of the profile.
    const Background& b = params_->b_plus;
    const double sup = b.sup();
    for (;;) {
      Position x{0.0, 0.0};
      for (int k = 0; k < w.dim; ++k) x[k] = rng_.uniform(0.0, w.side);
      if (b.is_constant()) return x;
      if (rng_.uniform() * sup <= b.value(x, w)) return x;
    }
  }
  // Attraction component: every particle carries equal mass, then a radial
  // displacement drawn from the kernel profile.
  const std::size_t parent = rng_.uniform_index(cfg_.size());
  Position p = cfg_.position_at(parent);
  const double r = params_->a_plus.sample_radius(rng_.uniform());
  if (w.dim == 1) {
    p[0] += (rng_.uniform() < 0.5) ? -r : r;
  } else {
    const double phi = 2.0 * std::numbers::pi * rng_.uniform();
    p[0] += r * std::cos(phi);
    p[1] += r * std::sin(phi);
  }
  return w.wrap(p);
}

Simulator::StepResult Simulator::advance(double t_max, Event* out) {
  const double birth = total_birth_rate();
  const double death = rates_.total_death;
  const double total = birth + death;
  if (total <= 0.0) return StepResult::Absorbed;

  const double dt = rng_.exponential(total);
  if (time_ + dt > t_max) {
    // Discarding the overshoot is exact: the exponential clock is
    // memoryless, so the next call starts a fresh one.
    time_ = t_max;
    return StepResult::ReachedTarget;
  }
  time_ += dt;
  ++events_;
  if (events_ > options_.event_cap) {
    throw explosion_suspected(events_, time_);
  }

  const double u = rng_.uniform(0.0, total);
  if (u < birth) {
    insert_particle(sample_birth_location(), out);
  } else {
    // Victim selection by per-particle rate; the scan reuses u - birth as
    // a uniform draw on [0, total death).
    double target = u - birth;
    std::size_t idx = 0;
    double acc = 0.0;
    const std::size_t n = rates_.death_rate.size();
    for (; idx < n; ++idx) {
      acc += rates_.death_rate[idx];
      if (target < acc) break;
    }
    if (idx >= n) idx = n - 1;  // guards accumulated-rounding overshoot
    remove_particle(idx, out);
  }

  if (options_.audit_interval != 0 && events_ % options_.audit_interval == 0) {
    audit(options_.audit_rel_tol);
  }
  return StepResult::DidEvent;
}

std::optional<Event> Simulator::step() {
  Event ev;
  const StepResult r = advance(std::numeric_limits<double>::infinity(), &ev);
  if (r == StepResult::DidEvent) return ev;
  return std::nullopt;
}

double Simulator::fresh_death_rate(std::size_t dense) const {
  const Position& x = cfg_.position_at(dense);
  const std::uint64_t id = cfg_.id_at(dense);
  double rate = params_->b_minus.value(x, params_->window);
  const Kernel& am = params_->a_minus;
  if (!am.is_zero()) {
    std::vector<Configuration::Neighbor> buf;
    cfg_.neighbors_within(x, am.cutoff_radius(), buf, id);
    for (const auto& nb : buf) rate += am.value(nb.dist);
  }
  return rate;
}

void Simulator::audit(double rel_tol) {
  double total = 0.0;
  const std::size_t n = cfg_.size();
  for (std::size_t dense = 0; dense < n; ++dense) {
    const double fresh = fresh_death_rate(dense);
    const double cached = rates_.death_rate[dense];
    // Relative check with an absolute floor: cancellation noise near zero
    // rates is absolute-scale.
    if (std::fabs(fresh - cached) > rel_tol * std::max(1.0, std::fabs(fresh))) {
      throw rate_drift_error(
          "rate cache drifted: cached " + std::to_string(cached) + " vs fresh " +
          std::to_string(fresh) + " for point id " +
          std::to_string(cfg_.id_at(dense)) + " after " +
          std::to_string(events_) + " events");
    }
    rates_.death_rate[dense] = fresh;
    total += fresh;
  }
  rates_.total_death = total;
}

ReplicateRecord run_replicate(const ModelParams& params,
                              const InitialCondition& init, double t_end,
                              std::uint64_t seed,
                              std::span<const double> snapshot_times,
                              const ReplicateOptions& options) {
  params.validate();
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("replicate: t_end must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double t = snapshot_times[i];
    if (!(t >= 0.0) || t > t_end) {
      throw std::invalid_argument("replicate: snapshot times must lie in [0, t_end]");
    }
    if (i > 0 && !(t > snapshot_times[i - 1])) {
      throw std::invalid_argument("replicate: snapshot times must be strictly increasing");
    }
  }

  Simulator sim(params, seed, options.sim);
  sim.initialize(init);

  ReplicateRecord rec;
  rec.seed = seed;

  Event ev;
  std::size_t si = 0;
  bool absorbed = false;
  for (;;) {
    const double target = (si < snapshot_times.size()) ? snapshot_times[si] : t_end;
    for (;;) {
      const auto r = sim.advance(target, &ev);
      if (r == Simulator::StepResult::DidEvent) {
        if (options.record_events) rec.event_log.push_back(ev);
        continue;
      }
      if (r == Simulator::StepResult::Absorbed) absorbed = true;
      break;
    }
    if (absorbed) {
      // The empty state with no immigration persists; remaining snapshots
      // all see it.
      while (si < snapshot_times.size()) {
        rec.snapshots.push_back(Snapshot{snapshot_times[si], sim.config().points_with_ids()});
        ++si;
      }
      rec.status = ReplicateStatus::AbsorbedEmpty;
      break;
    }
    if (si < snapshot_times.size()) {
      rec.snapshots.push_back(Snapshot{snapshot_times[si], sim.config().points_with_ids()});
      ++si;
    } else {
      break;
    }
  }

  rec.events = sim.events();
  rec.final_population = sim.config().size();
  rec.final_time = t_end;
  return rec;
}

}  // namespace migsim
