#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "migsim/geometry.hpp"

namespace migsim {

enum class KernelFamily { Tophat, Gaussian, Exponential, Constant };

std::string to_string(KernelFamily f);

// Radial interaction kernel with a finite-range truncation.
//
// The integrable families (tophat, gaussian, exponential) carry a hard
// cutoff placed where the L1 tail mass drops to eps_cut times the full mass;
// the removed tail is recorded in truncated_mass() and never redistributed.
// eps_cut = 0 keeps the full (infinite) support, which is fine for analytic
// work but not accepted by the simulator.  The constant family models a
// bounded non-integrable profile; it has no L1 norm.
class Kernel {
 public:
  static constexpr double kDefaultEpsCut = 1e-6;

  static Kernel tophat(double amplitude, double radius, int dim);
  static Kernel gaussian(double amplitude, double sigma, int dim,
                         double eps_cut = kDefaultEpsCut);
  static Kernel exponential(double amplitude, double sigma, int dim,
                            double eps_cut = kDefaultEpsCut);
  static Kernel constant(double amplitude, int dim);

  KernelFamily family() const { return family_; }
  int dimension() const { return dim_; }
  double amplitude() const { return amplitude_; }
  double scale() const { return scale_; }
  double eps_cut() const { return eps_cut_; }

  // Interaction range; +inf for the constant family and for eps_cut = 0,
  // zero for an identically zero kernel.
  double cutoff_radius() const { return cutoff_; }

  // Fraction of the full L1 mass removed by the cutoff.
  double truncated_mass() const { return truncated_mass_; }

  bool is_zero() const { return amplitude_ == 0.0; }

  // Radial profile value; zero beyond the cutoff.  r must be nonnegative.
  double value(double r) const;

  // Integral of the truncated profile over R^d, in closed form.
  // Throws std::invalid_argument for the constant family.
  double l1_norm() const;

  double sup_norm() const { return amplitude_; }

  // Inverse CDF of the radial displacement law induced by the profile
  // (density proportional to value(r) in d = 1 and to r * value(r) in
  // d = 2), evaluated by interpolation in a precomputed table.  u in [0, 1].
  // Requires a finite cutoff and positive mass.
  double sample_radius(double u) const;

 private:
  Kernel(KernelFamily family, double amplitude, double scale, int dim,
         double eps_cut);
  void build_radius_table();

  KernelFamily family_;
  int dim_;
  double amplitude_;
  double scale_;
  double eps_cut_;
  double cutoff_;
  double truncated_mass_;
  double l1_;
  std::vector<double> radius_cdf_;  // normalized cumulative mass at cutoff_*j/M
};

// Bounded habitat rate profile: a constant level plus an optional single
// cosine mode along the first axis (wavelength = window side / mode).
// The modulation never exceeds the level, so values stay nonnegative.
class Background {
 public:
  Background() = default;
  static Background constant(double level);
  static Background cosine(double level, double mod_amplitude, int mode);

  double value(const Position& x, const TorusWindow& w) const;
  double sup() const { return level_ + std::abs(mod_); }
  double inf() const { return level_ - std::abs(mod_); }
  // The cosine mode integrates to zero over whole periods.
  double integral(const TorusWindow& w) const { return level_ * w.volume(); }
  bool is_constant() const { return mod_ == 0.0; }
  bool is_zero() const { return level_ == 0.0 && mod_ == 0.0; }

  double level() const { return level_; }
  double mod_amplitude() const { return mod_; }
  int mode() const { return mode_; }

 private:
  Background(double level, double mod, int mode);
  double level_ = 0.0;
  double mod_ = 0.0;
  int mode_ = 1;
};

// Relative reach of competition versus attraction, probed numerically on a
// radial grid.  Long-range competition means the competition kernel
// dominates a fixed multiple of the attraction kernel everywhere attraction
// acts; short-range means attraction out-reaches competition.
enum class CompetitionRegime { Long, Short, Indeterminate };

std::string to_string(CompetitionRegime r);

struct CompetitionClass {
  CompetitionRegime regime = CompetitionRegime::Indeterminate;
  // Largest theta with a_minus >= theta * a_plus across the probes; +inf
  // when attraction vanishes, meaningless unless regime == Long.
  double theta = 0.0;
};

// Probe radii covering both supports: the origin plus a log-spaced grid
// out to twice the larger cutoff (64 points by default).
std::vector<double> default_probe_radii(const Kernel& a_plus,
                                        const Kernel& a_minus,
                                        int count = 64);

CompetitionClass classify_competition(const Kernel& a_plus,
                                      const Kernel& a_minus,
                                      std::span<const double> probe_radii,
                                      double theta_floor = 1e-6);

CompetitionClass classify_competition(const Kernel& a_plus,
                                      const Kernel& a_minus);

}  // namespace migsim
