#pragma once

#include "migsim/geometry.hpp"
#include "migsim/kernel.hpp"

namespace migsim {

// Full model specification: window geometry, attraction and competition
// kernels, and the two background components.  Birth pressure at x is
// b_plus(x) + sum of a_plus over the configuration; the per-particle
// removal rate at x is b_minus(x) + sum of a_minus over the other points.
struct ModelParams {
  TorusWindow window;
  Kernel a_plus = Kernel::tophat(0.0, 1.0, 2);
  Kernel a_minus = Kernel::tophat(0.0, 1.0, 2);
  Background b_plus;
  Background b_minus;

  int dim() const { return window.dim; }

  // L1 masses of the truncated kernels; zero for zero kernels.
  double attraction_mass() const {
    return a_plus.is_zero() ? 0.0 : a_plus.l1_norm();
  }
  double competition_mass() const {
    return a_minus.is_zero() ? 0.0 : a_minus.l1_norm();
  }

  // Largest finite interaction range among the active kernels.
  double max_interaction_radius() const;

  // Checks dimensional consistency, nonnegativity, finite interaction
  // ranges, and that the window can hold the ranges without a point
  // interacting with its own periodic image (side > 2 * max range).
  // Throws std::invalid_argument naming the violated condition.
  void validate() const;
};

}  // namespace migsim
