#include "migsim/model.hpp"

#include <cmath>
#include <stdexcept>

namespace migsim {

double ModelParams::max_interaction_radius() const {
  double r = 0.0;
  for (const Kernel* k : {&a_plus, &a_minus}) {
    if (!k->is_zero()) r = std::max(r, k->cutoff_radius());
  }
  return r;
}

void ModelParams::validate() const {
  if (window.dim != 1 && window.dim != 2) {
    throw std::invalid_argument("model: window dimension must be 1 or 2");
  }
  if (!(window.side > 0.0) || !std::isfinite(window.side)) {
    throw std::invalid_argument("model: window side must be positive and finite");
  }
  for (const Kernel* k : {&a_plus, &a_minus}) {
    if (k->dimension() != window.dim) {
      throw std::invalid_argument("model: kernel dimension disagrees with window");
    }
    if (k->family() == KernelFamily::Constant) {
      throw std::invalid_argument("model: interaction kernels must be integrable");
    }
    if (!k->is_zero() && !std::isfinite(k->cutoff_radius())) {
      throw std::invalid_argument(
          "model: interaction kernels need a finite cutoff (eps_cut > 0)");
    }
  }
  if (b_plus.inf() < 0.0 || b_minus.inf() < 0.0) {
    throw std::invalid_argument("model: background components must be nonnegative");
  }
  const double r = max_interaction_radius();
  if (r > 0.0 && !(window.side > 2.0 * r)) {
    throw std::invalid_argument(
        "model: window side must exceed twice the largest interaction range");
  }
}

}  // namespace migsim
