#include "migsim/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace migsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kRadiusTableIntervals = 4096;

// Solves (1 + t) * exp(-t) = eps for t; tail mass fraction of the d = 2
// exponential profile beyond radius sigma * t.
double solve_exponential_tail_2d(double eps) {
  double t = std::log(1.0 / eps);
  t += std::log1p(t);  // first-order correction, already close
  for (int it = 0; it < 64; ++it) {
    const double f = (1.0 + t) * std::exp(-t) - eps;
    const double df = -t * std::exp(-t);
    const double step = f / df;
    t -= step;
    if (std::fabs(step) < 1e-15 * t) break;
  }
  return t;
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Tophat: return "tophat";
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::Constant: return "constant";
  }
  return "?";
}

Kernel::Kernel(KernelFamily family, double amplitude, double scale, int dim,
               double eps_cut)
    : family_(family),
      dim_(dim),
      amplitude_(amplitude),
      scale_(scale),
      eps_cut_(eps_cut),
      cutoff_(0.0),
      truncated_mass_(0.0),
      l1_(0.0) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("kernel: dimension must be 1 or 2");
  }
  if (amplitude < 0.0) {
    throw std::invalid_argument("kernel: amplitude must be nonnegative");
  }
  if (family != KernelFamily::Constant && scale <= 0.0) {
    throw std::invalid_argument("kernel: scale must be positive");
  }
  if (eps_cut < 0.0 || eps_cut >= 0.5) {
    throw std::invalid_argument("kernel: eps_cut must lie in [0, 0.5)");
  }

  if (family_ == KernelFamily::Constant) {
    cutoff_ = std::numeric_limits<double>::infinity();
    return;
  }
  if (amplitude_ == 0.0) {
    // Identically zero: no range, no mass.
    cutoff_ = 0.0;
    return;
  }

  const double s = scale_;
  double full = 0.0;   // untruncated L1 mass
  double tail = 0.0;   // fraction beyond the cutoff
  switch (family_) {
    case KernelFamily::Tophat:
      cutoff_ = s;
      full = (dim_ == 1) ? 2.0 * amplitude_ * s : amplitude_ * kPi * s * s;
      tail = 0.0;
      break;
    case KernelFamily::Gaussian:
      full = (dim_ == 1) ? amplitude_ * s * std::sqrt(2.0 * kPi)
                         : amplitude_ * 2.0 * kPi * s * s;
      if (eps_cut_ == 0.0) {
        cutoff_ = std::numeric_limits<double>::infinity();
      } else if (dim_ == 1) {
        cutoff_ = s * std::sqrt(2.0) * boost::math::erfc_inv(eps_cut_);
        tail = eps_cut_;
      } else {
        cutoff_ = s * std::sqrt(2.0 * std::log(1.0 / eps_cut_));
        tail = eps_cut_;
      }
      break;
    case KernelFamily::Exponential:
      full = (dim_ == 1) ? 2.0 * amplitude_ * s
                         : 2.0 * kPi * amplitude_ * s * s;
      if (eps_cut_ == 0.0) {
        cutoff_ = std::numeric_limits<double>::infinity();
      } else if (dim_ == 1) {
        cutoff_ = s * std::log(1.0 / eps_cut_);
        tail = eps_cut_;
      } else {
        cutoff_ = s * solve_exponential_tail_2d(eps_cut_);
        tail = eps_cut_;
      }
      break;
    case KernelFamily::Constant:
      break;  // unreachable
  }
  truncated_mass_ = tail;
  l1_ = full * (1.0 - tail);

  if (std::isfinite(cutoff_)) build_radius_table();
}

Kernel Kernel::tophat(double amplitude, double radius, int dim) {
  return Kernel(KernelFamily::Tophat, amplitude, radius, dim, 0.0);
}

Kernel Kernel::gaussian(double amplitude, double sigma, int dim, double eps_cut) {
  return Kernel(KernelFamily::Gaussian, amplitude, sigma, dim, eps_cut);
}

Kernel Kernel::exponential(double amplitude, double sigma, int dim, double eps_cut) {
  return Kernel(KernelFamily::Exponential, amplitude, sigma, dim, eps_cut);
}

Kernel Kernel::constant(double amplitude, int dim) {
  return Kernel(KernelFamily::Constant, amplitude, 1.0, dim, 0.0);
}

double Kernel::value(double r) const {
  if (r < 0.0) throw std::invalid_argument("kernel: radius must be nonnegative");
  if (family_ == KernelFamily::Constant) return amplitude_;
  if (amplitude_ == 0.0) return 0.0;
  if (r > cutoff_) return 0.0;
  switch (family_) {
    case KernelFamily::Tophat:
      return amplitude_;
    case KernelFamily::Gaussian: {
      const double z = r / scale_;
      return amplitude_ * std::exp(-0.5 * z * z);
    }
    case KernelFamily::Exponential:
      return amplitude_ * std::exp(-r / scale_);
    case KernelFamily::Constant:
      break;
  }
  return 0.0;
}

double Kernel::l1_norm() const {
  if (family_ == KernelFamily::Constant) {
    throw std::invalid_argument("kernel: constant family has no L1 norm");
  }
  return l1_;
}

void Kernel::build_radius_table() {
  if (amplitude_ == 0.0 || cutoff_ <= 0.0) return;
  const int m = kRadiusTableIntervals;
  radius_cdf_.assign(m + 1, 0.0);
  const double h = cutoff_ / m;
  auto weight = [&](double r) {
    return (dim_ == 2) ? r * value(r) : value(r);
  };
  double prev = weight(0.0);
  for (int j = 1; j <= m; ++j) {
    const double cur = weight(j * h);
    radius_cdf_[j] = radius_cdf_[j - 1] + 0.5 * (prev + cur) * h;
    prev = cur;
  }
  const double total = radius_cdf_[m];
  for (double& c : radius_cdf_) c /= total;
}

double Kernel::sample_radius(double u) const {
  if (radius_cdf_.empty()) {
    throw std::logic_error("kernel: radial sampling needs a finite positive-mass profile");
  }
  u = std::clamp(u, 0.0, 1.0);
  const auto it = std::upper_bound(radius_cdf_.begin(), radius_cdf_.end(), u);
  const std::size_t j = std::min<std::size_t>(
      radius_cdf_.size() - 2,
      static_cast<std::size_t>(std::max<std::ptrdiff_t>(
          0, (it - radius_cdf_.begin()) - 1)));
  const double c0 = radius_cdf_[j];
  const double c1 = radius_cdf_[j + 1];
  const double h = cutoff_ / kRadiusTableIntervals;
  const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return (static_cast<double>(j) + frac) * h;
}

Background::Background(double level, double mod, int mode)
    : level_(level), mod_(mod), mode_(mode) {
  if (level < 0.0) {
    throw std::invalid_argument("background: level must be nonnegative");
  }
  if (std::abs(mod) > level) {
    throw std::invalid_argument(
        "background: modulation amplitude may not exceed the level "
        "(rates must stay nonnegative)");
  }
  if (mode < 1) {
    throw std::invalid_argument("background: cosine mode must be >= 1");
  }
}

Background Background::constant(double level) { return Background(level, 0.0, 1); }

Background Background::cosine(double level, double mod_amplitude, int mode) {
  return Background(level, mod_amplitude, mode);
}

double Background::value(const Position& x, const TorusWindow& w) const {
  if (mod_ == 0.0) return level_;
  return level_ + mod_ * std::cos(2.0 * kPi * mode_ * x[0] / w.side);
}

std::string to_string(CompetitionRegime r) {
  switch (r) {
    case CompetitionRegime::Long: return "long";
    case CompetitionRegime::Short: return "short";
    case CompetitionRegime::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::vector<double> default_probe_radii(const Kernel& a_plus,
                                        const Kernel& a_minus, int count) {
  double r_max = 0.0;
  for (const Kernel* k : {&a_plus, &a_minus}) {
    if (!k->is_zero() && std::isfinite(k->cutoff_radius())) {
      r_max = std::max(r_max, k->cutoff_radius());
    }
  }
  if (r_max <= 0.0) r_max = 1.0;
  r_max *= 2.0;
  const double r_min = r_max * 1e-3;
  std::vector<double> radii(count);
  // The origin is probed explicitly: ratio profiles monotone near zero take
  // their infimum there, which a log grid can never sample.
  radii[0] = 0.0;
  for (int i = 1; i < count; ++i) {
    const double t = (count <= 2) ? 1.0 : static_cast<double>(i - 1) / (count - 2);
    radii[i] = r_min * std::pow(r_max / r_min, t);
  }
  return radii;
}

CompetitionClass classify_competition(const Kernel& a_plus,
                                      const Kernel& a_minus,
                                      std::span<const double> probe_radii,
                                      double theta_floor) {
  if (a_plus.family() == KernelFamily::Constant ||
      a_minus.family() == KernelFamily::Constant) {
    throw std::invalid_argument("classify_competition: interaction kernels only");
  }
  if (a_plus.dimension() != a_minus.dimension()) {
    throw std::invalid_argument("classify_competition: dimension mismatch");
  }
  if (probe_radii.empty()) {
    throw std::invalid_argument("classify_competition: no probe radii");
  }

  if (a_plus.is_zero()) {
    // No attraction: any theta works vacuously.
    return {CompetitionRegime::Long, std::numeric_limits<double>::infinity()};
  }

  // Support comparison settles the clear-cut short case even between probes.
  if (a_plus.cutoff_radius() > a_minus.cutoff_radius()) {
    return {CompetitionRegime::Short, 0.0};
  }

  double theta = std::numeric_limits<double>::infinity();
  double r_at_min = 0.0;
  double r_plus_max = 0.0;  // largest probed radius where attraction acts
  bool any = false;
  for (double r : probe_radii) {
    const double ap = a_plus.value(r);
    if (ap <= 0.0) continue;
    any = true;
    r_plus_max = std::max(r_plus_max, r);
    const double am = a_minus.value(r);
    if (am == 0.0) return {CompetitionRegime::Short, 0.0};
    const double ratio = am / ap;
    if (ratio < theta) {
      theta = ratio;
      r_at_min = r;
    }
  }
  if (!any) {
    // Probes all missed the attraction support; cannot decide.
    return {CompetitionRegime::Indeterminate, 0.0};
  }
  if (theta >= theta_floor) {
    return {CompetitionRegime::Long, theta};
  }
  // Ratio collapses below the floor: short range if the collapse happens in
  // the outer part of the attraction support (the tail is what matters),
  // otherwise call it indeterminate.
  if (r_at_min >= 0.5 * r_plus_max) {
    return {CompetitionRegime::Short, theta};
  }
  return {CompetitionRegime::Indeterminate, theta};
}

CompetitionClass classify_competition(const Kernel& a_plus,
                                      const Kernel& a_minus) {
  const auto radii = default_probe_radii(a_plus, a_minus);
  return classify_competition(a_plus, a_minus, radii);
}

}  // namespace migsim
