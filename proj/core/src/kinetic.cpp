#include "migsim/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

#include "migsim/errors.hpp"

namespace migsim {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_field(const DensityField& f) {
  if (f.dim != 1 && f.dim != 2) {
    throw std::invalid_argument("density field: dimension must be 1 or 2");
  }
  const std::size_t expect = (f.dim == 1)
                                 ? static_cast<std::size_t>(f.nodes)
                                 : static_cast<std::size_t>(f.nodes) * f.nodes;
  if (f.nodes < 2 || f.values.size() != expect) {
    throw std::invalid_argument("density field: inconsistent node count");
  }
  if (!(f.side > 0.0)) {
    throw std::invalid_argument("density field: side must be positive");
  }
}

}  // namespace

DensityField DensityField::constant(int dim, int nodes, double side,
                                    double value) {
  DensityField f;
  f.dim = dim;
  f.nodes = nodes;
  f.side = side;
  f.values.assign(dim == 1 ? std::size_t(nodes)
                           : std::size_t(nodes) * nodes,
                  value);
  check_field(f);
  return f;
}

double DensityField::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

double DensityField::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double DensityField::mean_value() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double DensityField::total_mass() const {
  const double h = spacing();
  const double cell = (dim == 1) ? h : h * h;
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell;
}

struct KernelLattice::Impl {
  int dim = 2;
  int n = 0;
  double side = 0.0;
  double h = 0.0;
  double mass = 0.0;
  std::size_t real_size = 0;
  std::size_t spec_size = 0;
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<double> kernel_spec_re;
  std::vector<double> kernel_spec_im;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (real) fftw_free(real);
    if (spec) fftw_free(spec);
  }
};

KernelLattice::KernelLattice(const Kernel& k, int dim, int nodes, double side)
    : impl_(new Impl) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("kernel lattice: dimension must be 1 or 2");
  }
  if (nodes < 2) {
    throw std::invalid_argument("kernel lattice: need at least 2 nodes per axis");
  }
  if (!(side > 0.0)) {
    throw std::invalid_argument("kernel lattice: side must be positive");
  }
  if (k.dimension() != dim) {
    throw std::invalid_argument("kernel lattice: kernel dimension mismatch");
  }
  if (!k.is_zero() && !std::isfinite(k.cutoff_radius())) {
    throw std::invalid_argument("kernel lattice: kernel must have a finite cutoff");
  }

  Impl& im = *impl_;
  im.dim = dim;
  im.n = nodes;
  im.side = side;
  im.h = side / nodes;
  im.real_size = (dim == 1) ? std::size_t(nodes)
                            : std::size_t(nodes) * nodes;
  im.spec_size = (dim == 1) ? std::size_t(nodes / 2 + 1)
                            : std::size_t(nodes) * (nodes / 2 + 1);

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    im.real = fftw_alloc_real(im.real_size);
    im.spec = fftw_alloc_complex(im.spec_size);
    if (dim == 1) {
      im.fwd = fftw_plan_dft_r2c_1d(nodes, im.real, im.spec, FFTW_ESTIMATE);
      im.bwd = fftw_plan_dft_c2r_1d(nodes, im.spec, im.real, FFTW_ESTIMATE);
    } else {
      im.fwd = fftw_plan_dft_r2c_2d(nodes, nodes, im.real, im.spec, FFTW_ESTIMATE);
      im.bwd = fftw_plan_dft_c2r_2d(nodes, nodes, im.spec, im.real, FFTW_ESTIMATE);
    }
  }

  // Kernel tabulated at minimum-image lattice displacements.
  auto axis_disp = [&](int i) {
    const int m = std::min(i, nodes - i);
    return m * im.h;
  };
  double sum = 0.0;
  if (dim == 1) {
    for (int i = 0; i < nodes; ++i) {
      const double v = k.value(axis_disp(i));
      im.real[i] = v;
      sum += v;
    }
  } else {
    for (int j = 0; j < nodes; ++j) {
      for (int i = 0; i < nodes; ++i) {
        const double dx = axis_disp(i);
        const double dy = axis_disp(j);
        const double v = k.value(std::sqrt(dx * dx + dy * dy));
        im.real[std::size_t(j) * nodes + i] = v;
        sum += v;
      }
    }
  }
  const double cell = (dim == 1) ? im.h : im.h * im.h;
  im.mass = sum * cell;

  fftw_execute(im.fwd);
  im.kernel_spec_re.resize(im.spec_size);
  im.kernel_spec_im.resize(im.spec_size);
  for (std::size_t s = 0; s < im.spec_size; ++s) {
    im.kernel_spec_re[s] = im.spec[s][0];
    im.kernel_spec_im[s] = im.spec[s][1];
  }
}

KernelLattice::~KernelLattice() = default;

int KernelLattice::dim() const { return impl_->dim; }
int KernelLattice::nodes() const { return impl_->n; }
double KernelLattice::side() const { return impl_->side; }
double KernelLattice::lattice_mass() const { return impl_->mass; }

void KernelLattice::convolve(const DensityField& in, DensityField& out) {
  check_field(in);
  Impl& im = *impl_;
  if (in.dim != im.dim || in.nodes != im.n || in.side != im.side) {
    throw std::invalid_argument("kernel lattice: field geometry mismatch");
  }
  std::memcpy(im.real, in.values.data(), im.real_size * sizeof(double));
  fftw_execute(im.fwd);

  // Unnormalized transforms: scale by h^dim for the quadrature weight and
  // 1/N for the inverse.
  const double cell = (im.dim == 1) ? im.h : im.h * im.h;
  const double scale = cell / static_cast<double>(im.real_size);
  for (std::size_t s = 0; s < im.spec_size; ++s) {
    const double re = im.spec[s][0];
    const double imag = im.spec[s][1];
    const double kr = im.kernel_spec_re[s];
    const double ki = im.kernel_spec_im[s];
    im.spec[s][0] = (re * kr - imag * ki) * scale;
    im.spec[s][1] = (re * ki + imag * kr) * scale;
  }
  fftw_execute(im.bwd);

  out.dim = in.dim;
  out.nodes = in.nodes;
  out.side = in.side;
  out.time = in.time;
  out.values.resize(im.real_size);
  std::memcpy(out.values.data(), im.real, im.real_size * sizeof(double));
}

DensityField circular_convolve(const DensityField& f, const Kernel& k) {
  KernelLattice lat(k, f.dim, f.nodes, f.side);
  DensityField out;
  lat.convolve(f, out);
  return out;
}

KineticSolver::KineticSolver(const ModelParams& params, int nodes)
    : params_(&params), nodes_(nodes) {
  params.validate();
  if (nodes < 4) {
    throw std::invalid_argument("kinetic: need at least 4 nodes per axis");
  }
  const int dim = params.dim();
  const double side = params.window.side;
  const std::size_t total = (dim == 1) ? std::size_t(nodes)
                                       : std::size_t(nodes) * nodes;
  b_plus_.resize(total);
  b_minus_.resize(total);
  const double h = side / nodes;
  growth_sup_ = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Position x{0.0, 0.0};
    if (dim == 1) {
      x[0] = (static_cast<double>(idx) + 0.5) * h;
    } else {
      x[0] = (static_cast<double>(idx % nodes) + 0.5) * h;
      x[1] = (static_cast<double>(idx / nodes) + 0.5) * h;
    }
    b_plus_[idx] = params.b_plus.value(x, params.window);
    b_minus_[idx] = params.b_minus.value(x, params.window);
    growth_sup_ = std::max(growth_sup_, std::fabs(b_plus_[idx] - b_minus_[idx]));
  }
  if (!params.a_plus.is_zero()) {
    lat_plus_ = std::make_unique<KernelLattice>(params.a_plus, dim, nodes, side);
  }
  if (!params.a_minus.is_zero()) {
    lat_minus_ = std::make_unique<KernelLattice>(params.a_minus, dim, nodes, side);
  }
}

KineticSolver::~KineticSolver() = default;

double KineticSolver::a_plus_lattice_mass() const {
  return lat_plus_ ? lat_plus_->lattice_mass() : 0.0;
}

double KineticSolver::a_minus_lattice_mass() const {
  return lat_minus_ ? lat_minus_->lattice_mass() : 0.0;
}

void KineticSolver::rhs(const DensityField& rho, DensityField& out) {
  check_field(rho);
  if (rho.dim != params_->dim() || rho.nodes != nodes_ ||
      rho.side != params_->window.side) {
    throw std::invalid_argument("kinetic: field geometry mismatch");
  }
  if (lat_plus_) lat_plus_->convolve(rho, conv_plus_);
  if (lat_minus_) lat_minus_->convolve(rho, conv_minus_);

  out.dim = rho.dim;
  out.nodes = rho.nodes;
  out.side = rho.side;
  out.time = rho.time;
  out.values.resize(rho.values.size());
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    double v = (b_plus_[i] - b_minus_[i]) * rho.values[i];
    if (lat_plus_) v += conv_plus_.values[i];
    if (lat_minus_) v -= rho.values[i] * conv_minus_.values[i];
    out.values[i] = v;
  }
}

DensityField KineticSolver::rhs(const DensityField& rho) {
  DensityField out;
  rhs(rho, out);
  return out;
}

void KineticSolver::rk4_step(const DensityField& rho, double dt,
                             DensityField& out) {
  const std::size_t n = rho.values.size();
  rhs(rho, k1_);
  stage_ = rho;
  for (std::size_t i = 0; i < n; ++i) {
    stage_.values[i] = rho.values[i] + 0.5 * dt * k1_.values[i];
  }
  rhs(stage_, k2_);
  for (std::size_t i = 0; i < n; ++i) {
    stage_.values[i] = rho.values[i] + 0.5 * dt * k2_.values[i];
  }
  rhs(stage_, k3_);
  for (std::size_t i = 0; i < n; ++i) {
    stage_.values[i] = rho.values[i] + dt * k3_.values[i];
  }
  rhs(stage_, k4_);
  out = rho;
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = rho.values[i] +
                    dt / 6.0 *
                        (k1_.values[i] + 2.0 * k2_.values[i] +
                         2.0 * k3_.values[i] + k4_.values[i]);
  }
}

KineticSolver::Result KineticSolver::integrate(
    const DensityField& rho0, double t_end,
    std::span<const double> snapshot_times, const KineticOptions& opts) {
  check_field(rho0);
  if (rho0.dim != params_->dim() || rho0.nodes != nodes_ ||
      rho0.side != params_->window.side) {
    throw std::invalid_argument("kinetic: initial field geometry mismatch");
  }
  if (rho0.min_value() < 0.0) {
    throw std::invalid_argument("kinetic: initial density must be nonnegative");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("kinetic: t_end must be finite and nonnegative");
  }
  if (!(opts.dt > 0.0)) {
    throw std::invalid_argument("kinetic: dt must be positive");
  }
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
    const double t = snapshot_times[i];
    if (!(t >= 0.0) || t > t_end) {
      throw std::invalid_argument("kinetic: snapshot times must lie in [0, t_end]");
    }
    if (i > 0 && !(t > snapshot_times[i - 1])) {
      throw std::invalid_argument("kinetic: snapshot times must be strictly increasing");
    }
  }

  const double a_plus_mass = a_plus_lattice_mass();
  const double a_minus_mass = a_minus_lattice_mass();
  const std::size_t n_nodes = rho0.values.size();
  const auto clip_limit = static_cast<std::uint64_t>(
      opts.clip_fraction_limit * static_cast<double>(n_nodes));

  Result res;
  DensityField rho = rho0;
  rho.time = 0.0;
  DensityField candidate;

  auto push_trajectory = [&](const DensityField& f) {
    res.trajectory.push_back(
        {f.time, f.mean_value(), f.min_value(), f.max_value()});
  };
  push_trajectory(rho);

  std::size_t si = 0;
  while (si < snapshot_times.size() && snapshot_times[si] <= 0.0) {
    DensityField snap = rho;
    snap.time = snapshot_times[si];
    res.snapshots.push_back(std::move(snap));
    ++si;
  }

  double t = 0.0;
  const double t_eps = 1e-12 * std::max(1.0, t_end);
  while (t < t_end - t_eps) {
    // Adaptive stability ceiling from the current amplitude.
    double dt = opts.dt;
    if (opts.enforce_stability_bound) {
      const double rate = growth_sup_ + a_plus_mass +
                          4.0 * a_minus_mass * std::max(0.0, rho.max_value());
      if (rate > 0.0) dt = std::min(dt, 0.5 / rate);
    }
    const double boundary =
        (si < snapshot_times.size()) ? snapshot_times[si] : t_end;
    dt = std::min(dt, boundary - t);

    // Positivity-driven halving.
    for (;;) {
      if (dt < opts.dt_min) {
        throw stiffness_error(
            "kinetic: step size collapsed below dt_min while holding positivity");
      }
      rk4_step(rho, dt, candidate);
      if (candidate.min_value() >= opts.negative_floor) break;
      dt *= 0.5;
      ++res.stats.halvings;
    }

    std::uint64_t clipped = 0;
    for (double& v : candidate.values) {
      if (v < 0.0) {
        v = 0.0;
        ++clipped;
      }
    }
    if (clipped > clip_limit) {
      throw positivity_error(
          "kinetic: clipped " + std::to_string(clipped) + " of " +
          std::to_string(n_nodes) + " nodes in one step");
    }
    res.stats.clipped_nodes += clipped;
    ++res.stats.steps;

    t += dt;
    rho = std::move(candidate);
    rho.time = t;
    push_trajectory(rho);

    while (si < snapshot_times.size() && t >= snapshot_times[si] - t_eps) {
      DensityField snap = rho;
      snap.time = snapshot_times[si];
      res.snapshots.push_back(std::move(snap));
      ++si;
    }
  }
  return res;
}

HomogeneousFixedPoint homogeneous_fixed_point(double b_plus, double b_minus,
                                              double a_plus_mass,
                                              double a_minus_mass) {
  const double growth = b_plus - b_minus + a_plus_mass;
  if (growth <= 0.0) {
    return {HomogeneousFixedPoint::Kind::Extinct, 0.0};
  }
  if (a_minus_mass <= 0.0) {
    return {HomogeneousFixedPoint::Kind::Unbounded,
            std::numeric_limits<double>::infinity()};
  }
  return {HomogeneousFixedPoint::Kind::Value, growth / a_minus_mass};
}

HomogeneousFixedPoint homogeneous_fixed_point(const ModelParams& params) {
  if (!params.b_plus.is_constant() || !params.b_minus.is_constant()) {
    throw std::invalid_argument(
        "fixed point: requires spatially constant backgrounds");
  }
  return homogeneous_fixed_point(params.b_plus.level(), params.b_minus.level(),
                                 params.attraction_mass(),
                                 params.competition_mass());
}

double noninteracting_mean_density(double b_plus, double b_minus, double rho0,
                                   double t) {
  if (b_minus == 0.0) return rho0 + b_plus * t;
  const double eq = b_plus / b_minus;
  return eq + (rho0 - eq) * std::exp(-b_minus * t);
}

}  // namespace migsim
