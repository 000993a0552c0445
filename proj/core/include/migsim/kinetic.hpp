#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "migsim/model.hpp"

namespace migsim {

// Density on a periodic lattice: nodes^dim cell centers, row-major.
struct DensityField {
  int dim = 2;
  int nodes = 0;  // per axis
  double side = 0.0;
  double time = 0.0;
  std::vector<double> values;

  double spacing() const { return side / nodes; }
  std::size_t size() const { return values.size(); }

  static DensityField constant(int dim, int nodes, double side, double value);

  double min_value() const;
  double max_value() const;
  double mean_value() const;
  double total_mass() const;  // sum times h^dim
};

// Radial kernel tabulated at lattice displacements (minimum image), with a
// cached spectrum for periodic convolution.  One instance owns its FFT
// plans and buffers; plan creation is serialized internally because the
// planner is not thread-safe.
class KernelLattice {
 public:
  KernelLattice(const Kernel& k, int dim, int nodes, double side);
  ~KernelLattice();
  KernelLattice(const KernelLattice&) = delete;
  KernelLattice& operator=(const KernelLattice&) = delete;

  int dim() const;
  int nodes() const;
  double side() const;

  // Sum of the tabulated kernel times h^dim; the discrete stand-in for the
  // L1 mass, off by the tabulation error.
  double lattice_mass() const;

  // out = circular convolution of `in` with the tabulated kernel, scaled by
  // h^dim so it approximates the continuum convolution.
  void convolve(const DensityField& in, DensityField& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper.
DensityField circular_convolve(const DensityField& f, const Kernel& k);

struct KineticOptions {
  double dt = 0.01;
  // Candidate steps dipping below this trigger halving; accepted values in
  // [floor, 0) are clipped to zero and counted.
  double negative_floor = -1e-6;
  // Clipping more than this fraction of nodes in one step is a failure.
  double clip_fraction_limit = 1e-3;
  double dt_min = 1e-12;
  bool enforce_stability_bound = true;
};

struct KineticStepStats {
  std::uint64_t steps = 0;
  std::uint64_t halvings = 0;
  std::uint64_t clipped_nodes = 0;
};

// Deterministic grid solver for the density evolution
//   d rho / dt = (b+ - b-) rho + (a+ * rho) - rho (a- * rho)
// with periodic convolutions.  Fixed-step RK4 with positivity-driven step
// halving and an adaptive stability bound on the step size.
class KineticSolver {
 public:
  KineticSolver(const ModelParams& params, int nodes);
  ~KineticSolver();
  KineticSolver(const KineticSolver&) = delete;
  KineticSolver& operator=(const KineticSolver&) = delete;

  const ModelParams& params() const { return *params_; }
  int nodes() const { return nodes_; }

  double a_plus_lattice_mass() const;
  double a_minus_lattice_mass() const;

  void rhs(const DensityField& rho, DensityField& out);
  DensityField rhs(const DensityField& rho);

  struct Result {
    std::vector<DensityField> snapshots;
    // One row per accepted step (plus the initial state):
    // time, mean, min, max.
    std::vector<std::array<double, 4>> trajectory;
    KineticStepStats stats;
  };

  Result integrate(const DensityField& rho0, double t_end,
                   std::span<const double> snapshot_times,
                   const KineticOptions& opts = {});

 private:
  void rk4_step(const DensityField& rho, double dt, DensityField& out);

  const ModelParams* params_;
  int nodes_;
  std::vector<double> b_plus_;
  std::vector<double> b_minus_;
  double growth_sup_;  // sup |b+ - b-|
  std::unique_ptr<KernelLattice> lat_plus_;
  std::unique_ptr<KernelLattice> lat_minus_;
  DensityField conv_plus_, conv_minus_;          // rhs scratch
  DensityField k1_, k2_, k3_, k4_, stage_;       // rk4 scratch
};

struct HomogeneousFixedPoint {
  enum class Kind { Value, Extinct, Unbounded };
  Kind kind = Kind::Extinct;
  double density = 0.0;
};

// Stationary spatially constant density of the evolution above with the
// given masses: (b+ - b- + A+) / A-.  Extinct when the net growth is
// nonpositive, Unbounded when growth is positive with no competition.
HomogeneousFixedPoint homogeneous_fixed_point(double b_plus, double b_minus,
                                              double a_plus_mass,
                                              double a_minus_mass);

// Same from model parameters (constant backgrounds required).
HomogeneousFixedPoint homogeneous_fixed_point(const ModelParams& params);

// Mean density of the interaction-free process started at rho0:
// the linear balance law rho' = b+ - b- rho in closed form.
double noninteracting_mean_density(double b_plus, double b_minus, double rho0,
                                   double t);

}  // namespace migsim
