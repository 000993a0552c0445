#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace migsim {

// Points are stored as fixed-size arrays; simulations run in d = 1 or 2 and
// the unused component stays at zero.
using Position = std::array<double, 2>;

inline constexpr int kMaxDim = 2;

// Periodic cubic window [0, side)^d with the minimum-image metric.
struct TorusWindow {
  double side = 1.0;
  int dim = 2;

  double volume() const {
    return dim == 1 ? side : side * side;
  }

  // Maps a coordinate into [0, side); exact for inputs within a few periods.
  double wrap_coord(double x) const {
    x -= side * std::floor(x / side);
    if (x >= side) x -= side;  // guards the x == side rounding case
    if (x < 0.0) x = 0.0;
    return x;
  }

  Position wrap(Position p) const {
    for (int k = 0; k < dim; ++k) p[k] = wrap_coord(p[k]);
    for (int k = dim; k < kMaxDim; ++k) p[k] = 0.0;
    return p;
  }

  // Minimum-image distance between two wrapped points.
  double distance(const Position& a, const Position& b) const {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
      double d = std::fabs(a[k] - b[k]);
      if (d > 0.5 * side) d = side - d;
      s += d * d;
    }
    return std::sqrt(s);
  }

  bool contains(const Position& p) const {
    for (int k = 0; k < dim; ++k) {
      if (p[k] < 0.0 || p[k] >= side) return false;
    }
    return true;
  }
};

// Axis-aligned half-open box [lo, hi) inside the window; no wrap-around.
struct Box {
  Position lo{0.0, 0.0};
  Position hi{0.0, 0.0};

  double volume(int dim) const {
    double v = 1.0;
    for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
    return v;
  }

  bool contains(const Position& p, int dim) const {
    for (int k = 0; k < dim; ++k) {
      if (p[k] < lo[k] || p[k] >= hi[k]) return false;
    }
    return true;
  }

  bool valid(const TorusWindow& w) const {
    for (int k = 0; k < w.dim; ++k) {
      if (!(lo[k] >= 0.0 && lo[k] < hi[k] && hi[k] <= w.side)) return false;
    }
    return true;
  }
};

}  // namespace migsim
