#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "migsim/geometry.hpp"

namespace migsim {

// Finite point configuration on the torus.
//
// Points live in dense slots (swap-with-last removal) so per-particle state
// kept by callers can mirror the slot order exactly; every point also has a
// stable id drawn from a monotone counter that never recycles.  A uniform
// cell grid with edge >= the largest interaction range makes range queries
// a 3^d cell scan.
class Configuration {
 public:
  // min_cell_side: lower bound for the cell edge, normally the largest
  // interaction cutoff; pass 0 when there are no interactions.
  Configuration(const TorusWindow& window, double min_cell_side);

  const TorusWindow& window() const { return window_; }
  double cell_side() const { return cell_side_; }
  int cells_per_axis() const { return cells_per_axis_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }

  // Total number of inserts ever performed; also the next id to be issued.
  std::uint64_t generation_counter() const { return next_id_; }

  // Inserts a point (wrapped into the window) and returns its id.
  std::uint64_t insert(const Position& p);

  // Removes by id.  The last slot is swapped into the vacated dense index,
  // which is returned so parallel arrays can mirror the move.
  std::size_t remove(std::uint64_t id);

  bool contains_id(std::uint64_t id) const;
  std::size_t dense_index(std::uint64_t id) const;
  std::uint64_t id_at(std::size_t dense) const { return slots_[dense].id; }
  const Position& position_at(std::size_t dense) const { return slots_[dense].pos; }
  const Position& position(std::uint64_t id) const;

  struct Neighbor {
    std::size_t dense;
    std::uint64_t id;
    double dist;
  };

  // Collects all points within `radius` of x (minimum-image metric) into
  // `out` (cleared first), optionally excluding one id.  The radius must
  // not exceed the cell edge; that is what the 3^d scan covers.
  void neighbors_within(const Position& x, double radius,
                        std::vector<Neighbor>& out,
                        std::optional<std::uint64_t> exclude = std::nullopt) const;

  // Number of points inside a half-open box (plain membership scan).
  std::size_t count_in_box(const Box& box) const;

  std::vector<Position> points() const;
  std::vector<std::pair<std::uint64_t, Position>> points_with_ids() const;

  // Verifies the cell index against a from-scratch rebuild; for tests.
  bool cells_consistent() const;

 private:
  struct Slot {
    std::uint64_t id;
    Position pos;
    std::uint32_t cell;
  };

  std::uint32_t cell_of(const Position& p) const;
  void cell_erase(std::uint32_t cell, std::uint32_t dense);

  TorusWindow window_;
  double cell_side_;
  int cells_per_axis_;
  std::vector<Slot> slots_;
  std::vector<std::vector<std::uint32_t>> cells_;    // dense indices per cell
  std::unordered_map<std::uint64_t, std::uint32_t> by_id_;  // id -> dense
  std::uint64_t next_id_ = 0;
};

}  // namespace migsim
