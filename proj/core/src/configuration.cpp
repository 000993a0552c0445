#include "migsim/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace migsim {

namespace {
constexpr int kMaxCellsPerAxis = 256;
constexpr int kDefaultCellsPerAxis = 8;  // when there are no interactions
}  // namespace

Configuration::Configuration(const TorusWindow& window, double min_cell_side)
    : window_(window) {
  if (window_.dim != 1 && window_.dim != 2) {
    throw std::invalid_argument("configuration: dimension must be 1 or 2");
  }
  if (min_cell_side < 0.0) {
    throw std::invalid_argument("configuration: cell bound must be nonnegative");
  }
  int n;
  if (min_cell_side > 0.0) {
    n = static_cast<int>(std::floor(window_.side / min_cell_side));
    n = std::clamp(n, 1, kMaxCellsPerAxis);
  } else {
    n = kDefaultCellsPerAxis;
  }
  cells_per_axis_ = n;
  cell_side_ = window_.side / n;
  const std::size_t total = (window_.dim == 1)
                                ? static_cast<std::size_t>(n)
                                : static_cast<std::size_t>(n) * n;
  cells_.resize(total);
}

std::uint32_t Configuration::cell_of(const Position& p) const {
  auto axis = [&](double x) {
    int i = static_cast<int>(x / cell_side_);
    if (i >= cells_per_axis_) i = cells_per_axis_ - 1;
    if (i < 0) i = 0;
    return i;
  };
  const int i0 = axis(p[0]);
  if (window_.dim == 1) return static_cast<std::uint32_t>(i0);
  const int i1 = axis(p[1]);
  return static_cast<std::uint32_t>(i1 * cells_per_axis_ + i0);
}

std::uint64_t Configuration::insert(const Position& p) {
  const Position q = window_.wrap(p);
  const std::uint32_t cell = cell_of(q);
  const std::uint32_t dense = static_cast<std::uint32_t>(slots_.size());
  const std::uint64_t id = next_id_++;
  slots_.push_back(Slot{id, q, cell});
  cells_[cell].push_back(dense);
  by_id_.emplace(id, dense);
  return id;
}

void Configuration::cell_erase(std::uint32_t cell, std::uint32_t dense) {
  auto& list = cells_[cell];
  for (auto& entry : list) {
    if (entry == dense) {
      entry = list.back();
      list.pop_back();
      return;
    }
  }
  throw std::logic_error("configuration: cell index corrupted");
}

std::size_t Configuration::remove(std::uint64_t id) {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw std::invalid_argument("configuration: no such id");
  }
  const std::uint32_t dense = it->second;
  by_id_.erase(it);
  cell_erase(slots_[dense].cell, dense);

  const std::uint32_t last = static_cast<std::uint32_t>(slots_.size() - 1);
  if (dense != last) {
    // Move the last slot into the hole and repoint its cell entry and id.
    cell_erase(slots_[last].cell, last);
    slots_[dense] = slots_[last];
    cells_[slots_[dense].cell].push_back(dense);
    by_id_[slots_[dense].id] = dense;
  }
  slots_.pop_back();
  return dense;
}

bool Configuration::contains_id(std::uint64_t id) const {
  return by_id_.count(id) != 0;
}

std::size_t Configuration::dense_index(std::uint64_t id) const {
  const auto it = by_id_.find(id);
  if (it == by_id_.end()) {
    throw std::invalid_argument("configuration: no such id");
  }
  return it->second;
}

const Position& Configuration::position(std::uint64_t id) const {
  return slots_[dense_index(id)].pos;
}

void Configuration::neighbors_within(const Position& x, double radius,
                                     std::vector<Neighbor>& out,
                                     std::optional<std::uint64_t> exclude) const {
  out.clear();
  if (radius < 0.0) {
    throw std::invalid_argument("configuration: radius must be nonnegative");
  }
  if (radius > cell_side_ * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "configuration: query radius exceeds the cell edge");
  }
  if (slots_.empty()) return;

  const Position q = window_.wrap(x);
  auto axis = [&](double v) {
    int i = static_cast<int>(v / cell_side_);
    return std::min(i, cells_per_axis_ - 1);
  };
  const int n = cells_per_axis_;
  const int c0 = axis(q[0]);
  const int c1 = (window_.dim == 2) ? axis(q[1]) : 0;

  // 3^d neighborhood with wrap; duplicates appear when n < 3, so visited
  // cells are tracked in a tiny fixed array.
  std::uint32_t visited[9];
  int visited_n = 0;
  const int d1_lo = (window_.dim == 2) ? -1 : 0;
  const int d1_hi = (window_.dim == 2) ? 1 : 0;
  for (int d1 = d1_lo; d1 <= d1_hi; ++d1) {
    for (int d0 = -1; d0 <= 1; ++d0) {
      const int i0 = (c0 + d0 + n) % n;
      const int i1 = (c1 + d1 + n) % n;
      const std::uint32_t cell = (window_.dim == 1)
                                     ? static_cast<std::uint32_t>(i0)
                                     : static_cast<std::uint32_t>(i1 * n + i0);
      bool seen = false;
      for (int k = 0; k < visited_n; ++k) {
        if (visited[k] == cell) { seen = true; break; }
      }
      if (seen) continue;
      visited[visited_n++] = cell;

      for (const std::uint32_t dense : cells_[cell]) {
        const Slot& s = slots_[dense];
        if (exclude && s.id == *exclude) continue;
        const double dist = window_.distance(q, s.pos);
        if (dist <= radius) out.push_back(Neighbor{dense, s.id, dist});
      }
    }
  }
}

std::size_t Configuration::count_in_box(const Box& box) const {
  std::size_t n = 0;
  for (const Slot& s : slots_) {
    if (box.contains(s.pos, window_.dim)) ++n;
  }
  return n;
}

std::vector<Position> Configuration::points() const {
  std::vector<Position> out;
  out.reserve(slots_.size());
  for (const Slot& s : slots_) out.push_back(s.pos);
  return out;
}

std::vector<std::pair<std::uint64_t, Position>> Configuration::points_with_ids() const {
  std::vector<std::pair<std::uint64_t, Position>> out;
  out.reserve(slots_.size());
  for (const Slot& s : slots_) out.emplace_back(s.id, s.pos);
  return out;
}

bool Configuration::cells_consistent() const {
  std::size_t listed = 0;
  for (std::size_t cell = 0; cell < cells_.size(); ++cell) {
    for (const std::uint32_t dense : cells_[cell]) {
      if (dense >= slots_.size()) return false;
      if (slots_[dense].cell != cell) return false;
      if (cell_of(slots_[dense].pos) != cell) return false;
      ++listed;
    }
  }
  if (listed != slots_.size()) return false;
  for (std::size_t dense = 0; dense < slots_.size(); ++dense) {
    const auto it = by_id_.find(slots_[dense].id);
    if (it == by_id_.end() || it->second != dense) return false;
  }
  return by_id_.size() == slots_.size();
}

}  // namespace migsim
