#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypolib/grid.hpp"

namespace hypolib {

// Uniform partition of [-half_width, half_width]^n into cells_per_axis^n
// open boxes plus one exterior cell (the complement of the box). Cell ids
// are row-major over the per-axis cell index; the exterior cell is last.
class BoxPartition {
 public:
  BoxPartition(std::size_t dim, double half_width, std::size_t cells_per_axis);

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] double half_width() const { return half_width_; }
  [[nodiscard]] std::size_t cells_per_axis() const { return per_axis_; }
  [[nodiscard]] double width() const { return 2.0 * half_width_ / static_cast<double>(per_axis_); }
  [[nodiscard]] std::size_t box_cells() const { return box_cells_; }
  [[nodiscard]] std::size_t cell_count() const { return box_cells_ + 1; }
  [[nodiscard]] std::size_t exterior() const { return box_cells_; }

  // Ids of all cells whose closure contains x (faces within kGeomTol).
  [[nodiscard]] std::vector<std::size_t> closure_cells(std::span<const double> x) const;

  friend bool operator==(const BoxPartition&, const BoxPartition&) = default;

 private:
  std::size_t dim_;
  double half_width_;
  std::size_t per_axis_;
  std::size_t box_cells_;
};

// Zeroth-order epi-spline: one real per cell, lsc by the liminf rule, i.e.
// on shared faces the value is the minimum over adjacent cells.
class EpiSpline0 {
 public:
  EpiSpline0(BoxPartition partition, std::vector<double> cell_values);

  [[nodiscard]] const BoxPartition& partition() const { return partition_; }
  [[nodiscard]] std::span<const double> cell_values() const { return values_; }

  [[nodiscard]] double operator()(std::span<const double> x) const;

  // The usc function -s sampled on the members of d.
  [[nodiscard]] GridFn negated_on(DomainPtr d) const;

 private:
  BoxPartition partition_;
  std::vector<double> values_;
};

}  // namespace hypolib
