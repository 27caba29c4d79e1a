#include "hypolib/epispline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "hypolib/error.hpp"

namespace hypolib {

BoxPartition::BoxPartition(std::size_t dim, double half_width, std::size_t cells_per_axis)
    : dim_(dim), half_width_(half_width), per_axis_(cells_per_axis), box_cells_(1) {
  if (dim_ == 0) throw DomainError("partition dimension must be positive");
  if (!(half_width_ > 0.0) || !std::isfinite(half_width_)) throw DomainError("partition half-width must be positive");
  if (per_axis_ == 0) throw DomainError("partition needs at least one cell per axis");
  for (std::size_t i = 0; i < dim_; ++i) {
    if (box_cells_ > std::numeric_limits<std::size_t>::max() / per_axis_) {
      throw DomainError("partition has too many cells");
    }
    box_cells_ *= per_axis_;
  }
}

std::vector<std::size_t> BoxPartition::closure_cells(std::span<const double> x) const {
  const double w = width();
  bool on_or_outside_box = false;
  bool strictly_outside = false;
  // Per-axis candidate cell indices (at most two: both sides of a face).
  std::vector<std::array<std::int64_t, 2>> cand(dim_);
  std::vector<int> ncand(dim_, 0);
  const auto last = static_cast<std::int64_t>(per_axis_) - 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    const double xi = x[i];
    if (std::abs(xi) > half_width_ + kGeomTol) {
      strictly_outside = true;
      break;
    }
    if (std::abs(std::abs(xi) - half_width_) <= kGeomTol) on_or_outside_box = true;
    const double t = (xi + half_width_) / w;
    const double r = std::round(t);
    if (std::abs(t * w - r * w) <= kGeomTol) {
      // On a face: cells r-1 and r (clipped to the box).
      const auto k = static_cast<std::int64_t>(r);
      if (k - 1 >= 0 && k - 1 <= last) cand[i][ncand[i]++] = k - 1;
      if (k >= 0 && k <= last) cand[i][ncand[i]++] = k;
    } else {
      const auto k = std::clamp(static_cast<std::int64_t>(std::floor(t)), std::int64_t{0}, last);
      cand[i][ncand[i]++] = k;
    }
  }
  std::vector<std::size_t> out;
  if (strictly_outside) {
    out.push_back(exterior());
    return out;
  }
  // Cartesian product of per-axis candidates.
  std::vector<int> pick(dim_, 0);
  bool done = false;
  while (!done) {
    std::size_t id = 0;
    for (std::size_t i = 0; i < dim_; ++i) id = id * per_axis_ + static_cast<std::size_t>(cand[i][pick[i]]);
    out.push_back(id);
    done = true;
    for (std::size_t a = dim_; a-- > 0;) {
      if (++pick[a] < ncand[a]) {
        done = false;
        break;
      }
      pick[a] = 0;
    }
  }
  if (on_or_outside_box) out.push_back(exterior());
  std::sort(out.begin(), out.end());
  return out;
}

EpiSpline0::EpiSpline0(BoxPartition partition, std::vector<double> cell_values)
    : partition_(std::move(partition)), values_(std::move(cell_values)) {
  if (values_.size() != partition_.cell_count()) {
    throw DomainError("epi-spline needs one value per cell (" + std::to_string(partition_.cell_count()) + ")");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("epi-spline cell values must be finite");
  }
}

double EpiSpline0::operator()(std::span<const double> x) const {
  if (x.size() != partition_.dim()) throw DomainError("point dimension does not match partition");
  double v = kInf;
  for (std::size_t c : partition_.closure_cells(x)) v = std::min(v, values_[c]);
  return v;
}

GridFn EpiSpline0::negated_on(DomainPtr d) const {
  std::vector<ExtReal> values(d->size());
  for (std::size_t m = 0; m < d->size(); ++m) values[m] = -(*this)(d->point(m));
  return GridFn(std::move(d), std::move(values));
}

}  // namespace hypolib
