#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hypolib/ext_real.hpp"

namespace hypolib {

// Absolute slack used when comparing grid coordinates against geometric
// thresholds (ball radii, cell faces). Grid coordinates are k*h and carry
// rounding error of a few ulps.
inline constexpr double kGeomTol = 1e-9;

struct AxisSpec {
  double lower = 0.0;
  double upper = 0.0;
  double spacing = 1.0;
};

// Finite uniform grid standing in for the closed set S. Every axis has the
// origin as a node and the origin is always a member. An optional mask
// selects a subset of the box grid. Members are enumerated in row-major
// order (last axis fastest); member indices are the canonical node ids used
// throughout the library.
class GridDomain {
 public:
  explicit GridDomain(std::vector<AxisSpec> axes);
  GridDomain(std::vector<AxisSpec> axes, const std::vector<bool>& mask);

  // Same [lower, upper] and spacing on every axis.
  static GridDomain uniform(std::size_t dim, double lower, double upper, double spacing);

  [[nodiscard]] std::size_t dim() const { return axes_.size(); }
  [[nodiscard]] const AxisSpec& axis(std::size_t i) const { return axes_[i]; }
  [[nodiscard]] std::size_t axis_count(std::size_t i) const { return counts_[i]; }
  [[nodiscard]] std::size_t node_count() const { return node_count_; }
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] bool has_mask() const { return members_.size() != node_count_; }

  [[nodiscard]] std::span<const double> point(std::size_t member) const {
    return {coords_.data() + member * dim(), dim()};
  }
  [[nodiscard]] std::span<const std::int64_t> offsets(std::size_t member) const {
    return {offsets_.data() + member * dim(), dim()};
  }

  // Member index of the node at x (within kGeomTol per axis), if any.
  [[nodiscard]] std::optional<std::size_t> find(std::span<const double> x) const;
  // Nearest member under the sup-norm; ties go to the lowest member index.
  [[nodiscard]] std::size_t nearest(std::span<const double> x) const;
  [[nodiscard]] std::size_t origin() const { return origin_; }

  [[nodiscard]] double linf_distance(std::size_t i, std::size_t j) const;
  [[nodiscard]] double linf_distance(std::size_t i, std::span<const double> x) const;
  [[nodiscard]] double squared_l2_distance(std::size_t i, std::size_t j) const;
  [[nodiscard]] double norm_inf(std::size_t i) const { return norms_[i]; }
  // Largest sup-norm over members.
  [[nodiscard]] double radius() const;
  // Product of spacings (Riemann weight of one node).
  [[nodiscard]] double cell_volume() const;

  friend bool operator==(const GridDomain& a, const GridDomain& b);

 private:
  void build(const std::vector<bool>* mask);

  std::vector<AxisSpec> axes_;
  std::vector<std::size_t> counts_;
  std::vector<std::int64_t> origin_steps_;  // node index of 0 on each axis
  std::size_t node_count_ = 0;
  std::vector<std::size_t> members_;        // member -> linear node id
  std::vector<std::int64_t> node_to_member_;  // linear node id -> member or -1
  std::vector<double> coords_;
  std::vector<std::int64_t> offsets_;
  std::vector<double> norms_;
  std::size_t origin_ = 0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

// Extended-real function sampled on the members of a GridDomain. On a
// finite S every such function is usc; the only requirement is a nonempty
// hypograph, i.e. at least one finite value.
class GridFn {
 public:
  GridFn(DomainPtr domain, std::vector<ExtReal> values);
  GridFn(const GridDomain& domain, std::vector<ExtReal> values);

  static GridFn constant(DomainPtr domain, double c);
  static GridFn from(DomainPtr domain, const std::function<ExtReal(std::span<const double>)>& fn);

  [[nodiscard]] const GridDomain& domain() const { return *domain_; }
  [[nodiscard]] const DomainPtr& domain_ptr() const { return domain_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<const ExtReal> values() const { return values_; }
  [[nodiscard]] ExtReal operator[](std::size_t member) const { return values_[member]; }

  // Value at the member node x; DomainError if x is not a member.
  [[nodiscard]] ExtReal at(std::span<const double> x) const;

  // Finite values as doubles, -inf kept as -inf.
  [[nodiscard]] std::vector<double> to_doubles() const;

 private:
  DomainPtr domain_;
  std::vector<ExtReal> values_;
};

bool same_domain(const GridFn& f, const GridFn& g);
// DomainError unless f and g live on the same grid.
void require_same_domain(const GridFn& f, const GridFn& g);

// gridfn_eval
ExtReal gridfn_eval(const GridFn& f, std::span<const double> x);

}  // namespace hypolib
