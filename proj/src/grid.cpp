#include "hypolib/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypolib/error.hpp"

namespace hypolib {

namespace {

// Rounds v to the nearest integer when it is within a relative tolerance.
std::optional<std::int64_t> as_integer(double v) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-7 * std::max(1.0, std::abs(v))) return std::nullopt;
  return static_cast<std::int64_t>(r);
}

}  // namespace

GridDomain::GridDomain(std::vector<AxisSpec> axes) : axes_(std::move(axes)) { build(nullptr); }

GridDomain::GridDomain(std::vector<AxisSpec> axes, const std::vector<bool>& mask) : axes_(std::move(axes)) {
  build(&mask);
}

GridDomain GridDomain::uniform(std::size_t dim, double lower, double upper, double spacing) {
  return GridDomain(std::vector<AxisSpec>(dim, AxisSpec{lower, upper, spacing}));
}

void GridDomain::build(const std::vector<bool>* mask) {
  if (axes_.empty()) throw DomainError("grid domain needs at least one axis");
  const std::size_t n = axes_.size();
  counts_.resize(n);
  origin_steps_.resize(n);
  node_count_ = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const AxisSpec& a = axes_[i];
    if (!(a.spacing > 0.0) || !std::isfinite(a.spacing)) {
      throw DomainError("axis " + std::to_string(i) + ": spacing must be positive and finite");
    }
    if (!(a.lower <= 0.0 && a.upper >= 0.0)) {
      throw DomainError("axis " + std::to_string(i) + ": range must contain the origin");
    }
    const auto below = as_integer(-a.lower / a.spacing);
    const auto above = as_integer(a.upper / a.spacing);
    if (!below || !above) {
      throw DomainError("axis " + std::to_string(i) + ": origin is not a grid node (bounds not multiples of spacing)");
    }
    origin_steps_[i] = *below;
    counts_[i] = static_cast<std::size_t>(*below + *above + 1);
    node_count_ *= counts_[i];
    // Normalize bounds to exact multiples of the spacing.
    axes_[i].lower = -static_cast<double>(*below) * a.spacing;
    axes_[i].upper = static_cast<double>(*above) * a.spacing;
  }
  if (mask != nullptr && mask->size() != node_count_) {
    throw DomainError("mask size " + std::to_string(mask->size()) + " does not match node count " +
                      std::to_string(node_count_));
  }

  node_to_member_.assign(node_count_, -1);
  members_.clear();
  for (std::size_t id = 0; id < node_count_; ++id) {
    if (mask == nullptr || (*mask)[id]) {
      node_to_member_[id] = static_cast<std::int64_t>(members_.size());
      members_.push_back(id);
    }
  }

  coords_.resize(members_.size() * n);
  offsets_.resize(members_.size() * n);
  norms_.resize(members_.size());
  for (std::size_t m = 0; m < members_.size(); ++m) {
    std::size_t rest = members_[m];
    double norm = 0.0;
    for (std::size_t i = n; i-- > 0;) {
      const auto k = static_cast<std::int64_t>(rest % counts_[i]);
      rest /= counts_[i];
      const std::int64_t off = k - origin_steps_[i];
      offsets_[m * n + i] = off;
      coords_[m * n + i] = static_cast<double>(off) * axes_[i].spacing;
      norm = std::max(norm, std::abs(coords_[m * n + i]));
    }
    norms_[m] = norm;
  }

  std::size_t origin_id = 0;
  for (std::size_t i = 0; i < n; ++i) origin_id = origin_id * counts_[i] + static_cast<std::size_t>(origin_steps_[i]);
  if (node_to_member_[origin_id] < 0) throw DomainError("the origin must be a member node");
  origin_ = static_cast<std::size_t>(node_to_member_[origin_id]);
}

std::optional<std::size_t> GridDomain::find(std::span<const double> x) const {
  if (x.size() != dim()) return std::nullopt;
  std::size_t id = 0;
  for (std::size_t i = 0; i < dim(); ++i) {
    const double steps = x[i] / axes_[i].spacing;
    const double r = std::round(steps);
    if (std::abs(x[i] - r * axes_[i].spacing) > kGeomTol * std::max(1.0, std::abs(x[i]))) return std::nullopt;
    const auto k = static_cast<std::int64_t>(r) + origin_steps_[i];
    if (k < 0 || k >= static_cast<std::int64_t>(counts_[i])) return std::nullopt;
    id = id * counts_[i] + static_cast<std::size_t>(k);
  }
  const std::int64_t m = node_to_member_[id];
  if (m < 0) return std::nullopt;
  return static_cast<std::size_t>(m);
}

std::size_t GridDomain::nearest(std::span<const double> x) const {
  if (x.size() != dim()) throw DomainError("point dimension does not match domain");
  if (auto hit = find(x)) return *hit;
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t m = 0; m < size(); ++m) {
    const double d = linf_distance(m, x);
    if (d < best_d) {
      best_d = d;
      best = m;
    }
  }
  return best;
}

double GridDomain::linf_distance(std::size_t i, std::size_t j) const {
  const std::size_t n = dim();
  double d = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const std::int64_t k = offsets_[i * n + a] - offsets_[j * n + a];
    d = std::max(d, static_cast<double>(k < 0 ? -k : k) * axes_[a].spacing);
  }
  return d;
}

double GridDomain::linf_distance(std::size_t i, std::span<const double> x) const {
  double d = 0.0;
  const auto p = point(i);
  for (std::size_t a = 0; a < dim(); ++a) d = std::max(d, std::abs(p[a] - x[a]));
  return d;
}

double GridDomain::squared_l2_distance(std::size_t i, std::size_t j) const {
  const std::size_t n = dim();
  double s = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double d = static_cast<double>(offsets_[i * n + a] - offsets_[j * n + a]) * axes_[a].spacing;
    s += d * d;
  }
  return s;
}

double GridDomain::radius() const { return *std::max_element(norms_.begin(), norms_.end()); }

double GridDomain::cell_volume() const {
  double v = 1.0;
  for (const auto& a : axes_) v *= a.spacing;
  return v;
}

bool operator==(const GridDomain& a, const GridDomain& b) {
  if (&a == &b) return true;
  if (a.dim() != b.dim() || a.node_count_ != b.node_count_ || a.members_ != b.members_) return false;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a.counts_[i] != b.counts_[i] || a.origin_steps_[i] != b.origin_steps_[i]) return false;
    if (std::abs(a.axes_[i].spacing - b.axes_[i].spacing) > 1e-12 * a.axes_[i].spacing) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

GridFn::GridFn(DomainPtr domain, std::vector<ExtReal> values) : domain_(std::move(domain)), values_(std::move(values)) {
  if (!domain_) throw DomainError("GridFn requires a domain");
  if (values_.size() != domain_->size()) {
    throw DomainError("GridFn: " + std::to_string(values_.size()) + " values for " +
                      std::to_string(domain_->size()) + " member nodes");
  }
  bool any_finite = false;
  for (ExtReal v : values_) {
    if (std::isnan(v.value()) || v.value() == kInf) throw DomainError("GridFn values must be real or -inf");
    any_finite = any_finite || v.is_finite();
  }
  if (!any_finite) throw EmptyHypographError("GridFn has no finite value (empty hypograph)");
}

GridFn::GridFn(const GridDomain& domain, std::vector<ExtReal> values)
    : GridFn(std::make_shared<const GridDomain>(domain), std::move(values)) {}

GridFn GridFn::constant(DomainPtr domain, double c) {
  const std::size_t n = domain->size();
  return GridFn(std::move(domain), std::vector<ExtReal>(n, ExtReal(c)));
}

GridFn GridFn::from(DomainPtr domain, const std::function<ExtReal(std::span<const double>)>& fn) {
  std::vector<ExtReal> values(domain->size());
  for (std::size_t m = 0; m < domain->size(); ++m) values[m] = fn(domain->point(m));
  return GridFn(std::move(domain), std::move(values));
}

ExtReal GridFn::at(std::span<const double> x) const {
  const auto m = domain_->find(x);
  if (!m) {
    std::ostringstream os;
    os << "point (";
    for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
    os << ") is not a member node";
    throw DomainError(os.str());
  }
  return values_[*m];
}

std::vector<double> GridFn::to_doubles() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](ExtReal v) { return v.value(); });
  return out;
}

bool same_domain(const GridFn& f, const GridFn& g) {
  return f.domain_ptr() == g.domain_ptr() || f.domain() == g.domain();
}

void require_same_domain(const GridFn& f, const GridFn& g) {
  if (!same_domain(f, g)) throw DomainError("functions live on different grid domains");
}

ExtReal gridfn_eval(const GridFn& f, std::span<const double> x) { return f.at(x); }

}  // namespace hypolib
