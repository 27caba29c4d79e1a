#include "hypolib/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include "hypolib/error.hpp"

namespace hypolib {

double AffinePiece::operator()(std::span<const double> x) const {
  double v = offset;
  for (std::size_t i = 0; i < slope.size(); ++i) v += slope[i] * x[i];
  return v;
}

MaxAffine::MaxAffine(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("MaxAffine needs at least one piece");
  const std::size_t n = pieces_.front().slope.size();
  for (const auto& p : pieces_) {
    if (p.slope.size() != n) throw DomainError("MaxAffine pieces have inconsistent dimension");
  }
}

double MaxAffine::operator()(std::span<const double> x) const { return pieces_[active(x)](x); }

std::size_t MaxAffine::active(std::span<const double> x) const {
  std::size_t best = 0;
  double best_v = pieces_[0](x);
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    const double v = pieces_[k](x);
    if (v > best_v) {
      best_v = v;
      best = k;
    }
  }
  return best;
}

double MaxAffine::lipschitz_inf() const {
  double l = 0.0;
  for (const auto& p : pieces_) {
    double s = 0.0;
    for (double a : p.slope) s += std::abs(a);
    l = std::max(l, s);
  }
  return l;
}

void validate(const PaDiff& f) {
  if (f.plus.size() == 0 || f.minus.size() == 0) throw DomainError("PaDiff needs nonempty plus and minus parts");
  if (f.plus.dim() != f.minus.dim()) throw DomainError("PaDiff plus/minus dimensions differ");
  if (!(f.radius >= 0.0)) throw DomainError("PaDiff radius must be nonnegative");
}

ExtReal pa_eval(const PaDiff& f, std::span<const double> x) {
  double norm = 0.0;
  for (double xi : x) norm = std::max(norm, std::abs(xi));
  if (norm > f.radius + kGeomTol) return kNegInf;
  return f.plus(x) - f.minus(x);
}

GridFn pa_to_gridfn(const PaDiff& f, DomainPtr d) {
  validate(f);
  if (f.dim() != d->dim()) throw DomainError("PaDiff dimension does not match domain");
  std::vector<ExtReal> values(d->size());
  for (std::size_t m = 0; m < d->size(); ++m) values[m] = pa_eval(f, d->point(m));
  return GridFn(std::move(d), std::move(values));
}

}  // namespace hypolib
