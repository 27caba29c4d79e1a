#pragma once

#include <span>
#include <vector>

#include "hypolib/ext_real.hpp"
#include "hypolib/grid.hpp"

namespace hypolib {

struct AffinePiece {
  std::vector<double> slope;  // a
  double offset = 0.0;        // alpha

  [[nodiscard]] double operator()(std::span<const double> x) const;
};

// x -> max_k <a_k, x> + alpha_k. Always finite.
class MaxAffine {
 public:
  MaxAffine() = default;
  explicit MaxAffine(std::vector<AffinePiece> pieces);

  [[nodiscard]] double operator()(std::span<const double> x) const;
  // Index of the maximizing piece; ties go to the lowest index.
  [[nodiscard]] std::size_t active(std::span<const double> x) const;

  [[nodiscard]] std::size_t size() const { return pieces_.size(); }
  [[nodiscard]] std::size_t dim() const { return pieces_.empty() ? 0 : pieces_.front().slope.size(); }
  [[nodiscard]] const std::vector<AffinePiece>& pieces() const { return pieces_; }
  // max_k ||a_k||_1, a Lipschitz constant of the max under the sup-norm.
  [[nodiscard]] double lipschitz_inf() const;

 private:
  std::vector<AffinePiece> pieces_;
};

// Difference of max-affine functions restricted to the sup-norm ball of
// the given radius; -inf outside the ball.
struct PaDiff {
  MaxAffine plus;
  MaxAffine minus;
  double radius = 0.0;

  [[nodiscard]] std::size_t pieces() const { return std::max(plus.size(), minus.size()); }
  [[nodiscard]] std::size_t dim() const { return plus.dim(); }
};

// Validates shape (nonempty, consistent dimensions, radius >= 0).
void validate(const PaDiff& f);

ExtReal pa_eval(const PaDiff& f, std::span<const double> x);

// Samples f on every member of d; EmptyHypographError if the ball misses
// every member.
GridFn pa_to_gridfn(const PaDiff& f, DomainPtr d);

}  // namespace hypolib
