#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace hypolib {

// Extended real with a distinguished -inf element. +inf is not a valid
// function value; objective values that may be +inf are plain doubles.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : v_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  [[nodiscard]] constexpr bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }
  [[nodiscard]] constexpr bool is_finite() const { return !is_neg_inf(); }
  [[nodiscard]] constexpr double value() const { return v_; }

  friend constexpr bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend constexpr std::partial_ordering operator<=>(ExtReal a, ExtReal b) { return a.v_ <=> b.v_; }

  // -inf absorbs finite summands.
  friend constexpr ExtReal operator+(ExtReal a, double b) { return a.is_neg_inf() ? a : ExtReal(a.v_ + b); }
  friend constexpr ExtReal operator-(ExtReal a, double b) { return a + (-b); }

 private:
  double v_ = 0.0;
};

inline constexpr ExtReal kNegInf = ExtReal::neg_inf();

constexpr ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }
constexpr ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace hypolib
