#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hypolib/grid.hpp"

namespace hypolib {

struct DistReport {
  double value = 0.0;
  double error_bound = 0.0;  // true value lies in [value - error_bound, value + error_bound]
  double rho_max = 0.0;      // upper end of the quadrature range
  std::size_t breakpoint_count = 0;
  std::size_t rho_evaluations = 0;
};

// dist_inf((x, alpha), hypo f) for a point x in R^n (not necessarily a node).
double dist_to_hypo(std::span<const double> x, double alpha, const GridFn& f);
// Same, with x the member node m of f's domain.
double dist_to_hypo(std::size_t m, double alpha, const GridFn& f);

// rho -> dl_rho(f, g) for a fixed pair. For each node x the function
// alpha -> dist((x,alpha), hypo f) - dist((x,alpha), hypo g) is stored
// exactly as a piecewise-linear function, so every dl_rho evaluation is an
// exact finite maximum.
class DlProfile {
 public:
  DlProfile(const GridFn& f, const GridFn& g);

  // dl_rho(f, g): max over nodes with |x| <= rho and |alpha| <= rho.
  [[nodiscard]] double at(double rho) const;

  // Enclosure of the integral of dl_rho e^{-rho} over [0, inf) of total
  // width at most tol; value is the midpoint.
  [[nodiscard]] DistReport integrate(double tol) const;

  // Beyond this radius dl_rho is constant.
  [[nodiscard]] double rho_star() const { return rho_star_; }
  [[nodiscard]] std::size_t breakpoint_count() const { return breakpoints_; }

 private:
  struct NodeDiff {
    double norm = 0.0;
    std::vector<double> alpha;    // merged breakpoints, ascending
    std::vector<double> delta;    // difference at each breakpoint
    std::vector<double> abs_key;  // |alpha| ascending
    std::vector<double> run_max;  // max |delta| over breakpoints with |alpha| <= abs_key
  };

  // Max over the first `count` nodes (sorted by norm) at radius rho.
  [[nodiscard]] double eval(double rho, std::size_t count) const;
  [[nodiscard]] static double node_max(const NodeDiff& d, double rho);

  std::vector<NodeDiff> nodes_;  // sorted by norm
  double rho_star_ = 0.0;
  double tail_c_ = 0.0;  // dist(0, hypo f) + dist(0, hypo g)
  std::size_t breakpoints_ = 0;
};

double dl_rho(const GridFn& f, const GridFn& g, double rho);
DistReport dl(const GridFn& f, const GridFn& g, double tol);

// Auxiliary distance with the truncation min{f(x), rho} and the enlarged
// condition sup_{y in B(x,tau)} g(y) >= min{f(x), rho} - tau.
double dhat_rho(const GridFn& f, const GridFn& g, double rho);

struct SandwichReport {
  double lower = 0.0;
  double dl_value = 0.0;
  double dl_error = 0.0;
  double upper = 0.0;
  double delta = 0.0;
  bool holds = false;
};

SandwichReport check_sandwich(const GridFn& f, const GridFn& g, double rho, double tol);

// exs(F1, F2) = max_{f in F1} min_{g in F2} dl(f, g); +inf when only F2 is
// empty and 0 when F1 is empty. Distances computed to tol.
double excess(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2, double tol);
double hausdorff(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2, double tol);

// Full dl matrix between two families (rows f1, cols f2), midpoint values.
std::vector<std::vector<double>> dl_matrix(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2, double tol);
// Excess computed from a precomputed dl matrix restricted to row/col subsets.
double excess_from_matrix(const std::vector<std::vector<double>>& m, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols);

}  // namespace hypolib
