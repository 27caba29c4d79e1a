#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hypolib/epispline.hpp"
#include "hypolib/grid.hpp"
#include "hypolib/piecewise.hpp"

namespace hypolib {

// ---- Moreau envelope pipeline ---------------------------------------------

// (e_lambda f)(x) = max_y f(y) - |y - x|_2^2 / (2 lambda) over finite nodes y.
GridFn moreau_envelope(const GridFn& f, double lambda);

// min{f, cap} on nodes with |x|_inf <= rho, -inf elsewhere. cap may be +inf.
GridFn truncate_and_restrict(const GridFn& f, double cap, double rho);

struct PaFitOptions {
  std::size_t restarts = 10;
  std::size_t iterations = 100;
  std::uint64_t seed = 0;
};

struct PaFitResult {
  PaDiff fit;
  double residual = 0.0;       // sum of squared errors over the fitted nodes
  std::size_t nodes = 0;       // number of fitted nodes
  std::size_t best_restart = 0;
  std::vector<double> trace;   // residual after each iteration of the best restart
  bool monotone = true;        // no restart ever increased its residual
};

// Least-squares fit of a difference of two q-piece max-affine functions to
// the finite values of target on the rho-ball, by alternating active-piece
// assignment and linear least squares, best of seeded restarts. Even
// restarts start from a random nearest-center partition, odd ones from
// random coefficients.
PaFitResult pa_fit(const GridFn& target, std::size_t q, double rho, const PaFitOptions& opts = {});

struct PipelineStage {
  double cap = 0.0;  // truncation level
  double lambda = 1.0;
  double rho = 0.0;
  std::size_t q = 1;
};

struct PipelineSchedule {
  std::vector<PipelineStage> stages;
  // PreconditionError unless caps and radii are nondecreasing, lambdas
  // strictly decreasing and piece budgets nondecreasing.
  void validate() const;
};

struct PipelineStageResult {
  PaDiff fit;
  double dl_to_target = 0.0;
  double dl_error = 0.0;
  double fit_residual = 0.0;
  GridFn envelope;
};

std::vector<PipelineStageResult> hypo_approx_sequence(const GridFn& f, const PipelineSchedule& schedule, double tol,
                                                      const PaFitOptions& fit = {});

// ---- Epi-splines and covers ---------------------------------------------

// Smallest tau with R_k inside B(x, tau) for every x in the rho-ball lying
// in cl R_k; +inf once the rho-ball reaches the exterior cell.
double meshsize(const BoxPartition& p, double rho);

// Cell value -clip(max of f over member nodes in the closed cell,
// [-rho', rho']); cells without finite nodes get -clip(-inf) = rho'.
EpiSpline0 epispline_approx(const GridFn& f, const BoxPartition& p, double rho, double rho_prime);

struct CoverParams {
  double eps = 0.0;
  double r = 0.0;
  double gamma1 = 0.0, gamma2 = 0.0, gamma3 = 0.0;
  double omega = 0.0;
  std::size_t n = 1;
  double eps_bar = 0.0;
  bool compat = false;

  double rho = 0.0;
  std::uint64_t nu = 0;
  std::uint64_t m = 0;
  double K = 0.0;  // nu^n + 1, as a real since it may not fit an integer
  std::vector<double> sigma;

  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0, c7 = 0.0;
  double log_count = 0.0;     // (nu^n + 1) log m
  double bound = 0.0;         // right-hand side of the covering bound
  double bracket = 0.0;       // log c6 / log(1/eps_bar) + 1 + 1/e
  [[nodiscard]] bool bound_holds() const { return log_count <= bound; }

  [[nodiscard]] BoxPartition partition() const;
};

struct CoverOptions {
  std::optional<double> eps_bar;  // otherwise the largest value in (0, eps_bar_cap]
  double eps_bar_cap = 0.5;
  bool compat = false;           // allows 0 < omega <= 1 (reproduction only)
  std::size_t max_sigma = 10'000'000;
};

// Left-hand side of the covering condition minus gamma2 * eps.
double covering_margin(double eps, double r, double gamma1, double gamma2);

CoverParams cover_params(double eps, double r, double gamma1, double gamma2, double gamma3, double omega,
                         std::size_t n, const CoverOptions& opts = {});

// Nearest range gridpoint; exact ties go to the larger one.
double nearest_sigma(const std::vector<double>& sigma, double v);

// Rounds -s (s from epispline_approx on the cover partition) to the range
// gridpoints; the result is usc (max over adjacent cells on faces).
GridFn quantize_to_cover(const GridFn& f, const CoverParams& p, std::optional<double> rho_prime = std::nullopt);

struct PackingFamily {
  double rho = 0.0;
  double eps = 0.0;
  std::size_t n = 1;
  std::uint64_t nu_eps = 0;
  std::vector<double> levels;  // y^l, l = 1..nu_eps, in [-rho, 0)
  DomainPtr domain;
  std::vector<GridFn> members;
};

PackingFamily packing_family(double rho, double eps, std::size_t n, double member_cap = 1e6);

struct PackingReport {
  double min_pairwise_lower = 0.0;  // min over pairs of e^{-rho} dhat_rho
  bool separated = false;
  std::size_t pairs = 0;
  double log_count = 0.0;
  double lower_bound = 0.0;  // (rho e^{-rho}/6)^n (1/2) eps^{-n} log(1/eps)
};

PackingReport verify_packing_separation(const PackingFamily& fam);

}  // namespace hypolib
