#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypolib/grid.hpp"

namespace hypolib {

enum class ObjectiveKind { MleDensity, LsRegression, LsDensity };

ObjectiveKind parse_objective(const std::string& name);
std::string objective_name(ObjectiveKind k);

// Draws snapped to member nodes; responses only for regression.
struct Sample {
  std::vector<std::size_t> nodes;
  std::vector<double> y;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] bool has_response() const { return !y.empty(); }

  // Snaps each point to its nearest member (sup-norm, ties to the lower
  // index). y may be empty (density draws) or one response per point.
  static Sample from_points(const GridDomain& d, const std::vector<std::vector<double>>& points,
                            std::vector<double> y = {});
};

// Finitely supported truth. For densities: node weights. For regression:
// design weights, mean function f0 and additive noise.
struct Truth {
  enum class Noise { None, Gaussian, Discrete };

  DomainPtr domain;
  std::vector<double> weights;  // one per member, sums to 1
  std::vector<double> f0;       // regression mean per member (empty for densities)
  Noise noise = Noise::None;
  double sigma = 0.0;                 // Gaussian
  std::vector<double> noise_values;   // Discrete
  std::vector<double> noise_probs;

  [[nodiscard]] bool regression() const { return !f0.empty(); }
  [[nodiscard]] double noise_mean() const;
  [[nodiscard]] double noise_second_moment() const;
  // Density f0 = weights / cell volume.
  [[nodiscard]] GridFn density() const;
  [[nodiscard]] Sample draw(std::size_t count, std::mt19937_64& rng) const;
  void validate() const;
};

// Weighted per-node statistics: mean of psi over a sample or expectation
// under a truth both reduce to sum_x w_x * (terms in f(x)).
struct Atoms {
  std::vector<double> w;   // weight per node (sums to 1)
  std::vector<double> s1;  // weighted mean response per node (regression)
  std::vector<double> s2;  // weighted mean squared response per node (regression)
};

Atoms sample_atoms(const Sample& s, std::size_t nodes, bool regression);
Atoms truth_atoms(const Truth& t);

double atoms_objective(ObjectiveKind obj, const Atoms& a, const GridDomain& d, std::span<const double> f);

// Mean of psi over the sample; +inf if any term is +inf.
double sample_average(ObjectiveKind obj, const Sample& s, const GridFn& f);
// Exact expectation of psi under the truth.
double population_objective(ObjectiveKind obj, const Truth& t, const GridFn& f);

struct FunctionClass {
  DomainPtr domain;
  std::vector<double> lower;  // may be -inf
  std::vector<double> upper;  // may be +inf
  std::optional<double> kappa;
  bool unit_integral = false;
  std::optional<double> anchor;  // f(0) <= anchor

  static FunctionClass box(DomainPtr d, double lo, double hi);
  void validate() const;
};

struct ProjectionOptions {
  std::size_t max_rounds = 2000;
  double tol = 1e-12;
};

// Feasible point near f: exact Euclidean projection for box(+integral) and
// constant classes; Dykstra's alternating projections otherwise, finished
// with an exact box(+integral) projection.
GridFn project_class(std::span<const double> f, const FunctionClass& c, const ProjectionOptions& opts = {});
std::vector<double> project_values(std::span<const double> f, const FunctionClass& c,
                                   const ProjectionOptions& opts = {});

// Largest violation of the Lipschitz condition between neighboring nodes.
double lipschitz_violation(std::span<const double> f, const GridDomain& d, double kappa);

enum class StepRule { Spectral, Diminishing };

struct SaaOptions {
  std::size_t max_iter = 2000;
  StepRule rule = StepRule::Spectral;
  double a = 1.0;   // diminishing rule a / (1 + k b)
  double b = 0.1;
  double tol = 1e-12;  // projected-gradient stationarity
  std::uint64_t seed = 0;
};

struct SaaResult {
  GridFn f;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> best_trace;  // best value after each iteration
};

SaaResult saa_solve_atoms(ObjectiveKind obj, const Atoms& a, const FunctionClass& c, const SaaOptions& opts = {});
SaaResult saa_solve(ObjectiveKind obj, const Sample& s, const FunctionClass& c, const SaaOptions& opts = {});
// Minimizer of the population objective (same solver on the truth's atoms).
SaaResult population_argmin(ObjectiveKind obj, const Truth& t, const FunctionClass& c, const SaaOptions& opts = {});

bool level_set_member(ObjectiveKind obj, const Sample& s, const GridFn& f, double delta);

double confidence_radius(double nu, std::size_t n, double c);

struct RateSpec {
  std::size_t n = 1;
  double p = 1.0;
  double c = 1.0;
};
double rate_r_nu(double nu, const RateSpec& spec);

struct HolderReport {
  double dl_value = 0.0;
  double max_violation = 0.0;
  bool holds = false;
};

HolderReport check_holder_pointwise(const GridFn& f, const GridFn& g, double kappa, double tol);

struct ArgminReport {
  bool premise_level = false;   // F2 -> F1 premise
  bool premise_argmin = false;  // F1 -> F2 premise
  double level_excess = 0.0;
  double argmin_excess = 0.0;
  bool level_holds = true;   // vacuous when the premise fails
  bool argmin_holds = true;
  [[nodiscard]] bool conclusions_hold() const { return level_holds && argmin_holds; }
};

// Brute-force verification on finite families with value tables (entries
// may be +inf). Distances are dl to tol over the union of both families.
ArgminReport argmin_excess_check(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2,
                                 const std::vector<double>& phi1, const std::vector<double>& phi2, double tau,
                                 double gamma, double eps, double delta, double tol);
// Same, with a precomputed dl matrix over f1 (rows/cols 0..n1-1) followed
// by f2.
ArgminReport argmin_excess_check(const std::vector<std::vector<double>>& dist, std::size_t n1,
                                 const std::vector<double>& phi1, const std::vector<double>& phi2, double tau,
                                 double gamma, double eps, double delta);

// ---- Experiments ------------------------------------------------------------

struct ExperimentConfig {
  ObjectiveKind objective = ObjectiveKind::LsRegression;
  Truth truth;
  FunctionClass cls;
  std::vector<std::size_t> nus;
  std::size_t replications = 1;
  std::uint64_t seed = 0;
  SaaOptions solver;
  double dl_tol = 1e-4;
};

struct RateRow {
  std::size_t nu = 0;
  std::vector<double> gaps;     // population suboptimality per replication
  std::vector<double> dists;    // dl to the population argmin per replication
  double median_gap = 0.0;
  double median_dist = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  double population_value = 0.0;
  double slope = 0.0;  // least-squares slope of log median gap against log nu
  double gap_floor = 0.0;
};

RateReport rate_experiment(const ExperimentConfig& cfg);

struct ConsistencyReport {
  std::vector<std::size_t> nus;
  // dist[r][k]: replication r, schedule entry k.
  std::vector<std::vector<double>> dist;
  double decreasing_fraction = 0.0;  // share of replications with final < first
};

ConsistencyReport consistency_experiment(const ExperimentConfig& cfg);

}  // namespace hypolib
