#include "hypolib/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypolib/error.hpp"
#include "hypolib/hypo_metric.hpp"

namespace hypolib {

ObjectiveKind parse_objective(const std::string& name) {
  if (name == "mle" || name == "mle_density") return ObjectiveKind::MleDensity;
  if (name == "ls" || name == "ls_regression") return ObjectiveKind::LsRegression;
  if (name == "ls_density") return ObjectiveKind::LsDensity;
  throw ValidationError("unknown objective '" + name + "' (expected mle, ls or ls_density)");
}

std::string objective_name(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::MleDensity:
      return "mle";
    case ObjectiveKind::LsRegression:
      return "ls";
    case ObjectiveKind::LsDensity:
      return "ls_density";
  }
  return "?";
}

Sample Sample::from_points(const GridDomain& d, const std::vector<std::vector<double>>& points, std::vector<double> y) {
  if (points.empty()) throw PreconditionError("sample is empty");
  if (!y.empty() && y.size() != points.size()) throw PreconditionError("one response per design point required");
  Sample s;
  s.nodes.reserve(points.size());
  for (const auto& p : points) {
    if (p.size() != d.dim()) throw DomainError("sample point has the wrong dimension");
    s.nodes.push_back(d.nearest(p));
  }
  s.y = std::move(y);
  return s;
}

// ---- Truth ------------------------------------------------------------------

double Truth::noise_mean() const {
  switch (noise) {
    case Noise::None:
    case Noise::Gaussian:
      return 0.0;
    case Noise::Discrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < noise_values.size(); ++i) m += noise_probs[i] * noise_values[i];
      return m;
    }
  }
  return 0.0;
}

double Truth::noise_second_moment() const {
  switch (noise) {
    case Noise::None:
      return 0.0;
    case Noise::Gaussian:
      return sigma * sigma;
    case Noise::Discrete: {
      double m = 0.0;
      for (std::size_t i = 0; i < noise_values.size(); ++i) m += noise_probs[i] * noise_values[i] * noise_values[i];
      return m;
    }
  }
  return 0.0;
}

GridFn Truth::density() const {
  const double vol = domain->cell_volume();
  std::vector<ExtReal> v(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) v[i] = weights[i] / vol;
  return GridFn(domain, std::move(v));
}

void Truth::validate() const {
  if (!domain) throw PreconditionError("truth has no domain");
  if (weights.size() != domain->size()) throw PreconditionError("truth needs one weight per grid node");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw PreconditionError("truth weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw PreconditionError("truth weights must sum to 1");
  if (!f0.empty() && f0.size() != weights.size()) throw PreconditionError("regression mean needs one value per node");
  for (double v : f0) {
    if (!std::isfinite(v)) throw PreconditionError("regression mean must be finite");
  }
  if (noise == Noise::Gaussian && !(sigma >= 0.0)) throw PreconditionError("noise sigma must be nonnegative");
  if (noise == Noise::Discrete) {
    if (noise_values.empty() || noise_values.size() != noise_probs.size()) {
      throw PreconditionError("discrete noise needs matching values and probabilities");
    }
    double p = 0.0;
    for (double q : noise_probs) {
      if (!(q >= 0.0)) throw PreconditionError("noise probabilities must be nonnegative");
      p += q;
    }
    if (std::abs(p - 1.0) > 1e-9) throw PreconditionError("noise probabilities must sum to 1");
  }
}

Sample Truth::draw(std::size_t count, std::mt19937_64& rng) const {
  std::discrete_distribution<std::size_t> node(weights.begin(), weights.end());
  std::normal_distribution<double> gauss(0.0, sigma > 0.0 ? sigma : 1.0);
  std::discrete_distribution<std::size_t> disc(noise_probs.begin(), noise_probs.end());
  Sample s;
  s.nodes.reserve(count);
  if (regression()) s.y.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t x = node(rng);
    s.nodes.push_back(x);
    if (!regression()) continue;
    double e = 0.0;
    if (noise == Noise::Gaussian && sigma > 0.0) e = gauss(rng);
    if (noise == Noise::Discrete) e = noise_values[disc(rng)];
    s.y.push_back(f0[x] + e);
  }
  return s;
}

// ---- Objectives -----------------------------------------------------------------

Atoms sample_atoms(const Sample& s, std::size_t nodes, bool regression) {
  if (s.nodes.empty()) throw PreconditionError("sample is empty");
  if (regression && s.y.size() != s.nodes.size()) throw PreconditionError("regression sample needs responses");
  Atoms a;
  a.w.assign(nodes, 0.0);
  if (regression) {
    a.s1.assign(nodes, 0.0);
    a.s2.assign(nodes, 0.0);
  }
  const double inv = 1.0 / static_cast<double>(s.nodes.size());
  for (std::size_t j = 0; j < s.nodes.size(); ++j) {
    const std::size_t x = s.nodes[j];
    if (x >= nodes) throw DomainError("sample node outside the grid");
    a.w[x] += inv;
    if (regression) {
      a.s1[x] += s.y[j] * inv;
      a.s2[x] += s.y[j] * s.y[j] * inv;
    }
  }
  return a;
}

Atoms truth_atoms(const Truth& t) {
  Atoms a;
  a.w = t.weights;
  if (t.regression()) {
    const double mu = t.noise_mean();
    const double m2 = t.noise_second_moment();
    a.s1.resize(a.w.size());
    a.s2.resize(a.w.size());
    for (std::size_t x = 0; x < a.w.size(); ++x) {
      a.s1[x] = a.w[x] * (t.f0[x] + mu);
      a.s2[x] = a.w[x] * (t.f0[x] * t.f0[x] + 2.0 * t.f0[x] * mu + m2);
    }
  }
  return a;
}

double atoms_objective(ObjectiveKind obj, const Atoms& a, const GridDomain& d, std::span<const double> f) {
  double total = 0.0;
  switch (obj) {
    case ObjectiveKind::MleDensity:
      for (std::size_t x = 0; x < f.size(); ++x) {
        if (a.w[x] == 0.0) continue;
        if (!(f[x] > 0.0)) return kInf;
        total -= a.w[x] * std::log(f[x]);
      }
      return total;
    case ObjectiveKind::LsRegression:
      if (a.s1.empty()) throw PreconditionError("regression objective needs responses");
      for (std::size_t x = 0; x < f.size(); ++x) {
        if (a.w[x] == 0.0) continue;
        if (!std::isfinite(f[x])) return kInf;
        // Expanded square; clamp rounding below the exact lower bound 0.
        total += std::max(0.0, a.s2[x] - 2.0 * f[x] * a.s1[x] + a.w[x] * f[x] * f[x]);
      }
      return total;
    case ObjectiveKind::LsDensity: {
      const double vol = d.cell_volume();
      for (std::size_t x = 0; x < f.size(); ++x) {
        if (!std::isfinite(f[x])) return kInf;
        total += -2.0 * a.w[x] * f[x] + f[x] * f[x] * vol;
      }
      return total;
    }
  }
  return total;
}

namespace {

void atoms_gradient(ObjectiveKind obj, const Atoms& a, const GridDomain& d, std::span<const double> f,
                    std::vector<double>& g) {
  g.assign(f.size(), 0.0);
  switch (obj) {
    case ObjectiveKind::MleDensity:
      for (std::size_t x = 0; x < f.size(); ++x) {
        if (a.w[x] > 0.0) g[x] = -a.w[x] / f[x];
      }
      break;
    case ObjectiveKind::LsRegression:
      for (std::size_t x = 0; x < f.size(); ++x) g[x] = 2.0 * (a.w[x] * f[x] - a.s1[x]);
      break;
    case ObjectiveKind::LsDensity: {
      const double vol = d.cell_volume();
      for (std::size_t x = 0; x < f.size(); ++x) g[x] = -2.0 * a.w[x] + 2.0 * f[x] * vol;
      break;
    }
  }
}

}  // namespace

double sample_average(ObjectiveKind obj, const Sample& s, const GridFn& f) {
  if (s.nodes.empty()) throw PreconditionError("sample is empty");
  const GridDomain& d = f.domain();
  double integral = 0.0;
  if (obj == ObjectiveKind::LsDensity) {
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (!f[x].is_finite()) return kInf;
      integral += f[x].value() * f[x].value();
    }
    integral *= d.cell_volume();
  }
  if (obj == ObjectiveKind::LsRegression && s.y.size() != s.nodes.size()) {
    throw PreconditionError("regression sample needs responses");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < s.nodes.size(); ++j) {
    const std::size_t x = s.nodes[j];
    if (x >= f.size()) throw DomainError("sample node outside the grid");
    const ExtReal v = f[x];
    switch (obj) {
      case ObjectiveKind::MleDensity:
        if (!(v.value() > 0.0)) return kInf;
        total -= std::log(v.value());
        break;
      case ObjectiveKind::LsRegression: {
        if (!v.is_finite()) return kInf;
        const double e = s.y[j] - v.value();
        total += e * e;
        break;
      }
      case ObjectiveKind::LsDensity:
        total += -2.0 * v.value() + integral;
        break;
    }
  }
  return total / static_cast<double>(s.nodes.size());
}

double population_objective(ObjectiveKind obj, const Truth& t, const GridFn& f) {
  t.validate();
  if (!(*t.domain == f.domain())) throw DomainError("function and truth live on different grids");
  if (obj == ObjectiveKind::LsRegression && !t.regression()) {
    throw PreconditionError("regression objective needs a regression truth");
  }
  const std::vector<double> v = f.to_doubles();
  if (obj == ObjectiveKind::LsRegression) {
    // E (f0 + e - f)^2 = (f0 + mu - f)^2 + Var e, summed without cancellation.
    const double mu = t.noise_mean();
    const double var = std::max(0.0, t.noise_second_moment() - mu * mu);
    double total = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (t.weights[x] == 0.0) continue;
      if (!std::isfinite(v[x])) return kInf;
      const double r = t.f0[x] + mu - v[x];
      total += t.weights[x] * (r * r + var);
    }
    return total;
  }
  return atoms_objective(obj, truth_atoms(t), *t.domain, v);
}

// ---- Function classes and projection ------------------------------------------

FunctionClass FunctionClass::box(DomainPtr d, double lo, double hi) {
  FunctionClass c;
  c.lower.assign(d->size(), lo);
  c.upper.assign(d->size(), hi);
  c.domain = std::move(d);
  return c;
}

void FunctionClass::validate() const {
  if (!domain) throw PreconditionError("class has no domain");
  if (lower.size() != domain->size() || upper.size() != domain->size()) {
    throw PreconditionError("class bounds need one value per grid node");
  }
  for (std::size_t x = 0; x < lower.size(); ++x) {
    if (std::isnan(lower[x]) || std::isnan(upper[x]) || lower[x] == kInf || upper[x] == -kInf) {
      throw PreconditionError("class bounds must be numbers with lower < +inf and upper > -inf");
    }
    if (lower[x] > upper[x]) throw InfeasibleError("class lower bound exceeds upper bound at node " + std::to_string(x));
  }
  if (kappa && !(*kappa >= 0.0)) throw PreconditionError("Lipschitz modulus must be nonnegative");
  if (anchor && !std::isfinite(*anchor)) throw PreconditionError("anchor bound must be finite");
}

namespace {

// Bounds with the anchor folded into the origin's upper bound.
std::vector<double> effective_upper(const FunctionClass& c) {
  std::vector<double> v = c.upper;
  if (c.anchor) {
    const std::size_t o = c.domain->origin();
    v[o] = std::min(v[o], *c.anchor);
    if (v[o] < c.lower[o]) throw InfeasibleError("anchor bound is below the lower bound at the origin");
  }
  return v;
}

// Euclidean projection onto {u <= f <= v} or, with unit mass, onto
// {u <= f <= v, sum f vol = 1}: clip(z + lambda) with lambda from the mass
// equation.
void project_box(std::vector<double>& z, const std::vector<double>& u, const std::vector<double>& v, bool unit,
                 double vol) {
  const std::size_t n = z.size();
  if (!unit) {
    for (std::size_t x = 0; x < n; ++x) z[x] = std::clamp(z[x], u[x], v[x]);
    return;
  }
  const double target = 1.0 / vol;
  double lo_mass = 0.0, hi_mass = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    lo_mass += u[x];
    hi_mass += v[x];
  }
  const double slack = 1e-12 * std::max(1.0, target);
  if (lo_mass > target + slack || hi_mass < target - slack) {
    throw InfeasibleError("box bounds cannot carry unit mass");
  }
  auto mass = [&](double lambda) {
    double m = 0.0;
    for (std::size_t x = 0; x < n; ++x) m += std::clamp(z[x] + lambda, u[x], v[x]);
    return m;
  };
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 2000 && mass(lo) > target; ++i) lo *= 2.0;
  for (int i = 0; i < 2000 && mass(hi) < target; ++i) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (mass(mid) < target ? lo : hi) = mid;
  }
  double lambda = 0.5 * (lo + hi);
  // Solve the mass equation exactly on the free set found by bisection.
  double fixed = 0.0, free_sum = 0.0;
  std::size_t free = 0;
  for (std::size_t x = 0; x < n; ++x) {
    const double t = z[x] + lambda;
    if (t <= u[x]) {
      fixed += u[x];
    } else if (t >= v[x]) {
      fixed += v[x];
    } else {
      free_sum += z[x];
      ++free;
    }
  }
  if (free > 0) {
    const double exact = (target - fixed - free_sum) / static_cast<double>(free);
    if (std::abs(mass(exact) - target) <= std::abs(mass(lambda) - target)) lambda = exact;
  }
  for (std::size_t x = 0; x < n; ++x) z[x] = std::clamp(z[x] + lambda, u[x], v[x]);
}

struct Edge {
  std::size_t i, j;
  double bound;
};

// Neighbor pairs (offsets differ by at most one step on every axis), split
// into matchings so each group projects in closed form.
std::vector<std::vector<Edge>> lipschitz_groups(const GridDomain& d, double kappa) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto oi = d.offsets(i);
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      const auto oj = d.offsets(j);
      bool near = true;
      for (std::size_t k = 0; k < d.dim() && near; ++k) near = std::abs(oi[k] - oj[k]) <= 1;
      if (near) edges.push_back({i, j, kappa * d.linf_distance(i, j)});
    }
  }
  std::vector<std::vector<Edge>> groups;
  std::vector<std::vector<bool>> used;
  for (const Edge& e : edges) {
    std::size_t g = 0;
    while (g < groups.size() && (used[g][e.i] || used[g][e.j])) ++g;
    if (g == groups.size()) {
      groups.emplace_back();
      used.emplace_back(d.size(), false);
    }
    groups[g].push_back(e);
    used[g][e.i] = used[g][e.j] = true;
  }
  return groups;
}

void project_edges(std::vector<double>& z, const std::vector<Edge>& group) {
  for (const Edge& e : group) {
    const double diff = z[e.i] - z[e.j];
    if (std::abs(diff) <= e.bound) continue;
    const double shift = 0.5 * (std::abs(diff) - e.bound) * (diff > 0.0 ? 1.0 : -1.0);
    z[e.i] -= shift;
    z[e.j] += shift;
  }
}

}  // namespace

double lipschitz_violation(std::span<const double> f, const GridDomain& d, double kappa) {
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      worst = std::max(worst, std::abs(f[i] - f[j]) - kappa * d.linf_distance(i, j));
    }
  }
  return worst;
}

std::vector<double> project_values(std::span<const double> f, const FunctionClass& c, const ProjectionOptions& opts) {
  c.validate();
  const GridDomain& d = *c.domain;
  if (f.size() != d.size()) throw DomainError("value vector does not match the class grid");
  for (double v : f) {
    if (std::isnan(v)) throw DomainError("cannot project NaN values");
  }
  const std::vector<double>& u = c.lower;
  const std::vector<double> v = effective_upper(c);
  const double vol = d.cell_volume();
  const std::size_t n = f.size();

  if (c.kappa && *c.kappa == 0.0) {
    const double lo = *std::max_element(u.begin(), u.end());
    const double hi = *std::min_element(v.begin(), v.end());
    if (lo > hi) throw InfeasibleError("no constant fits between the class bounds");
    double value = 0.0;
    if (c.unit_integral) {
      value = 1.0 / (static_cast<double>(n) * vol);
      if (value < lo - 1e-12 || value > hi + 1e-12) throw InfeasibleError("the unit-mass constant violates the bounds");
    } else {
      double mean = 0.0;
      for (double x : f) mean += std::clamp(x, -1e300, 1e300);
      value = std::clamp(mean / static_cast<double>(n), lo, hi);
    }
    return std::vector<double>(n, value);
  }

  std::vector<double> z(f.begin(), f.end());
  for (double& x : z) x = std::clamp(x, -1e300, 1e300);
  if (!c.kappa) {
    project_box(z, u, v, c.unit_integral, vol);
    return z;
  }

  // Dykstra: cyclic projections with correction terms; the box step runs
  // last so its constraints hold exactly on return.
  const auto groups = lipschitz_groups(d, *c.kappa);
  const std::size_t sets = groups.size() + 1;
  std::vector<std::vector<double>> p(sets, std::vector<double>(n, 0.0));
  std::vector<double> y(n), prev(n);
  for (std::size_t round = 0; round < opts.max_rounds; ++round) {
    prev = z;
    for (std::size_t s = 0; s < sets; ++s) {
      for (std::size_t x = 0; x < n; ++x) y[x] = z[x] + p[s][x];
      if (s < groups.size()) {
        project_edges(y, groups[s]);
      } else {
        project_box(y, u, v, c.unit_integral, vol);
      }
      for (std::size_t x = 0; x < n; ++x) {
        p[s][x] = z[x] + p[s][x] - y[x];
        z[x] = y[x];
      }
    }
    double change = 0.0;
    for (std::size_t x = 0; x < n; ++x) change = std::max(change, std::abs(z[x] - prev[x]));
    if (change <= opts.tol && lipschitz_violation(z, d, *c.kappa) <= 1e-9) break;
  }
  if (lipschitz_violation(z, d, *c.kappa) > 1e-6 * std::max(1.0, *c.kappa)) {
    throw InfeasibleError("Lipschitz and box constraints could not be met together");
  }
  return z;
}

GridFn project_class(std::span<const double> f, const FunctionClass& c, const ProjectionOptions& opts) {
  const std::vector<double> z = project_values(f, c, opts);
  return GridFn(c.domain, std::vector<ExtReal>(z.begin(), z.end()));
}

// ---- SAA solver -----------------------------------------------------------------

namespace {

double inf_norm_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

// Finite-objective feasible start: the projection of 0, then of the lower
// bound lifted by a small margin, then of the midpoint of the bounds.
std::vector<double> start_point(ObjectiveKind obj, const Atoms& a, const FunctionClass& c) {
  const GridDomain& d = *c.domain;
  std::vector<std::vector<double>> tries;
  tries.emplace_back(d.size(), 0.0);
  std::vector<double> lifted(d.size()), mid(d.size());
  for (std::size_t x = 0; x < d.size(); ++x) {
    const double lo = std::isfinite(c.lower[x]) ? c.lower[x] : 0.0;
    lifted[x] = std::max(lo, 0.0) + 1e-8;
    const double hi = std::isfinite(c.upper[x]) ? c.upper[x] : lo + 1.0;
    mid[x] = 0.5 * (lo + hi);
  }
  tries.push_back(lifted);
  tries.push_back(mid);
  for (const auto& t : tries) {
    std::vector<double> x = project_values(t, c);
    if (std::isfinite(atoms_objective(obj, a, d, x))) return x;
  }
  throw InfeasibleError("every feasible start has objective +inf (sample support incompatible with the class)");
}

}  // namespace

SaaResult saa_solve_atoms(ObjectiveKind obj, const Atoms& a, const FunctionClass& c, const SaaOptions& opts) {
  c.validate();
  const GridDomain& d = *c.domain;
  if (a.w.size() != d.size()) throw DomainError("sample does not match the class grid");
  const std::size_t n = d.size();
  auto phi = [&](const std::vector<double>& x) { return atoms_objective(obj, a, d, x); };

  std::vector<double> x = start_point(obj, a, c);
  double fx = phi(x);
  std::vector<double> g, g_new, trial(n), step(n), best = x;
  double best_value = fx;
  atoms_gradient(obj, a, d, x, g);

  SaaResult out{GridFn::constant(c.domain, 0.0), 0.0, 0, false, {}};
  auto stationarity = [&](const std::vector<double>& at, const std::vector<double>& grad) {
    for (std::size_t i = 0; i < n; ++i) trial[i] = at[i] - grad[i];
    return inf_norm_diff(project_values(trial, c), at);
  };

  if (opts.rule == StepRule::Spectral) {
    constexpr std::size_t kMemory = 10;
    constexpr double kArmijo = 1e-4;
    std::vector<double> recent{fx};
    double pg = stationarity(x, g);
    double lambda = pg > 0.0 ? std::clamp(1.0 / pg, 1e-10, 1e10) : 1.0;
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
      if (pg <= opts.tol) {
        out.converged = true;
        break;
      }
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - lambda * g[i];
      const std::vector<double> target = project_values(trial, c);
      double slope = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step[i] = target[i] - x[i];
        slope += g[i] * step[i];
      }
      const double ref = *std::max_element(recent.begin(), recent.end());
      double alpha = 1.0, f_new = kInf;
      std::vector<double> x_new(n);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + alpha * step[i];
        f_new = phi(x_new);
        if (f_new <= ref + kArmijo * alpha * slope) {
          moved = true;
          break;
        }
      }
      ++out.iterations;
      if (!moved) {
        // No progress possible at working precision.
        out.converged = pg <= 1e3 * opts.tol + 1e-9;
        out.best_trace.push_back(best_value);
        break;
      }
      atoms_gradient(obj, a, d, x_new, g_new);
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = x_new[i] - x[i];
        ss += s * s;
        sy += s * (g_new[i] - g[i]);
      }
      lambda = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : 1e10;
      x.swap(x_new);
      g.swap(g_new);
      fx = f_new;
      recent.push_back(fx);
      if (recent.size() > kMemory) recent.erase(recent.begin());
      if (fx < best_value) {
        best_value = fx;
        best = x;
      }
      out.best_trace.push_back(best_value);
      pg = stationarity(x, g);
    }
    if (!out.converged && pg <= opts.tol) out.converged = true;
  } else {
    std::vector<double> margin(n);
    for (std::size_t i = 0; i < n; ++i) margin[i] = (std::isfinite(c.lower[i]) ? c.lower[i] : 0.0) + 1e-8;
    for (std::size_t k = 0; k < opts.max_iter; ++k) {
      if (stationarity(x, g) <= opts.tol) {
        out.converged = true;
        break;
      }
      const double t = opts.a / (1.0 + static_cast<double>(k) * opts.b);
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] - t * g[i];
      x = project_values(trial, c);
      fx = phi(x);
      if (!std::isfinite(fx)) {
        for (std::size_t i = 0; i < n; ++i) x[i] = std::max(x[i], margin[i]);
        x = project_values(x, c);
        fx = phi(x);
      }
      ++out.iterations;
      if (fx < best_value) {
        best_value = fx;
        best = x;
      }
      out.best_trace.push_back(best_value);
      if (std::isfinite(fx)) atoms_gradient(obj, a, d, x, g);
    }
  }
  if (!std::isfinite(best_value)) throw InfeasibleError("every iterate has objective +inf");
  out.f = GridFn(c.domain, std::vector<ExtReal>(best.begin(), best.end()));
  out.value = best_value;
  return out;
}

SaaResult saa_solve(ObjectiveKind obj, const Sample& s, const FunctionClass& c, const SaaOptions& opts) {
  c.validate();
  return saa_solve_atoms(obj, sample_atoms(s, c.domain->size(), obj == ObjectiveKind::LsRegression), c, opts);
}

SaaResult population_argmin(ObjectiveKind obj, const Truth& t, const FunctionClass& c, const SaaOptions& opts) {
  t.validate();
  if (!(*t.domain == *c.domain)) throw DomainError("truth and class live on different grids");
  if (obj == ObjectiveKind::LsRegression && !t.regression()) {
    throw PreconditionError("regression objective needs a regression truth");
  }
  SaaResult r = saa_solve_atoms(obj, truth_atoms(t), c, opts);
  r.value = population_objective(obj, t, r.f);
  return r;
}

bool level_set_member(ObjectiveKind obj, const Sample& s, const GridFn& f, double delta) {
  if (delta == kInf) return true;
  return sample_average(obj, s, f) <= delta;
}

double confidence_radius(double nu, std::size_t n, double c) {
  if (!(nu >= 2.0)) throw PreconditionError("sample size must be at least 2");
  if (n == 0) throw PreconditionError("dimension must be positive");
  const double inv_n = 1.0 / static_cast<double>(n);
  return c * std::pow(std::log(nu), 1.0 + inv_n) * std::pow(nu, -inv_n);
}

double rate_r_nu(double nu, const RateSpec& spec) {
  if (!(nu >= 2.0)) throw PreconditionError("sample size must be at least 2");
  if (spec.n == 0 || !(spec.p > 0.0)) throw PreconditionError("rate needs n >= 1 and p > 0");
  const double n = static_cast<double>(spec.n);
  const double denom = 2.0 + n / spec.p;
  return spec.c * std::pow(nu, -1.0 / denom) * std::pow(std::log(nu), (1.0 + n) / denom);
}

HolderReport check_holder_pointwise(const GridFn& f, const GridFn& g, double kappa, double tol) {
  require_same_domain(f, g);
  if (!(kappa >= 0.0)) throw PreconditionError("kappa must be nonnegative");
  const std::vector<double> fv = f.to_doubles(), gv = g.to_doubles();
  for (std::size_t x = 0; x < fv.size(); ++x) {
    if (!std::isfinite(fv[x]) || !std::isfinite(gv[x])) throw PreconditionError("both functions must be finite");
  }
  const double slack_lip = 1e-9 * std::max(1.0, kappa);
  if (lipschitz_violation(fv, f.domain(), kappa) > slack_lip ||
      lipschitz_violation(gv, g.domain(), kappa) > slack_lip) {
    throw PreconditionError("inputs are not kappa-Lipschitz");
  }
  HolderReport r;
  const DistReport d = dl(f, g, tol);
  r.dl_value = d.value;
  bool holds = true;
  for (std::size_t x = 0; x < fv.size(); ++x) {
    const double rho = std::max({f.domain().norm_inf(x), std::abs(fv[x]), std::abs(gv[x])});
    const double scale = (1.0 + kappa) * std::exp(rho);
    const double gap = std::abs(fv[x] - gv[x]) - scale * d.value;
    r.max_violation = std::max(r.max_violation, gap);
    if (gap > scale * tol) holds = false;
  }
  r.holds = holds;
  return r;
}

// ---- Level-set / argmin excess ----------------------------------------------

namespace {

std::vector<std::size_t> level_set(const std::vector<double>& phi, double bound) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if (phi[i] <= bound) out.push_back(i);
  }
  return out;
}

// eps-argmin; the whole family when phi is identically +inf.
std::vector<std::size_t> eps_argmin(const std::vector<double>& phi, double eps) {
  const double best = phi.empty() ? kInf : *std::min_element(phi.begin(), phi.end());
  if (best == kInf) {
    std::vector<std::size_t> all(phi.size());
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  return level_set(phi, best + eps);
}

// For every row index a: some column b within gamma, and the smallest value
// among those is at most value_a + tau.
bool premise(const std::vector<std::vector<double>>& dist, const std::vector<std::size_t>& rows,
             const std::vector<std::size_t>& cols, const std::vector<double>& phi_rows,
             const std::vector<double>& phi_cols, double tau, double gamma) {
  for (std::size_t a = 0; a < rows.size(); ++a) {
    double best = kInf;
    bool any = false;
    for (std::size_t b = 0; b < cols.size(); ++b) {
      if (dist[rows[a]][cols[b]] > gamma) continue;
      any = true;
      best = std::min(best, phi_cols[b]);
    }
    if (!any) return false;
    if (!(best <= phi_rows[a] + tau)) return false;
  }
  return true;
}

std::vector<std::size_t> shift(const std::vector<std::size_t>& idx, std::size_t by) {
  std::vector<std::size_t> out(idx);
  for (auto& i : out) i += by;
  return out;
}

}  // namespace

ArgminReport argmin_excess_check(const std::vector<std::vector<double>>& dist, std::size_t n1,
                                 const std::vector<double>& phi1, const std::vector<double>& phi2, double tau,
                                 double gamma, double eps, double delta) {
  if (phi1.size() != n1 || dist.size() != n1 + phi2.size()) {
    throw PreconditionError("value tables must be total on their families");
  }
  if (!(tau >= 0.0) || !(gamma >= 0.0) || !(eps >= 0.0)) throw PreconditionError("tau, gamma, eps must be nonnegative");
  std::vector<std::size_t> all1(n1), all2(phi2.size());
  std::iota(all1.begin(), all1.end(), 0);
  std::iota(all2.begin(), all2.end(), n1);

  ArgminReport r;
  r.premise_level = premise(dist, all2, all1, phi2, phi1, tau, gamma);
  r.premise_argmin = premise(dist, all1, all2, phi1, phi2, tau, gamma);

  r.level_excess = excess_from_matrix(dist, shift(level_set(phi2, delta), n1), level_set(phi1, delta + tau));
  r.argmin_excess = excess_from_matrix(dist, eps_argmin(phi1, eps), shift(eps_argmin(phi2, eps + 2.0 * tau), n1));
  if (r.premise_level) r.level_holds = r.level_excess <= gamma;
  if (r.premise_level && r.premise_argmin) r.argmin_holds = r.argmin_excess <= gamma;
  return r;
}

ArgminReport argmin_excess_check(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2,
                                 const std::vector<double>& phi1, const std::vector<double>& phi2, double tau,
                                 double gamma, double eps, double delta, double tol) {
  if (phi1.size() != f1.size() || phi2.size() != f2.size()) {
    throw PreconditionError("value tables must be total on their families");
  }
  std::vector<GridFn> all(f1);
  all.insert(all.end(), f2.begin(), f2.end());
  return argmin_excess_check(dl_matrix(all, all, tol), f1.size(), phi1, phi2, tau, gamma, eps, delta);
}

}  // namespace hypolib
