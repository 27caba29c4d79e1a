#include <algorithm>
#include <cmath>
#include <numeric>

#include "hypolib/error.hpp"
#include "hypolib/estimation.hpp"
#include "hypolib/hypo_metric.hpp"
#include "hypolib/parallel.hpp"
#include "hypolib/random.hpp"

namespace hypolib {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void check_config(const ExperimentConfig& cfg) {
  cfg.truth.validate();
  cfg.cls.validate();
  if (!(*cfg.truth.domain == *cfg.cls.domain)) throw DomainError("truth and class live on different grids");
  if (cfg.nus.empty()) throw PreconditionError("sample-size schedule is empty");
  for (std::size_t nu : cfg.nus) {
    if (nu == 0) throw PreconditionError("sample sizes must be positive");
  }
  if (cfg.replications == 0) throw PreconditionError("replications must be positive");
  if (cfg.objective == ObjectiveKind::LsRegression && !cfg.truth.regression()) {
    throw PreconditionError("regression objective needs a regression truth");
  }
}

}  // namespace

RateReport rate_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  const SaaResult pop = population_argmin(cfg.objective, cfg.truth, cfg.cls, cfg.solver);
  const std::size_t reps = cfg.replications;
  const std::size_t total = cfg.nus.size() * reps;
  std::vector<double> gaps(total), dists(total);
  parallel_for(total, [&](std::size_t idx) {
    const std::size_t k = idx / reps;
    auto rng = make_stream(cfg.seed, "rate", idx);
    const Sample s = cfg.truth.draw(cfg.nus[k], rng);
    const SaaResult fit = saa_solve(cfg.objective, s, cfg.cls, cfg.solver);
    gaps[idx] = population_objective(cfg.objective, cfg.truth, fit.f) - pop.value;
    dists[idx] = dl(fit.f, pop.f, cfg.dl_tol).value;
  });

  RateReport r;
  r.population_value = pop.value;
  r.gap_floor = 1e-15 * std::max(1.0, std::abs(pop.value));
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < cfg.nus.size(); ++k) {
    RateRow row;
    row.nu = cfg.nus[k];
    row.gaps.assign(gaps.begin() + static_cast<std::ptrdiff_t>(k * reps),
                    gaps.begin() + static_cast<std::ptrdiff_t>((k + 1) * reps));
    row.dists.assign(dists.begin() + static_cast<std::ptrdiff_t>(k * reps),
                     dists.begin() + static_cast<std::ptrdiff_t>((k + 1) * reps));
    row.median_gap = median(row.gaps);
    row.median_dist = median(row.dists);
    lx.push_back(std::log(static_cast<double>(row.nu)));
    ly.push_back(std::log(std::max(row.median_gap, r.gap_floor)));
    r.rows.push_back(std::move(row));
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    r.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return r;
}

ConsistencyReport consistency_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  const SaaResult pop = population_argmin(cfg.objective, cfg.truth, cfg.cls, cfg.solver);
  const std::size_t longest = *std::max_element(cfg.nus.begin(), cfg.nus.end());
  ConsistencyReport r;
  r.nus = cfg.nus;
  r.dist.assign(cfg.replications, std::vector<double>(cfg.nus.size()));
  // Each replication draws one long sample and uses its prefixes.
  parallel_for(cfg.replications, [&](std::size_t rep) {
    auto rng = make_stream(cfg.seed, "consistency", rep);
    const Sample full = cfg.truth.draw(longest, rng);
    for (std::size_t k = 0; k < cfg.nus.size(); ++k) {
      Sample s;
      s.nodes.assign(full.nodes.begin(), full.nodes.begin() + static_cast<std::ptrdiff_t>(cfg.nus[k]));
      if (full.has_response()) s.y.assign(full.y.begin(), full.y.begin() + static_cast<std::ptrdiff_t>(cfg.nus[k]));
      const SaaResult fit = saa_solve(cfg.objective, s, cfg.cls, cfg.solver);
      r.dist[rep][k] = dl(fit.f, pop.f, cfg.dl_tol).value;
    }
  });
  std::size_t decreasing = 0;
  for (const auto& row : r.dist) {
    if (row.back() < row.front()) ++decreasing;
  }
  r.decreasing_fraction = static_cast<double>(decreasing) / static_cast<double>(cfg.replications);
  return r;
}

}  // namespace hypolib
