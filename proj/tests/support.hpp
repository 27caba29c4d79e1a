#pragma once

// Shared fixtures and independent brute-force oracles for the test suites.
// Oracles here deliberately avoid the library's fast paths.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "hypolib/grid.hpp"

namespace testing {

using hypolib::DomainPtr;
using hypolib::ExtReal;
using hypolib::GridDomain;
using hypolib::GridFn;

inline DomainPtr grid1(double lo, double hi, double h) {
  return std::make_shared<const GridDomain>(GridDomain::uniform(1, lo, hi, h));
}

inline DomainPtr grid2(double lo, double hi, double h) {
  return std::make_shared<const GridDomain>(GridDomain::uniform(2, lo, hi, h));
}

inline GridFn values(const DomainPtr& d, const std::vector<double>& v) {
  return GridFn(d, std::vector<ExtReal>(v.begin(), v.end()));
}

// Random usc function: uniform values in [lo, hi], each node -inf with
// probability p_neg_inf (origin always finite so the hypograph is nonempty).
inline GridFn random_fn(const DomainPtr& d, std::mt19937_64& rng, double lo = -2.0, double hi = 2.0,
                        double p_neg_inf = 0.15) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::bernoulli_distribution hole(p_neg_inf);
  std::vector<ExtReal> v(d->size());
  for (std::size_t m = 0; m < d->size(); ++m) {
    v[m] = (m != d->origin() && hole(rng)) ? hypolib::kNegInf : ExtReal(u(rng));
  }
  return GridFn(d, std::move(v));
}

inline double linf(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

// dist_inf((x, alpha), hypo f) straight from the definition.
inline double oracle_dist(std::span<const double> x, double alpha, const GridFn& f) {
  double best = hypolib::kInf;
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (!f[y].is_finite()) continue;
    best = std::min(best, std::max(linf(x, f.domain().point(y)), std::max(0.0, alpha - f[y].value())));
  }
  return best;
}

// dl_rho by scanning every alpha at which either distance function can
// change slope: f(z) + |x - y| for all nodes y, z (covers both the
// saturation points and the crossing points), plus +-rho.
inline double oracle_dl_rho(const GridFn& f, const GridFn& g, double rho) {
  const auto& d = f.domain();
  double best = 0.0;
  for (std::size_t x = 0; x < d.size(); ++x) {
    if (d.norm_inf(x) > rho + 1e-9) continue;
    std::vector<double> cand{rho, -rho};
    for (const GridFn* h : {&f, &g}) {
      for (std::size_t z = 0; z < d.size(); ++z) {
        if (!(*h)[z].is_finite()) continue;
        for (std::size_t y = 0; y < d.size(); ++y) cand.push_back((*h)[z].value() + linf(d.point(x), d.point(y)));
      }
    }
    for (double a : cand) {
      if (std::abs(a) > rho) continue;
      best = std::max(best, std::abs(oracle_dist(d.point(x), a, f) - oracle_dist(d.point(x), a, g)));
    }
  }
  return best;
}

// dhat_rho by scanning tau over the finite candidate set of distances and
// value gaps, checking the enlargement condition directly.
inline double oracle_dhat_direction(const GridFn& f, const GridFn& g, double rho) {
  const auto& d = f.domain();
  std::vector<double> taus{0.0};
  for (std::size_t x = 0; x < d.size(); ++x) {
    for (std::size_t y = 0; y < d.size(); ++y) {
      taus.push_back(linf(d.point(x), d.point(y)));
      if (f[x].is_finite() && g[y].is_finite()) taus.push_back(std::min(f[x].value(), rho) - g[y].value());
    }
  }
  std::sort(taus.begin(), taus.end());
  for (double tau : taus) {
    if (tau < 0) continue;
    bool ok = true;
    for (std::size_t x = 0; x < d.size() && ok; ++x) {
      if (d.norm_inf(x) > rho + 1e-9 || !f[x].is_finite() || f[x].value() < -rho) continue;
      double sup = -hypolib::kInf;
      for (std::size_t y = 0; y < d.size(); ++y) {
        if (linf(d.point(x), d.point(y)) <= tau + 1e-12 && g[y].is_finite()) sup = std::max(sup, g[y].value());
      }
      ok = sup >= std::min(f[x].value(), rho) - tau - 1e-12;
    }
    if (ok) return tau;
  }
  return hypolib::kInf;
}

inline double oracle_dhat(const GridFn& f, const GridFn& g, double rho) {
  return std::max(oracle_dhat_direction(f, g, rho), oracle_dhat_direction(g, f, rho));
}

// kappa-Lipschitz function (sup-norm) as a lower envelope of cones.
inline GridFn random_lipschitz(const DomainPtr& d, std::mt19937_64& rng, double kappa, std::size_t cones = 4) {
  std::uniform_real_distribution<double> level(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> node(0, d->size() - 1);
  std::vector<std::pair<std::size_t, double>> c(cones);
  for (auto& k : c) k = {node(rng), level(rng)};
  std::vector<ExtReal> v(d->size());
  for (std::size_t x = 0; x < d->size(); ++x) {
    double best = hypolib::kInf;
    for (const auto& [y, a] : c) best = std::min(best, a + kappa * d->linf_distance(x, y));
    v[x] = best;
  }
  return GridFn(d, std::move(v));
}

// Finite families with value tables for which both excess premises hold by
// construction: gamma is at least every nearest-neighbour distance and tau
// absorbs the worst value gap inside the gamma-balls.
struct ArgminInstance {
  std::vector<GridFn> f1, f2;
  std::vector<double> phi1, phi2;
  std::vector<std::vector<double>> dist;  // over f1 followed by f2
  double tau = 0.0, gamma = 0.0, eps = 0.0, delta = 0.0;
};

template <class DistFn>
inline ArgminInstance random_argmin_instance(const DomainPtr& d, std::mt19937_64& rng, DistFn&& matrix,
                                             std::size_t size = 10) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    ArgminInstance in;
    for (std::size_t i = 0; i < size; ++i) in.f1.push_back(random_fn(d, rng));
    for (std::size_t i = 0; i < size; ++i) {
      if (u(rng) < 0.5) {
        in.f2.push_back(random_fn(d, rng));
        continue;
      }
      // Perturbed copy of an F1 member.
      const GridFn& base = in.f1[static_cast<std::size_t>(u(rng) * static_cast<double>(size)) % size];
      std::vector<ExtReal> v(base.values().begin(), base.values().end());
      for (auto& x : v) {
        if (x.is_finite()) x = x.value() + 0.3 * (u(rng) - 0.5);
      }
      in.f2.emplace_back(d, std::move(v));
    }
    auto phi = [&] { return u(rng) < 0.1 ? hypolib::kInf : 5.0 * u(rng); };
    for (std::size_t i = 0; i < size; ++i) in.phi1.push_back(phi());
    for (std::size_t i = 0; i < size; ++i) in.phi2.push_back(phi());
    std::vector<GridFn> all(in.f1);
    all.insert(all.end(), in.f2.begin(), in.f2.end());
    in.dist = matrix(all);

    double gamma = 0.0;
    for (std::size_t a = 0; a < 2 * size; ++a) {
      const std::size_t lo = a < size ? size : 0;
      double nearest = hypolib::kInf;
      for (std::size_t b = lo; b < lo + size; ++b) nearest = std::min(nearest, in.dist[a][b]);
      gamma = std::max(gamma, nearest);
    }
    in.gamma = gamma * (1.0 + 0.5 * u(rng));
    double tau = 0.0;
    for (std::size_t a = 0; a < 2 * size; ++a) {
      const bool from_f1 = a < size;
      const std::size_t lo = from_f1 ? size : 0;
      const double own = from_f1 ? in.phi1[a] : in.phi2[a - size];
      if (own == hypolib::kInf) continue;
      double best = hypolib::kInf;
      for (std::size_t b = lo; b < lo + size; ++b) {
        if (in.dist[a][b] <= in.gamma) best = std::min(best, from_f1 ? in.phi2[b - size] : in.phi1[b]);
      }
      tau = std::max(tau, best - own);
    }
    if (tau == hypolib::kInf) continue;
    in.tau = tau + 0.5 * u(rng);
    in.eps = u(rng);
    in.delta = 5.0 * u(rng);
    return in;
  }
}

}  // namespace testing
