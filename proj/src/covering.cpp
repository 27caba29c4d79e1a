#include <algorithm>
#include <cmath>

#include "hypolib/approximation.hpp"
#include "hypolib/error.hpp"
#include "hypolib/hypo_metric.hpp"
#include "hypolib/parallel.hpp"

namespace hypolib {

double meshsize(const BoxPartition& p, double rho) {
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  const double R = p.half_width();
  if (rho >= R - kGeomTol) return kInf;
  // All box cells are congruent, so one axis suffices; the worst cell is one
  // whose closure meets [-rho, rho] with the largest one-sided reach.
  const double w = p.width();
  double tau = 0.0;
  for (std::size_t k = 0; k < p.cells_per_axis(); ++k) {
    const double l = -R + static_cast<double>(k) * w;
    const double u = l + w;
    if (l > rho + kGeomTol || u < -rho - kGeomTol) continue;
    const double lo = std::max(l, -rho);
    const double hi = std::min(u, rho);
    tau = std::max({tau, u - lo, hi - l});
  }
  return tau;
}

EpiSpline0 epispline_approx(const GridFn& f, const BoxPartition& p, double rho, double rho_prime) {
  if (p.dim() != f.domain().dim()) throw DomainError("partition dimension does not match domain");
  if (!(rho_prime > rho)) throw PreconditionError("rho' must exceed rho");
  const double mu = meshsize(p, rho);
  if (!(mu <= rho)) {
    throw PreconditionError("meshsize " + std::to_string(mu) + " exceeds rho " + std::to_string(rho));
  }
  const GridDomain& d = f.domain();
  std::vector<double> cell_max(p.cell_count(), -kInf);
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (!f[x].is_finite()) continue;
    for (std::size_t c : p.closure_cells(d.point(x))) cell_max[c] = std::max(cell_max[c], f[x].value());
  }
  std::vector<double> s(p.cell_count());
  for (std::size_t c = 0; c < s.size(); ++c) s[c] = -std::clamp(cell_max[c], -rho_prime, rho_prime);
  return EpiSpline0(p, std::move(s));
}

// ---------------------------------------------------------------------------

double covering_margin(double eps, double r, double gamma1, double gamma2) {
  const double lhs = 2.0 * (r + 1.0) / r * (std::log(1.0 / eps) + std::log(1.0 / gamma1) + r / 2.0 + std::log(r + 1.0)) - 1.0;
  return lhs - gamma2 * eps;
}

BoxPartition CoverParams::partition() const { return BoxPartition(n, omega * rho, static_cast<std::size_t>(nu)); }

CoverParams cover_params(double eps, double r, double gamma1, double gamma2, double gamma3, double omega,
                         std::size_t n, const CoverOptions& opts) {
  if (!(gamma1 > 0 && gamma2 > 0 && gamma3 > 0) || std::abs(gamma1 + gamma2 + gamma3 - 1.0) > 1e-9) {
    throw PreconditionError("gamma1, gamma2, gamma3 must be positive and sum to 1");
  }
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("r must be positive");
  if (n == 0) throw PreconditionError("dimension must be positive");
  if (opts.compat) {
    if (!(omega > 0.0)) throw PreconditionError("omega must be positive");
  } else if (!(omega > 1.0)) {
    throw PreconditionError("omega must exceed 1 (compatibility mode allows smaller values)");
  }

  CoverParams p;
  p.r = r;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  p.gamma3 = gamma3;
  p.omega = omega;
  p.n = n;
  p.compat = opts.compat;

  // The margin decreases in eps, so the condition on (0, eps_bar] reduces to
  // the condition at eps_bar.
  if (opts.eps_bar) {
    p.eps_bar = *opts.eps_bar;
    if (!(p.eps_bar > 0.0 && p.eps_bar < 1.0)) throw PreconditionError("eps_bar must lie in (0, 1)");
    if (!(covering_margin(p.eps_bar, r, gamma1, gamma2) > 0.0)) {
      throw PreconditionError("covering condition fails at the given eps_bar");
    }
  } else {
    const double cap = opts.eps_bar_cap;
    if (!(cap > 0.0 && cap < 1.0)) throw PreconditionError("eps_bar cap must lie in (0, 1)");
    if (covering_margin(cap, r, gamma1, gamma2) > 0.0) {
      p.eps_bar = cap;
    } else {
      double lo = 0.0, hi = cap;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (covering_margin(mid, r, gamma1, gamma2) > 0.0 ? lo : hi) = mid;
      }
      if (!(lo > 0.0)) throw PreconditionError("no eps_bar satisfies the covering condition");
      p.eps_bar = lo;
    }
  }

  p.c1 = 2.0 * (r + 1.0) / r;
  p.c2 = p.c1 * (std::log(1.0 / gamma1) + r / 2.0 + std::log(r + 1.0)) - 1.0;
  p.c3 = 2.0 * omega / gamma2;
  p.c4 = omega / gamma3;
  const double lb = std::log(1.0 / p.eps_bar);
  p.c5 = p.c1 * p.c3 + (p.c2 * p.c3 + 1.0) / lb;
  p.c6 = p.c1 * p.c4 + (p.c2 * p.c4 + 2.0) / lb;
  p.c7 = p.c5 + 1.0 / (lb / p.eps_bar);
  p.bracket = std::log(p.c6) / lb + 1.0 + std::exp(-1.0);

  if (!(eps > 0.0) || eps > p.eps_bar) {
    throw PreconditionError("eps must lie in (0, eps_bar] with eps_bar = " + std::to_string(p.eps_bar));
  }
  p.eps = eps;
  p.rho = p.c1 * std::log(1.0 / eps) + p.c2;
  const double nu = std::ceil(2.0 * omega * p.rho / (gamma2 * eps));
  const double m = std::ceil(omega * p.rho / (gamma3 * eps)) + 1.0;
  if (!(nu < 9e15 && m < 9e15)) throw PreconditionError("cover grid sizes overflow");
  p.nu = static_cast<std::uint64_t>(nu);
  p.m = static_cast<std::uint64_t>(m);
  const double nun = std::pow(nu, static_cast<double>(n));
  p.K = nun + 1.0;
  p.log_count = (nun + 1.0) * std::log(m);
  const double le = std::log(1.0 / eps);
  p.bound = std::pow(p.c7, static_cast<double>(n)) * p.bracket * std::pow(1.0 / eps, static_cast<double>(n)) *
            std::pow(le, static_cast<double>(n) + 1.0);
  if (p.m <= opts.max_sigma) {
    p.sigma.resize(p.m);
    const double top = omega * p.rho;
    for (std::uint64_t j = 0; j < p.m; ++j) {
      p.sigma[j] = -top + 2.0 * static_cast<double>(j) * top / static_cast<double>(p.m - 1);
    }
  }
  return p;
}

double nearest_sigma(const std::vector<double>& sigma, double v) {
  if (sigma.empty()) throw PreconditionError("range gridpoints not materialized");
  const auto it = std::lower_bound(sigma.begin(), sigma.end(), v);
  if (it == sigma.begin()) return sigma.front();
  if (it == sigma.end()) return sigma.back();
  const double above = *it;
  const double below = *(it - 1);
  return (v - below < above - v) ? below : above;
}

GridFn quantize_to_cover(const GridFn& f, const CoverParams& p, std::optional<double> rho_prime) {
  if (f.domain().dim() != p.n) throw DomainError("function dimension does not match cover parameters");
  const std::size_t o = f.domain().origin();
  const double d0 = dist_to_hypo(o, 0.0, f);
  if (d0 > p.r + kGeomTol) {
    throw PreconditionError("dist(0, hypo f) = " + std::to_string(d0) + " exceeds r = " + std::to_string(p.r));
  }
  const double top = p.omega * p.rho;
  const double rp = rho_prime.value_or(top);
  if (rp > top + kGeomTol) throw PreconditionError("rho' must not exceed omega * rho");
  const BoxPartition part = p.partition();
  const EpiSpline0 s = epispline_approx(f, part, p.rho, rp);
  std::vector<double> level(part.cell_count());
  for (std::size_t c = 0; c < level.size(); ++c) level[c] = nearest_sigma(p.sigma, -s.cell_values()[c]);
  const GridDomain& d = f.domain();
  std::vector<ExtReal> out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) {
    double v = -kInf;
    for (std::size_t c : part.closure_cells(d.point(x))) v = std::max(v, level[c]);
    out[x] = v;
  }
  return GridFn(f.domain_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------

PackingFamily packing_family(double rho, double eps, std::size_t n, double member_cap) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw PreconditionError("rho must be positive");
  if (n == 0) throw PreconditionError("dimension must be positive");
  const double top = rho * std::exp(-rho);
  // Relative slack so the boundary eps = rho e^{-rho}/6 is admitted despite
  // rounding in the division.
  constexpr double kSlack = 1e-12;
  if (!(eps > 0.0) || eps > top / 6.0 * (1.0 + kSlack)) {
    throw PreconditionError("eps must lie in (0, rho e^{-rho}/6]");
  }
  const double nu = std::floor(top / (3.0 * eps) * (1.0 + kSlack));
  const double points = std::pow(nu - 1.0, static_cast<double>(n));
  const double log_members = points * std::log(nu);
  if (log_members > std::log(member_cap) + 1e-12) {
    throw PreconditionError("packing family would have " + std::to_string(std::exp(log_members)) +
                            " members, above the cap " + std::to_string(member_cap));
  }
  PackingFamily fam;
  fam.rho = rho;
  fam.eps = eps;
  fam.n = n;
  fam.nu_eps = static_cast<std::uint64_t>(nu);
  const std::size_t v = fam.nu_eps;
  for (std::size_t l = 1; l <= v; ++l) fam.levels.push_back(-static_cast<double>(l) * rho / nu);
  fam.domain = std::make_shared<const GridDomain>(std::vector<AxisSpec>(n, AxisSpec{0.0, rho, rho / nu}));

  // Lattice nodes: every coordinate strictly inside (0, rho).
  const GridDomain& d = *fam.domain;
  std::vector<std::size_t> lattice;
  for (std::size_t m = 0; m < d.size(); ++m) {
    const auto off = d.offsets(m);
    bool inside = true;
    for (auto k : off) inside = inside && k >= 1 && k <= static_cast<std::int64_t>(v) - 1;
    if (inside) lattice.push_back(m);
  }
  const auto count = static_cast<std::size_t>(std::llround(std::exp(log_members)));
  fam.members.reserve(count);
  std::vector<std::size_t> digit(lattice.size(), 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::vector<ExtReal> vals(d.size(), kNegInf);
    for (std::size_t i = 0; i < lattice.size(); ++i) vals[lattice[i]] = fam.levels[digit[i]];
    fam.members.emplace_back(fam.domain, std::move(vals));
    for (std::size_t i = lattice.size(); i-- > 0;) {
      if (++digit[i] < v) break;
      digit[i] = 0;
    }
  }
  return fam;
}

PackingReport verify_packing_separation(const PackingFamily& fam) {
  PackingReport rep;
  const std::size_t k = fam.members.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> lower(pairs.size());
  const double w = std::exp(-fam.rho);
  parallel_for(pairs.size(), [&](std::size_t p) {
    lower[p] = w * dhat_rho(fam.members[pairs[p].first], fam.members[pairs[p].second], fam.rho);
  });
  rep.pairs = pairs.size();
  rep.min_pairwise_lower = lower.empty() ? kInf : *std::min_element(lower.begin(), lower.end());
  rep.separated = rep.min_pairwise_lower > fam.eps;
  rep.log_count = std::pow(static_cast<double>(fam.nu_eps) - 1.0, static_cast<double>(fam.n)) *
                  std::log(static_cast<double>(fam.nu_eps));
  const double n = static_cast<double>(fam.n);
  rep.lower_bound = std::pow(fam.rho * std::exp(-fam.rho) / 6.0, n) * 0.5 * std::pow(fam.eps, -n) *
                    std::log(1.0 / fam.eps);
  return rep;
}

}  // namespace hypolib
