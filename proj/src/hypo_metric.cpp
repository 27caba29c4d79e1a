#include "hypolib/hypo_metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "hypolib/error.hpp"
#include "hypolib/parallel.hpp"

namespace hypolib {

namespace {

// Piecewise-linear function of alpha given by breakpoints; constant to the
// left of the first breakpoint and slope 1 to the right of the last.
struct Pl {
  std::vector<double> a;
  std::vector<double> v;
};

double interp(const std::vector<double>& a, const std::vector<double>& v, double t, double right_slope) {
  if (t <= a.front()) return v.front();
  if (t >= a.back()) return v.back() + right_slope * (t - a.back());
  const auto k = static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), t) - a.begin());
  const double w = (t - a[k - 1]) / (a[k] - a[k - 1]);
  return v[k - 1] + w * (v[k] - v[k - 1]);
}

// Drops interior breakpoints where the slope does not change.
void compress(std::vector<double>& a, std::vector<double>& v) {
  if (a.size() <= 2) return;
  std::size_t w = 1;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    const double s_in = (v[i] - v[w - 1]) / (a[i] - a[w - 1]);
    const double s_out = (v[i + 1] - v[i]) / (a[i + 1] - a[i]);
    if (std::abs(s_in - s_out) > 1e-12) {
      a[w] = a[i];
      v[w] = v[i];
      ++w;
    }
  }
  a[w] = a.back();
  v[w] = v.back();
  ++w;
  a.resize(w);
  v.resize(w);
}

// alpha -> dist((x_m, alpha), hypo f) as an exact piecewise-linear function.
Pl hypo_profile(std::size_t m, const GridFn& f) {
  const GridDomain& d = f.domain();
  struct Item {
    double t, dist, val;
  };
  std::vector<Item> items;
  items.reserve(f.size());
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (!f[y].is_finite()) continue;
    const double dy = d.linf_distance(m, y);
    items.push_back({f[y].value() + dy, dy, f[y].value()});
  }
  std::sort(items.begin(), items.end(), [](const Item& p, const Item& q) { return p.t < q.t; });
  const std::size_t n = items.size();
  std::vector<double> suffix_min(n + 1, kInf);
  for (std::size_t i = n; i-- > 0;) suffix_min[i] = std::min(suffix_min[i + 1], items[i].dist);

  Pl p;
  p.a.reserve(2 * n);
  p.v.reserve(2 * n);
  auto push = [&p](double a, double v) {
    if (!p.a.empty() && a <= p.a.back()) {
      p.v.back() = v;
      return;
    }
    p.a.push_back(a);
    p.v.push_back(v);
  };
  push(items[0].t, suffix_min[0]);
  double prefix_max = -kInf;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    prefix_max = std::max(prefix_max, items[i].val);
    const double A = suffix_min[i + 1];
    const double c = A + prefix_max;
    if (c > items[i].t && c < items[i + 1].t) push(c, A);
    push(items[i + 1].t, std::min(A, items[i + 1].t - prefix_max));
  }
  compress(p.a, p.v);
  return p;
}

double integral_const(double c, double a, double b) { return c * (std::exp(-a) - std::exp(-b)); }

// Integral of (v0 + (rho - p)) e^{-rho} over [p, q].
double integral_rise(double v0, double p, double q) {
  return (v0 + 1.0) * std::exp(-p) - (v0 + (q - p) + 1.0) * std::exp(-q);
}

struct Interval {
  double a, b, ga, gb;
  std::size_t count;
  double lo, hi;
};

void enclose(Interval& iv) {
  const double len = iv.b - iv.a;
  const double rise = std::clamp(iv.gb - iv.ga, 0.0, len);
  // Lower: flat then rise. Upper: rise then flat.
  iv.lo = integral_const(iv.ga, iv.a, iv.b - rise) + integral_rise(iv.ga, iv.b - rise, iv.b);
  iv.hi = integral_rise(iv.ga, iv.a, iv.a + rise) + integral_const(iv.ga + rise, iv.a + rise, iv.b);
  // Left-limit at b may exceed ga + len only by rounding.
  iv.hi = std::max(iv.hi, iv.lo);
}

}  // namespace

double dist_to_hypo(std::span<const double> x, double alpha, const GridFn& f) {
  const GridDomain& d = f.domain();
  if (x.size() != d.dim()) throw DomainError("point dimension does not match domain");
  double best = kInf;
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (!f[y].is_finite()) continue;
    best = std::min(best, std::max(d.linf_distance(y, x), alpha - f[y].value()));
  }
  return std::max(best, 0.0);
}

double dist_to_hypo(std::size_t m, double alpha, const GridFn& f) {
  const GridDomain& d = f.domain();
  double best = kInf;
  for (std::size_t y = 0; y < f.size(); ++y) {
    if (!f[y].is_finite()) continue;
    best = std::min(best, std::max(d.linf_distance(m, y), alpha - f[y].value()));
  }
  return std::max(best, 0.0);
}

DlProfile::DlProfile(const GridFn& f, const GridFn& g) {
  require_same_domain(f, g);
  const GridDomain& d = f.domain();
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < n; ++m) order[m] = m;
  std::stable_sort(order.begin(), order.end(),
                   [&d](std::size_t p, std::size_t q) { return d.norm_inf(p) < d.norm_inf(q); });
  nodes_.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const std::size_t m = order[k];
    const Pl pf = hypo_profile(m, f);
    const Pl pg = hypo_profile(m, g);
    NodeDiff& nd = nodes_[k];
    nd.norm = d.norm_inf(m);
    std::vector<double> a;
    a.reserve(pf.a.size() + pg.a.size());
    std::merge(pf.a.begin(), pf.a.end(), pg.a.begin(), pg.a.end(), std::back_inserter(a));
    a.erase(std::unique(a.begin(), a.end()), a.end());
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = interp(pf.a, pf.v, a[i], 1.0) - interp(pg.a, pg.v, a[i], 1.0);
    compress(a, v);
    nd.alpha = std::move(a);
    nd.delta = std::move(v);
    std::vector<std::size_t> idx(nd.alpha.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&nd](std::size_t p, std::size_t q) {
      return std::abs(nd.alpha[p]) < std::abs(nd.alpha[q]);
    });
    nd.abs_key.resize(idx.size());
    nd.run_max.resize(idx.size());
    double run = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      run = std::max(run, std::abs(nd.delta[idx[i]]));
      nd.abs_key[i] = std::abs(nd.alpha[idx[i]]);
      nd.run_max[i] = run;
    }
  });
  for (const auto& nd : nodes_) {
    breakpoints_ += nd.alpha.size();
    rho_star_ = std::max({rho_star_, nd.norm, nd.abs_key.empty() ? 0.0 : nd.abs_key.back()});
  }
  tail_c_ = dist_to_hypo(d.origin(), 0.0, f) + dist_to_hypo(d.origin(), 0.0, g);
}

double DlProfile::node_max(const NodeDiff& d, double rho) {
  double r = 0.0;
  const auto k = std::upper_bound(d.abs_key.begin(), d.abs_key.end(), rho) - d.abs_key.begin();
  if (k > 0) r = d.run_max[static_cast<std::size_t>(k - 1)];
  r = std::max(r, std::abs(interp(d.alpha, d.delta, rho, 0.0)));
  r = std::max(r, std::abs(interp(d.alpha, d.delta, -rho, 0.0)));
  return r;
}

double DlProfile::eval(double rho, std::size_t count) const {
  double r = 0.0;
  for (std::size_t k = 0; k < count; ++k) r = std::max(r, node_max(nodes_[k], rho));
  return r;
}

double DlProfile::at(double rho) const {
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  std::size_t count = 0;
  while (count < nodes_.size() && nodes_[count].norm <= rho + kGeomTol) ++count;
  return eval(rho, count);
}

DistReport DlProfile::integrate(double tol) const {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const double c = tail_c_;
  auto tail_bound = [c](double r) { return std::exp(-r) * (c + 2.0 * r + 2.0); };
  double rho_tail = 0.0;
  if (tail_bound(0.0) > tol / 2) {
    double hi = 1.0;
    while (tail_bound(hi) > tol / 2) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (tail_bound(mid) > tol / 2 ? lo : hi) = mid;
    }
    rho_tail = hi;
  }

  DistReport rep;
  rep.breakpoint_count = breakpoints_;
  double tail_lo = 0.0;
  double tail_hi = 0.0;
  double upper = 0.0;
  if (rho_star_ <= rho_tail) {
    upper = rho_star_;
    tail_lo = tail_hi = eval(rho_star_, nodes_.size()) * std::exp(-rho_star_);
  } else {
    upper = rho_tail;
    std::size_t count = 0;
    while (count < nodes_.size() && nodes_[count].norm <= upper + kGeomTol) ++count;
    tail_lo = eval(upper, count) * std::exp(-upper);
    tail_hi = std::max(tail_lo, tail_bound(upper));
  }
  rep.rho_max = upper;
  std::size_t evals = 1;

  auto cmp = [](const Interval& p, const Interval& q) { return p.hi - p.lo < q.hi - q.lo; };
  std::priority_queue<Interval, std::vector<Interval>, decltype(cmp)> queue(cmp);
  std::vector<Interval> done;
  double width = 0.0;
  std::size_t count = 0;
  while (count < nodes_.size() && nodes_[count].norm <= kGeomTol) ++count;
  double a = 0.0;
  while (a < upper) {
    double b = upper;
    if (count < nodes_.size()) b = std::min(b, nodes_[count].norm);
    if (b > a) {
      Interval iv{a, b, eval(a, count), eval(b, count), count, 0.0, 0.0};
      evals += 2;
      enclose(iv);
      width += iv.hi - iv.lo;
      queue.push(iv);
    }
    a = b;
    while (count < nodes_.size() && nodes_[count].norm <= a + kGeomTol) ++count;
  }

  const double budget = std::max(tol - (tail_hi - tail_lo), 0.0) * (1.0 - 1e-9);
  constexpr std::size_t kMaxEvals = 2'000'000;
  while (!queue.empty() && width > budget && evals < kMaxEvals) {
    Interval iv = queue.top();
    queue.pop();
    width -= iv.hi - iv.lo;
    if (iv.b - iv.a < 1e-12 * std::max(1.0, iv.b)) {
      done.push_back(iv);
      width += iv.hi - iv.lo;
      continue;
    }
    const double mid = 0.5 * (iv.a + iv.b);
    const double gm = eval(mid, iv.count);
    ++evals;
    Interval left{iv.a, mid, iv.ga, gm, iv.count, 0.0, 0.0};
    Interval right{mid, iv.b, gm, iv.gb, iv.count, 0.0, 0.0};
    enclose(left);
    enclose(right);
    width += (left.hi - left.lo) + (right.hi - right.lo);
    queue.push(left);
    queue.push(right);
  }
  double lo = tail_lo;
  double hi = tail_hi;
  while (!queue.empty()) {
    done.push_back(queue.top());
    queue.pop();
  }
  // Sum in a fixed order so results do not depend on heap layout.
  std::sort(done.begin(), done.end(), [](const Interval& p, const Interval& q) { return p.a < q.a; });
  for (const auto& iv : done) {
    lo += iv.lo;
    hi += iv.hi;
  }
  lo = std::max(lo, 0.0);
  hi = std::max(hi, lo);
  rep.value = 0.5 * (lo + hi);
  rep.error_bound = 0.5 * (hi - lo);
  rep.rho_evaluations = evals;
  return rep;
}

double dl_rho(const GridFn& f, const GridFn& g, double rho) { return DlProfile(f, g).at(rho); }

DistReport dl(const GridFn& f, const GridFn& g, double tol) { return DlProfile(f, g).integrate(tol); }

namespace {

double dhat_direction(const GridFn& f, const GridFn& g, double rho) {
  const GridDomain& d = f.domain();
  std::vector<double> t(f.size(), 0.0);
  parallel_for(f.size(), [&](std::size_t x) {
    if (d.norm_inf(x) > rho + kGeomTol || !f[x].is_finite() || f[x].value() < -rho) return;
    const double m = std::min(f[x].value(), rho);
    double best = kInf;
    for (std::size_t y = 0; y < g.size(); ++y) {
      if (!g[y].is_finite()) continue;
      best = std::min(best, std::max(d.linf_distance(x, y), m - g[y].value()));
    }
    t[x] = std::max(best, 0.0);
  });
  return *std::max_element(t.begin(), t.end());
}

}  // namespace

double dhat_rho(const GridFn& f, const GridFn& g, double rho) {
  require_same_domain(f, g);
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  return std::max(dhat_direction(f, g, rho), dhat_direction(g, f, rho));
}

SandwichReport check_sandwich(const GridFn& f, const GridFn& g, double rho, double tol) {
  require_same_domain(f, g);
  SandwichReport r;
  const std::size_t o = f.domain().origin();
  r.delta = std::max(dist_to_hypo(o, 0.0, f), dist_to_hypo(o, 0.0, g));
  r.lower = std::exp(-rho) * dhat_rho(f, g, rho);
  r.upper = (1.0 - std::exp(-rho)) * dhat_rho(f, g, 2.0 * rho + r.delta) + std::exp(-rho) * (r.delta + rho + 1.0);
  const DistReport d = dl(f, g, tol);
  r.dl_value = d.value;
  r.dl_error = d.error_bound;
  r.holds = r.lower <= r.dl_value + tol && r.dl_value <= r.upper + tol;
  return r;
}

std::vector<std::vector<double>> dl_matrix(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2,
                                           double tol) {
  std::vector<std::vector<double>> m(f1.size(), std::vector<double>(f2.size(), 0.0));
  const std::size_t cols = f2.size();
  parallel_for(f1.size() * cols, [&](std::size_t k) {
    const std::size_t i = k / cols;
    const std::size_t j = k % cols;
    m[i][j] = dl(f1[i], f2[j], tol).value;
  });
  return m;
}

double excess_from_matrix(const std::vector<std::vector<double>>& m, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  if (rows.empty()) return 0.0;
  if (cols.empty()) return kInf;
  double e = 0.0;
  for (std::size_t i : rows) {
    double best = kInf;
    for (std::size_t j : cols) best = std::min(best, m[i][j]);
    e = std::max(e, best);
  }
  return e;
}

double excess(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2, double tol) {
  if (f1.empty()) return 0.0;
  if (f2.empty()) return kInf;
  const auto m = dl_matrix(f1, f2, tol);
  std::vector<std::size_t> rows(f1.size());
  std::vector<std::size_t> cols(f2.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return excess_from_matrix(m, rows, cols);
}

double hausdorff(const std::vector<GridFn>& f1, const std::vector<GridFn>& f2, double tol) {
  return std::max(excess(f1, f2, tol), excess(f2, f1, tol));
}

}  // namespace hypolib
