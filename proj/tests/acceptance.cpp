// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hypolib/approximation.hpp"
#include "hypolib/estimation.hpp"
#include "hypolib/hypo_metric.hpp"
#include "hypolib/random.hpp"
#include "support.hpp"

using namespace hypolib;
using testing::grid1;
using testing::grid2;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Checker {
  bool ok = true;
  std::size_t failures = 0;
  std::string first;
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    if (failures++ == 0) first = what;
  }
  [[nodiscard]] std::string summary() const {
    return ok ? "" : std::to_string(failures) + " failed checks, first: " + first;
  }
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

PaDiff random_padiff(std::mt19937_64& rng, std::size_t n, std::size_t q, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto side = [&] {
    std::vector<AffinePiece> pieces(q);
    for (auto& p : pieces) {
      p.slope.resize(n);
      for (auto& a : p.slope) a = u(rng);
      p.offset = u(rng);
    }
    return MaxAffine(std::move(pieces));
  };
  return PaDiff{side(), side(), radius};
}

Truth regression_truth(const DomainPtr& d, const std::function<double(double)>& f0, double sigma) {
  Truth t;
  t.domain = d;
  t.weights.assign(d->size(), 1.0 / static_cast<double>(d->size()));
  for (std::size_t x = 0; x < d->size(); ++x) t.f0.push_back(f0(d->point(x)[0]));
  t.noise = Truth::Noise::Gaussian;
  t.sigma = sigma;
  return t;
}

FunctionClass constants(const DomainPtr& d) {
  FunctionClass c = FunctionClass::box(d, -kInf, kInf);
  c.kappa = 0.0;
  return c;
}

// Shared by criteria 1 and 2.
struct Triple {
  GridFn f, g, h;
};

std::vector<Triple> metric_triples() {
  std::mt19937_64 rng(1001);
  std::vector<Triple> out;
  for (int t = 0; t < 200; ++t) {
    auto d = t % 2 == 0 ? grid1(-2, 2, 0.2) : grid2(-2, 2, 0.2);
    GridFn f = testing::random_fn(d, rng, -3, 3);
    GridFn g = testing::random_fn(d, rng, -3, 3);
    GridFn h = testing::random_fn(d, rng, -3, 3);
    out.push_back({std::move(f), std::move(g), std::move(h)});
  }
  return out;
}

Outcome metric_axioms() {
  const auto t0 = std::chrono::steady_clock::now();
  const double tol = 1e-4;
  // Values are exact maxima of differences; only the final sum in the
  // triangle inequality is rounded.
  const double fp = 1e-12;
  Checker c;
  double worst_sym = 0.0, worst_tri = -kInf;
  for (const auto& [f, g, h] : metric_triples()) {
    for (double rho : {0.5, 1.0, 2.0, 4.0}) {
      const double fg = dl_rho(f, g, rho), gf = dl_rho(g, f, rho);
      const double gh = dl_rho(g, h, rho), fh = dl_rho(f, h, rho);
      c.expect(fg == gf, "dl_rho symmetry at rho " + fmt(rho));
      c.expect(fh <= fg + gh + fp, "dl_rho triangle at rho " + fmt(rho));
    }
    const double fg = dl(f, g, tol).value, gf = dl(g, f, tol).value;
    const double gh = dl(g, h, tol).value, fh = dl(f, h, tol).value;
    worst_sym = std::max(worst_sym, std::abs(fg - gf));
    worst_tri = std::max(worst_tri, fh - fg - gh);
    c.expect(std::abs(fg - gf) <= 3 * tol, "dl symmetry");
    c.expect(fh <= fg + gh + 3 * tol, "dl triangle");
  }
  const double secs = seconds_since(t0);
  c.expect(secs < 60.0, "runtime");
  return {c.ok, "200 triples; max |dl(f,g)-dl(g,f)| " + fmt(worst_sym) + ", max triangle excess " + fmt(worst_tri) +
                    ", " + fmt(secs, 3) + " s " + c.summary()};
}

Outcome dl_bounds() {
  const double tol = 1e-4;
  Checker c;
  double worst = -kInf, worst_nonneg = 0.0;
  for (const auto& [f, g, h] : metric_triples()) {
    (void)h;
    const double df = dist_to_hypo(f.domain().origin(), 0.0, f);
    const double dg = dist_to_hypo(g.domain().origin(), 0.0, g);
    const double v = dl(f, g, tol).value;
    worst = std::max(worst, v - std::max(df, dg) - 1.0);
    c.expect(v <= std::max(df, dg) + 1.0 + tol, "origin bound");
  }
  std::mt19937_64 rng(1002);
  for (int t = 0; t < 200; ++t) {
    auto d = t % 2 == 0 ? grid1(-2, 2, 0.2) : grid2(-2, 2, 0.2);
    const GridFn f = testing::random_fn(d, rng, 0, 3);
    const GridFn g = testing::random_fn(d, rng, 0, 3);
    const double v = dl(f, g, tol).value;
    worst_nonneg = std::max(worst_nonneg, v);
    c.expect(v <= 1.0 + tol, "nonnegative pair bound");
  }
  return {c.ok, "200 pairs; max dl - (max origin distance + 1) " + fmt(worst) + "; 200 nonnegative pairs, max dl " +
                    fmt(worst_nonneg) + " " + c.summary()};
}

Outcome sandwich() {
  std::mt19937_64 rng(1003);
  Checker c;
  for (int t = 0; t < 100; ++t) {
    auto d = t % 2 == 0 ? grid1(-3, 3, 0.25) : grid2(-1.5, 1.5, 0.25);
    const GridFn f = testing::random_fn(d, rng, -3, 3);
    const GridFn g = testing::random_fn(d, rng, -3, 3);
    for (double rho : {1.0, 2.0, 4.0}) c.expect(check_sandwich(f, g, rho, 1e-4).holds, "rho " + fmt(rho));
  }
  return {c.ok, "100 pairs x rho {1,2,4} " + c.summary()};
}

Outcome epispline_meshsize() {
  std::mt19937_64 rng(1004);
  auto d = grid1(-2, 2, 0.01);
  const double rho = 1.0, rho_prime = 2.0;
  std::vector<GridFn> fs;
  for (int t = 0; t < 50; ++t) fs.push_back(testing::random_fn(d, rng, -3, 3, 0.2));
  Checker c;
  std::string detail;
  for (std::size_t cells : {8u, 16u, 40u}) {
    const BoxPartition p(1, 2.0, cells);
    const double mu = meshsize(p, rho);
    double worst = 0.0;
    for (const GridFn& f : fs) {
      const EpiSpline0 s = epispline_approx(f, p, rho, rho_prime);
      const double v = dhat_rho(f, s.negated_on(d), rho);
      worst = std::max(worst, v);
      c.expect(v <= mu, "dhat bound, width " + fmt(p.width()));
      for (std::size_t x = 0; x < f.size(); ++x) {
        const double sx = s(d->point(x));
        const double cap = f[x].is_finite() ? std::max(-rho_prime, std::min(rho_prime, -f[x].value())) : rho_prime;
        c.expect(sx >= -rho_prime && sx <= cap, "value bounds, width " + fmt(p.width()));
      }
    }
    detail += "width " + fmt(p.width()) + ": max dhat " + fmt(worst) + " <= mu " + fmt(mu) + "; ";
  }
  return {c.ok, "50 functions; " + detail + c.summary()};
}

Outcome quantizer() {
  const CoverParams p = cover_params(0.05, 2.0, 1.0 / 3, 1.0 / 3, 1.0 / 3, 1.001, 1);
  std::mt19937_64 rng(1005);
  auto d = grid1(-3, 3, 0.05);
  Checker c;
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const GridFn f = testing::random_fn(d, rng, -2, 2, 0.2);
    c.expect(dist_to_hypo(d->origin(), 0.0, f) <= 2.0, "generated f outside the r-ball condition");
    const double v = dl(f, quantize_to_cover(f, p), 1e-4).value;
    worst = std::max(worst, v);
    c.expect(v <= 0.05 + 1e-3, "quantization error");
  }
  c.expect(p.bound_holds(), "covering bound");
  return {c.ok, "30 functions, max dl " + fmt(worst) + "; (nu^n+1) log m = " + fmt(p.log_count) + " <= bound " +
                    fmt(p.bound) + " (c6 " + fmt(p.c6) + ", c7 " + fmt(p.c7) + ") " + c.summary()};
}

Outcome packing() {
  const auto t0 = std::chrono::steady_clock::now();
  const PackingFamily fam = packing_family(1.0, 0.03, 1);
  const PackingReport r = verify_packing_separation(fam);
  const double secs = seconds_since(t0);
  Checker c;
  c.expect(fam.members.size() == 64, "member count");
  c.expect(r.pairs == 2016, "pair count");
  c.expect(r.separated && r.min_pairwise_lower > 0.03, "separation");
  c.expect(r.log_count > r.lower_bound, "count bound");
  c.expect(secs < 30.0, "runtime");
  return {c.ok, std::to_string(fam.members.size()) + " members, " + std::to_string(r.pairs) +
                    " pairs, min e^-1 dhat " + fmt(r.min_pairwise_lower) + ", log count " + fmt(r.log_count) +
                    " > " + fmt(r.lower_bound) + ", " + fmt(secs, 3) + " s " + c.summary()};
}

std::vector<double> pipeline_dls(const GridFn& f, const std::vector<double>& lambdas) {
  PipelineSchedule sched;
  const std::size_t qs[] = {2, 4, 8};
  for (std::size_t k = 0; k < lambdas.size(); ++k) sched.stages.push_back({kInf, lambdas[k], 2.0, qs[k]});
  PaFitOptions fit;
  fit.seed = 1;
  std::vector<double> out;
  for (const auto& r : hypo_approx_sequence(f, sched, 1e-4, fit)) out.push_back(r.dl_to_target);
  return out;
}

Outcome pipeline() {
  auto d = grid1(-2, 2, 0.01);
  const GridFn step = GridFn::from(d, [](std::span<const double> x) { return ExtReal(x[0] <= 0 ? 0.0 : -2.0); });
  const auto ours = pipeline_dls(step, {0.5, 0.01, 0.0005});
  const auto coarse = pipeline_dls(step, {0.5, 0.1, 0.02});
  Checker c;
  c.expect(ours.back() < 0.05, "final dl");
  c.expect(ours.back() < ours.front(), "final below first");
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x, 4);
    return s;
  };
  return {c.ok, "lambda {0.5,0.01,0.0005}: dl " + list(ours) + " | lambda {0.5,0.1,0.02} (reported only): dl " +
                    list(coarse) + " " + c.summary()};
}

Outcome moreau() {
  Checker c;
  auto fine = grid1(-3, 3, 0.001);
  const GridFn q = GridFn::from(fine, [](std::span<const double> x) { return ExtReal(-x[0] * x[0]); });
  const double at1 = moreau_envelope(q, 0.5).at(std::vector<double>{1.0}).value();
  c.expect(std::abs(at1 + 0.5) <= 2e-3, "closed form");

  std::mt19937_64 rng(1008);
  for (int t = 0; t < 20; ++t) {
    auto d = t % 2 == 0 ? grid1(-2, 2, 0.1) : grid2(-1, 1, 0.2);
    const GridFn f = testing::random_fn(d, rng);
    for (double lambda : {1.0, 0.3, 0.1, 0.03}) {
      const GridFn e = moreau_envelope(f, lambda);
      for (std::size_t x = 0; x < f.size(); ++x) c.expect(e[x] >= f[x], "majorization");
    }
  }
  const double tol = 1e-6;
  auto d = grid1(-2, 2, 0.1);
  std::string trail;
  for (int t = 0; t < 10; ++t) {
    const GridFn f = testing::random_fn(d, rng, -1, 1, 0.0);
    double prev = kInf;
    for (double lambda : {1.0, 0.3, 0.1, 0.03}) {
      const double v = dl(moreau_envelope(f, lambda), f, tol).value;
      if (t == 0) trail += (trail.empty() ? "" : ", ") + fmt(v, 4);
      c.expect(v <= prev + 2 * tol, "dl decreasing in lambda");
      prev = v;
    }
  }
  return {c.ok, "e_0.5(-x^2)(1) = " + fmt(at1, 8) + "; first dl trail " + trail + " " + c.summary()};
}

Outcome pa_fit_recovery() {
  Checker c;
  std::string detail;
  auto d1 = grid1(-2, 2, 0.1);
  const GridFn affine = GridFn::from(d1, [](std::span<const double> x) { return ExtReal(2.0 * x[0] + 1.0); });
  const PaFitResult a = pa_fit(affine, 1, 2.0);
  auto d2 = grid1(-2, 2, 0.05);
  const GridFn absx = GridFn::from(d2, [](std::span<const double> x) { return ExtReal(std::abs(x[0])); });
  const PaFitResult b = pa_fit(absx, 2, 2.0);
  std::mt19937_64 rng(2024);
  auto d3 = grid2(-1, 1, 0.1);
  const GridFn rnd = pa_to_gridfn(random_padiff(rng, 2, 3, 1.0), d3);
  PaFitOptions opts;
  opts.restarts = 20;
  opts.seed = 3;
  const PaFitResult r = pa_fit(rnd, 3, 1.0, opts);
  for (const auto* res : {&a, &b, &r}) {
    c.expect(res->residual < 1e-4, "residual");
    c.expect(res->monotone, "monotone");
    for (std::size_t k = 1; k < res->trace.size(); ++k) c.expect(res->trace[k] <= res->trace[k - 1], "trace");
    detail += fmt(res->residual, 3) + " ";
  }
  return {c.ok, "residuals (affine, |x|, random n=2 q=3): " + detail + c.summary()};
}

Outcome saa_oracles() {
  Checker c;
  double worst_mean = 0.0, worst_freq = 0.0;
  auto d = grid1(-2, 2, 0.5);
  const Truth t = regression_truth(d, [](double) { return 0.7; }, 1.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    const Sample s = t.draw(257, rng);
    const double mean = std::accumulate(s.y.begin(), s.y.end(), 0.0) / static_cast<double>(s.y.size());
    const SaaResult r = saa_solve(ObjectiveKind::LsRegression, s, constants(d));
    for (std::size_t x = 0; x < d->size(); ++x) worst_mean = std::max(worst_mean, std::abs(r.f[x].value() - mean));
  }
  c.expect(worst_mean <= 1e-6, "constants regression");
  for (double h : {1.0, 0.5}) {
    auto dh = grid1(-2, 2, h);
    Truth dens;
    dens.domain = dh;
    for (std::size_t x = 0; x < dh->size(); ++x) dens.weights.push_back(1.0 + static_cast<double>(x % 3));
    const double total = std::accumulate(dens.weights.begin(), dens.weights.end(), 0.0);
    for (auto& w : dens.weights) w /= total;
    std::mt19937_64 rng(21);
    const Sample s = dens.draw(400, rng);
    std::vector<double> freq(dh->size(), 0.0);
    for (auto x : s.nodes) freq[x] += 1.0 / 400.0;
    FunctionClass cls = FunctionClass::box(dh, 0.0, 100.0);
    cls.unit_integral = true;
    const SaaResult r = saa_solve(ObjectiveKind::MleDensity, s, cls);
    for (std::size_t x = 0; x < dh->size(); ++x) worst_freq = std::max(worst_freq, std::abs(r.f[x].value() - freq[x] / h));
  }
  c.expect(worst_freq <= 1e-4, "histogram MLE");
  return {c.ok, "max |f - mean| " + fmt(worst_mean, 3) + ", max |f - freq/h| " + fmt(worst_freq, 3) + " " +
                    c.summary()};
}

Outcome argmin_instances() {
  std::mt19937_64 rng(1011);
  auto matrix = [](const std::vector<GridFn>& all) { return dl_matrix(all, all, 1e-6); };
  Checker c;
  double slack = kInf;
  for (int k = 0; k < 100; ++k) {
    auto d = k % 2 == 0 ? grid1(-2, 2, 0.5) : grid2(-1, 1, 0.5);
    const auto in = testing::random_argmin_instance(d, rng, matrix);
    const ArgminReport r = argmin_excess_check(in.dist, in.f1.size(), in.phi1, in.phi2, in.tau, in.gamma, in.eps,
                                               in.delta);
    c.expect(r.premise_level && r.premise_argmin, "premises");
    c.expect(r.conclusions_hold(), "conclusions");
    slack = std::min({slack, in.gamma - r.level_excess, in.gamma - r.argmin_excess});
  }
  return {c.ok, "100 instances; min gamma - excess " + fmt(slack) + " " + c.summary()};
}

Outcome holder() {
  std::mt19937_64 rng(1012);
  Checker c;
  double worst = -kInf;
  for (int k = 0; k < 50; ++k) {
    auto d = k % 2 == 0 ? grid1(-2, 2, 0.25) : grid2(-1, 1, 0.25);
    const GridFn f = testing::random_lipschitz(d, rng, 2.0);
    const GridFn g = testing::random_lipschitz(d, rng, 2.0);
    const HolderReport r = check_holder_pointwise(f, g, 2.0, 1e-4);
    worst = std::max(worst, r.max_violation);
    c.expect(r.holds, "pointwise bound");
  }
  return {c.ok, "50 pairs; max gap " + fmt(worst) + " " + c.summary()};
}

Outcome statistical() {
  Checker c;
  auto d = grid1(-1, 1, 0.5);
  ExperimentConfig cfg;
  cfg.objective = ObjectiveKind::LsRegression;
  cfg.truth = regression_truth(d, [](double) { return 0.3; }, 1.0);
  cfg.cls = constants(d);
  cfg.nus = {100, 1000, 10000};
  cfg.replications = 50;
  cfg.seed = 13;
  const RateReport rate = rate_experiment(cfg);
  c.expect(rate.slope >= -1.4 && rate.slope <= -0.6, "rate slope");

  auto dl1 = grid1(-2, 2, 0.25);
  const Truth t = regression_truth(dl1, [](double x) { return std::sin(x); }, 1.0);
  FunctionClass cls = FunctionClass::box(dl1, -kInf, kInf);
  cls.kappa = 1.0;
  const SaaResult pop = population_argmin(ObjectiveKind::LsRegression, t, cls);
  const double delta = pop.value + 0.1;
  std::size_t hits = 0;
  for (std::uint64_t rep = 0; rep < 200; ++rep) {
    auto rng = make_stream(13, "coverage", rep);
    const Sample s = t.draw(500, rng);
    if (level_set_member(ObjectiveKind::LsRegression, s, pop.f, delta)) ++hits;
  }
  const double freq = static_cast<double>(hits) / 200.0;
  c.expect(freq >= 0.9, "level-set coverage");
  return {c.ok, "slope " + fmt(rate.slope, 4) + " in [-1.4, -0.6]; population optimum " + fmt(pop.value, 6) +
                    ", coverage " + fmt(freq, 4) + " >= 0.9 " + c.summary()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"metric axioms", metric_axioms},
      {"origin-distance bounds", dl_bounds},
      {"dl sandwich", sandwich},
      {"epi-spline meshsize bound", epispline_meshsize},
      {"covering quantizer", quantizer},
      {"packing family", packing},
      {"approximation pipeline", pipeline},
      {"Moreau envelope", moreau},
      {"pa_fit recovery", pa_fit_recovery},
      {"SAA oracles", saa_oracles},
      {"level-set and argmin excess", argmin_instances},
      {"pointwise Holder bound", holder},
      {"statistical rate and coverage", statistical},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
