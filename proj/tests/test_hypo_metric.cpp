#include "doctest.h"
#include "hypolib/error.hpp"
#include "hypolib/hypo_metric.hpp"
#include "support.hpp"

using namespace hypolib;
using testing::grid1;
using testing::grid2;

namespace {
GridFn only_origin(const DomainPtr& d, double v) {
  std::vector<ExtReal> vals(d->size(), kNegInf);
  vals[d->origin()] = v;
  return GridFn(d, vals);
}
}  // namespace

TEST_CASE("dist_to_hypo examples") {
  auto d = grid1(-5, 5, 1);
  auto f = GridFn::constant(d, 0.0);
  CHECK(dist_to_hypo(std::vector<double>{0.0}, 2.0, f) == 2.0);
  CHECK(dist_to_hypo(std::vector<double>{0.0}, -3.0, f) == 0.0);
  auto g = only_origin(d, 0.0);
  CHECK(dist_to_hypo(std::vector<double>{3.0}, 0.0, g) == testing::oracle_dist(std::vector<double>{3.0}, 0.0, g));
  CHECK(dist_to_hypo(std::vector<double>{3.0}, 0.0, g) == 3.0);
}

TEST_CASE("dist_to_hypo is 1-Lipschitz in z") {
  std::mt19937_64 rng(11);
  auto d = grid2(-2, 2, 0.5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 50; ++t) {
    auto f = testing::random_fn(d, rng);
    std::vector<double> x1{u(rng), u(rng)}, x2{u(rng), u(rng)};
    const double a1 = u(rng), a2 = u(rng);
    const double dz = std::max(testing::linf(x1, x2), std::abs(a1 - a2));
    CHECK(std::abs(dist_to_hypo(x1, a1, f) - dist_to_hypo(x2, a2, f)) <= dz + 1e-12);
    CHECK(dist_to_hypo(x1, a1, f) == doctest::Approx(testing::oracle_dist(x1, a1, f)).epsilon(1e-14));
  }
}

TEST_CASE("dl_rho examples") {
  auto d = grid1(-5, 5, 1);
  auto f = GridFn::constant(d, 0.0);
  auto g = GridFn::constant(d, -1.0);
  CHECK(dl_rho(f, f, 3) == 0.0);
  CHECK(dl_rho(f, g, 2) == doctest::Approx(1.0));
  CHECK(dl_rho(f, only_origin(d, 0.0), 2) == doctest::Approx(2.0));
}

TEST_CASE("dl_rho matches the breakpoint oracle") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    auto d = (t % 2 == 0) ? grid1(-3, 3, 0.5) : grid2(-1, 1, 0.5);
    auto f = testing::random_fn(d, rng, -2.5, 2.5, 0.3);
    auto g = testing::random_fn(d, rng, -2.5, 2.5, 0.3);
    DlProfile p(f, g);
    for (double rho : {0.0, 0.3, 0.5, 1.0, 1.7, 2.5, 4.0}) {
      CHECK(p.at(rho) == doctest::Approx(testing::oracle_dl_rho(f, g, rho)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dl_rho crossing kink is found") {
  // f(0) = 0, f(1) = 5: the distance from (0, alpha) to hypo f changes
  // slope at alpha = 1 where the far node becomes the closer one.
  auto d = grid1(0, 1, 1);
  auto f = testing::values(d, {0, 5});
  auto g = testing::values(d, {0, -kInf});
  CHECK(dl_rho(f, g, 5) == doctest::Approx(testing::oracle_dl_rho(f, g, 5)));
  CHECK(dl_rho(f, g, 1.5) == doctest::Approx(testing::oracle_dl_rho(f, g, 1.5)));
}

TEST_CASE("dl_rho symmetry, monotonicity, triangle inequality") {
  std::mt19937_64 rng(17);
  auto d = grid2(-2, 2, 0.5);
  for (int t = 0; t < 20; ++t) {
    auto f = testing::random_fn(d, rng);
    auto g = testing::random_fn(d, rng);
    auto h = testing::random_fn(d, rng);
    double prev = 0.0;
    for (double rho = 0.0; rho <= 5.0; rho += 0.25) {
      const double fg = dl_rho(f, g, rho);
      CHECK(fg == dl_rho(g, f, rho));
      CHECK(fg >= prev);
      CHECK(dl_rho(f, h, rho) <= fg + dl_rho(g, h, rho) + 1e-12);
      prev = fg;
    }
  }
}

TEST_CASE("dl examples") {
  auto d = grid1(-5, 5, 1);
  auto f = GridFn::constant(d, 0.0);
  auto rep = dl(f, f, 1e-6);
  CHECK(rep.value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(rep.error_bound <= 1e-6);

  // f = 0, g = -1: dl_rho = 1 for every rho, so dl = 1.
  auto g = GridFn::constant(d, -1.0);
  CHECK(std::abs(dl(f, g, 1e-6).value - 1.0) <= 1e-6);

  // Finite only at the origin on the integer grid: dl_rho = min(floor(rho), 5),
  // whose integral against e^{-rho} is sum_{k=1}^5 e^{-k}.
  auto o = only_origin(d, 0.0);
  double expect = 0.0;
  for (int k = 1; k <= 5; ++k) expect += std::exp(-k);
  const double tol = 1e-6;
  CHECK(std::abs(dl(f, o, tol).value - expect) <= 2 * tol);

  // On refining grids the value approaches the continuum integral
  // of min(rho, 5) e^{-rho}, which is 1 - e^{-5}.
  auto fine = grid1(-5, 5, 0.05);
  const double cont = dl(GridFn::constant(fine, 0.0), only_origin(fine, 0.0), 1e-6).value;
  CHECK(std::abs(cont - (1.0 - std::exp(-5.0))) <= 0.05);
}

TEST_CASE("dl enclosure contains a fine Riemann bracket") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    auto d = grid1(-3, 3, 0.5);
    auto f = testing::random_fn(d, rng);
    auto g = testing::random_fn(d, rng);
    DlProfile p(f, g);
    const auto rep = p.integrate(1e-5);
    CHECK(rep.error_bound <= 0.5e-5 + 1e-15);
    // Monotone G: lower/upper Riemann sums on a fine grid plus a crude tail.
    double lo = 0.0, hi = 0.0;
    const double step = 1e-3, top = 30.0;
    for (double a = 0.0; a < top; a += step) {
      const double w = std::exp(-a) - std::exp(-(a + step));
      lo += p.at(a) * w;
      hi += p.at(a + step) * w;
    }
    hi += p.at(top + 100.0) * std::exp(-top);
    CHECK(rep.value - rep.error_bound <= hi + 1e-12);
    CHECK(rep.value + rep.error_bound >= lo - 1e-12);
  }
}

TEST_CASE("dl bounds from the origin distances") {
  std::mt19937_64 rng(29);
  auto d = grid2(-2, 2, 0.5);
  const double tol = 1e-4;
  for (int t = 0; t < 20; ++t) {
    auto f = testing::random_fn(d, rng, -3, 3);
    auto g = testing::random_fn(d, rng, -3, 3);
    const double df = dist_to_hypo(d->origin(), 0.0, f);
    const double dg = dist_to_hypo(d->origin(), 0.0, g);
    const double v = dl(f, g, tol).value;
    CHECK(std::abs(df - dg) <= v + tol);
    CHECK(v <= std::max(df, dg) + 1.0 + tol);
    auto fp = testing::random_fn(d, rng, 0, 3);
    auto gp = testing::random_fn(d, rng, 0, 3);
    CHECK(dl(fp, gp, tol).value <= 1.0 + tol);
  }
}

TEST_CASE("dhat_rho examples and oracle") {
  auto d = grid1(-5, 5, 1);
  auto f = GridFn::constant(d, 0.0);
  CHECK(dhat_rho(f, f, 5) == 0.0);
  CHECK(dhat_rho(f, GridFn::constant(d, -1.0), 5) == doctest::Approx(1.0));
  CHECK(dhat_rho(GridFn::constant(d, 10.0), f, 5) == doctest::Approx(5.0));

  std::mt19937_64 rng(31);
  for (int t = 0; t < 30; ++t) {
    auto dd = (t % 2 == 0) ? grid1(-2, 2, 0.5) : grid2(-1, 1, 0.5);
    auto a = testing::random_fn(dd, rng, -3, 3, 0.3);
    auto b = testing::random_fn(dd, rng, -3, 3, 0.3);
    for (double rho : {0.0, 0.5, 1.0, 2.5}) {
      CHECK(dhat_rho(a, b, rho) == doctest::Approx(testing::oracle_dhat(a, b, rho)).epsilon(1e-12));
    }
  }
}

TEST_CASE("check_sandwich") {
  auto d = grid1(-5, 5, 1);
  auto f = GridFn::constant(d, 0.0);
  auto same = check_sandwich(f, f, 2.0, 1e-6);
  CHECK(same.lower == 0.0);
  CHECK(same.dl_value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(same.upper == doctest::Approx(std::exp(-2.0) * (same.delta + 3.0)));
  CHECK(same.holds);

  auto g = GridFn::constant(d, -1.0);
  auto r = check_sandwich(f, g, 3.0, 1e-6);
  CHECK(r.lower == doctest::Approx(std::exp(-3.0)));
  CHECK(r.dl_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.holds);

  std::mt19937_64 rng(37);
  for (int t = 0; t < 30; ++t) {
    auto dd = (t % 2 == 0) ? grid1(-3, 3, 0.5) : grid2(-1.5, 1.5, 0.5);
    auto a = testing::random_fn(dd, rng, -3, 3);
    auto b = testing::random_fn(dd, rng, -3, 3);
    for (double rho : {1.0, 2.0, 4.0}) CHECK(check_sandwich(a, b, rho, 1e-4).holds);
  }
}

TEST_CASE("excess and hausdorff") {
  auto d = grid1(-2, 2, 0.5);
  std::mt19937_64 rng(41);
  std::vector<GridFn> F;
  for (int i = 0; i < 4; ++i) F.push_back(testing::random_fn(d, rng));
  const double tol = 1e-5;
  CHECK(excess(F, F, tol) <= tol);
  CHECK(excess({}, F, tol) == 0.0);
  CHECK(std::isinf(excess(F, {}, tol)));
  CHECK(excess({F[0]}, {F[1]}, tol) == doctest::Approx(dl(F[0], F[1], tol).value));
  CHECK(hausdorff(F, F, tol) <= tol);
  CHECK(hausdorff({F[0]}, {F[1]}, tol) == hausdorff({F[1]}, {F[0]}, tol));

  std::vector<GridFn> sub{F[0], F[2]};
  CHECK(excess(sub, F, tol) == 0.0);
  CHECK(hausdorff(sub, F, tol) == excess(F, sub, tol));
  // Brute force over the nested family.
  double brute = 0.0;
  for (const auto& f : F) {
    double best = kInf;
    for (const auto& g : sub) best = std::min(best, dl(f, g, tol).value);
    brute = std::max(brute, best);
  }
  CHECK(excess(F, sub, tol) == doctest::Approx(brute));
}

TEST_CASE("different domains are rejected") {
  auto a = GridFn::constant(grid1(-1, 1, 1), 0.0);
  auto b = GridFn::constant(grid1(-2, 2, 1), 0.0);
  CHECK_THROWS_AS(dl_rho(a, b, 1.0), DomainError);
  CHECK_THROWS_AS(dhat_rho(a, b, 1.0), DomainError);
}
