#include <sstream>

#include "doctest.h"
#include "hypolib/epispline.hpp"
#include "hypolib/error.hpp"
#include "hypolib/io.hpp"
#include "hypolib/piecewise.hpp"
#include "support.hpp"

using namespace hypolib;
using testing::grid1;
using testing::grid2;

TEST_CASE("ExtReal ordering and arithmetic") {
  CHECK(kNegInf < ExtReal(-1e300));
  CHECK((kNegInf + 5.0).is_neg_inf());
  CHECK(max(kNegInf, ExtReal(2.0)) == ExtReal(2.0));
  CHECK(min(kNegInf, ExtReal(2.0)).is_neg_inf());
  CHECK((ExtReal(1.5) - 0.5) == ExtReal(1.0));
}

TEST_CASE("GridDomain construction") {
  auto d = grid1(-1, 1, 0.5);
  CHECK(d->size() == 5);
  CHECK(d->point(d->origin())[0] == 0.0);
  CHECK(d->point(4)[0] == doctest::Approx(1.0));
  CHECK(d->find(std::vector<double>{0.5}).value() == 3);
  CHECK_FALSE(d->find(std::vector<double>{0.25}).has_value());
  CHECK_THROWS_AS(GridDomain::uniform(1, 0.5, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(GridDomain::uniform(1, -1.0, 1.0, 0.3), DomainError);
  CHECK_THROWS_AS(GridDomain::uniform(1, -1.0, 1.0, 0.0), DomainError);
  // Masked: origin must stay a member.
  CHECK_THROWS_AS(GridDomain({AxisSpec{-1, 1, 1}}, {true, false, true}), DomainError);
  GridDomain masked({AxisSpec{-1, 1, 1}}, {false, true, true});
  CHECK(masked.size() == 2);
  CHECK(masked.origin() == 0);

  auto d2 = grid2(-1, 1, 1);
  CHECK(d2->size() == 9);
  CHECK(d2->linf_distance(0, 8) == 2.0);
  CHECK(d2->radius() == 1.0);
}

TEST_CASE("gridfn_eval") {
  auto d = grid1(-1, 1, 0.5);
  auto f = GridFn::constant(d, 0.0);
  CHECK(gridfn_eval(f, std::vector<double>{0.0}) == ExtReal(0.0));
  auto g = testing::values(d, {0, 0, 0, -kInf, 0});
  CHECK(gridfn_eval(g, std::vector<double>{0.5}).is_neg_inf());
  auto d01 = grid1(0, 1, 0.25);
  auto id = GridFn::from(d01, [](std::span<const double> x) { return ExtReal(x[0]); });
  CHECK(gridfn_eval(id, std::vector<double>{0.75}).value() == doctest::Approx(0.75));
  CHECK_THROWS_AS(gridfn_eval(id, std::vector<double>{0.3}), DomainError);
}

TEST_CASE("GridFn rejects empty hypographs and bad values") {
  auto d = grid1(-1, 1, 1);
  CHECK_THROWS_AS(testing::values(d, {-kInf, -kInf, -kInf}), EmptyHypographError);
  CHECK_THROWS_AS(testing::values(d, {0, kInf, 0}), DomainError);
  CHECK_THROWS_AS(testing::values(d, {0, 0}), DomainError);
}

namespace {
PaDiff make_pa(std::vector<AffinePiece> plus, std::vector<AffinePiece> minus, double radius) {
  return PaDiff{MaxAffine(std::move(plus)), MaxAffine(std::move(minus)), radius};
}
}  // namespace

TEST_CASE("pa_eval") {
  auto f = make_pa({{{1.0}, 0.0}}, {{{0.0}, 0.0}}, 2.0);
  CHECK(pa_eval(f, std::vector<double>{1.0}) == ExtReal(1.0));
  CHECK(pa_eval(f, std::vector<double>{3.0}).is_neg_inf());
  auto a = make_pa({{{1.0}, 0.0}, {{-1.0}, 0.0}}, {{{0.0}, 0.0}}, 5.0);
  CHECK(pa_eval(a, std::vector<double>{-2.0}) == ExtReal(2.0));
}

TEST_CASE("pa_to_gridfn") {
  auto a = make_pa({{{1.0}, 0.0}, {{-1.0}, 0.0}}, {{{0.0}, 0.0}}, 5.0);
  auto d = grid1(-1, 1, 1);
  auto g = pa_to_gridfn(a, d);
  CHECK(g[0] == ExtReal(1.0));
  CHECK(g[1] == ExtReal(0.0));
  CHECK(g[2] == ExtReal(1.0));
  a.radius = 0.4;
  auto r = pa_to_gridfn(a, d);
  CHECK(r[0].is_neg_inf());
  CHECK(r[1].is_finite());
  CHECK(r[2].is_neg_inf());
  a.radius = 0.0;
  auto z = pa_to_gridfn(a, grid1(-2, 2, 1));
  CHECK(z[2].is_finite());
  CHECK(z[1].is_neg_inf());
  CHECK_THROWS_AS(pa_to_gridfn(a, grid2(-2, 2, 1)), DomainError);
}

TEST_CASE("pa_eval Lipschitz bound on the ball") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> N(0.0, 1.0);
  auto d = grid2(-2, 2, 0.25);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<AffinePiece> p, m;
    for (int k = 0; k < 3; ++k) {
      p.push_back({{N(rng), N(rng)}, N(rng)});
      m.push_back({{N(rng), N(rng)}, N(rng)});
    }
    auto f = make_pa(p, m, 1.5);
    const double L = f.plus.lipschitz_inf() + f.minus.lipschitz_inf();
    auto g = pa_to_gridfn(f, d);
    for (std::size_t i = 0; i < d->size(); ++i) {
      if (!g[i].is_finite()) continue;
      for (std::size_t j = 0; j < d->size(); ++j) {
        if (!g[j].is_finite()) continue;
        CHECK(std::abs(g[i].value() - g[j].value()) <= L * d->linf_distance(i, j) + 1e-9);
      }
    }
  }
}

TEST_CASE("EpiSpline0 lsc boundary rule") {
  BoxPartition p(1, 1.0, 2);  // cells [-1,0], [0,1], exterior
  EpiSpline0 s(p, {3.0, 1.0, 5.0});
  CHECK(s(std::vector<double>{-0.5}) == 3.0);
  CHECK(s(std::vector<double>{0.5}) == 1.0);
  CHECK(s(std::vector<double>{0.0}) == 1.0);
  CHECK(s(std::vector<double>{-1.0}) == 3.0);
  CHECK(s(std::vector<double>{1.0}) == 1.0);
  CHECK(s(std::vector<double>{2.0}) == 5.0);
  EpiSpline0 t(p, {0.0, 1.0, -1.0});
  CHECK(t(std::vector<double>{1.0}) == -1.0);
  CHECK_THROWS_AS(EpiSpline0(p, {1.0, 2.0}), DomainError);

  BoxPartition q(2, 1.0, 2);
  EpiSpline0 u(q, {4, 3, 2, 1, 9});
  CHECK(u(std::vector<double>{0.0, 0.0}) == 1.0);
  CHECK(u(std::vector<double>{-0.5, 0.0}) == 3.0);
  CHECK(u(std::vector<double>{-0.5, -0.5}) == 4.0);
}

TEST_CASE("CSV round trip and inference") {
  auto d = grid2(-1, 1, 0.5);
  std::mt19937_64 rng(3);
  auto f = testing::random_fn(d, rng);
  std::stringstream ss;
  write_gridfn_csv(ss, f);
  auto g = read_gridfn_csv(ss, "mem");
  REQUIRE(same_domain(f, g));
  for (std::size_t m = 0; m < f.size(); ++m) CHECK(f[m] == g[m]);

  std::stringstream partial("x1,value\n0,1\n2,-inf\n-1,3\n");
  auto p = read_gridfn_csv(partial, "partial");
  CHECK(p.domain().size() == 3);
  CHECK(p.domain().node_count() == 4);
  CHECK(p.at(std::vector<double>{2.0}).is_neg_inf());
}

TEST_CASE("CSV diagnostics") {
  std::stringstream bad_header("y,value\n0,1\n");
  CHECK_THROWS_AS(read_gridfn_csv(bad_header, "h"), ValidationError);
  std::stringstream bad_value("x1,value\n0,abc\n");
  try {
    read_gridfn_csv(bad_value, "v.csv");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("v.csv:2") != std::string::npos);
  }
  std::stringstream no_origin("x1,value\n1,1\n2,1\n");
  CHECK_THROWS_AS(read_gridfn_csv(no_origin, "o"), ValidationError);
  std::stringstream dup("x1,value\n0,1\n0,2\n");
  CHECK_THROWS_AS(read_gridfn_csv(dup, "d"), ValidationError);
  std::stringstream empty("x1,value\n0,-inf\n");
  CHECK_THROWS_AS(read_gridfn_csv(empty, "e"), ValidationError);
  CHECK_THROWS_AS(read_gridfn_csv_file("/nonexistent/file.csv"), ValidationError);
}

TEST_CASE("JSON round trip") {
  auto f = make_pa({{{1.0, 2.0}, 0.5}}, {{{0.0, -1.0}, 0.25}, {{3.0, 0.0}, -1.0}}, 1.5);
  auto j = to_json(f);
  CHECK(j["schema"] == "hypolib-v1");
  auto g = padiff_from_json(j);
  CHECK(g.radius == 1.5);
  CHECK(g.minus.size() == 2);
  CHECK(g.minus.pieces()[1].slope[0] == 3.0);
  j["plus"][0].erase("offset");
  CHECK_THROWS_AS(padiff_from_json(j), ValidationError);

  EpiSpline0 s(BoxPartition(1, 2.0, 4), {1, 2, 3, 4, 5});
  auto t = epispline_from_json(to_json(s));
  CHECK(t.partition() == s.partition());
  CHECK(t.cell_values()[4] == 5.0);
  auto bad = to_json(s);
  bad["schema"] = "v0";
  CHECK_THROWS_AS(epispline_from_json(bad), ValidationError);
}

TEST_CASE("format_real round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678, 0.0}) {
    CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
  }
  CHECK(format_real(-kInf) == "-inf");
}
