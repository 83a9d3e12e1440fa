#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "sssv/schedule.hpp"

using namespace sssv;
using Catch::Approx;

namespace {

AnnealSchedule linear_2ghz() { return AnnealSchedule({{0.0, 2.0, 0.0}, {1.0, 0.0, 2.0}}, "linear"); }

}  // namespace

TEST_CASE("evaluate interpolates piecewise-linearly", "[schedule]") {
  const auto lin = linear_2ghz();
  CHECK(lin.evaluate(0.5).a_ghz == 1.0);
  CHECK(lin.evaluate(0.5).b_ghz == 1.0);

  const AnnealSchedule three({{0.0, 30.0, 0.0}, {0.5, 10.0, 15.0}, {1.0, 0.0, 30.0}}, "three");
  CHECK(three.evaluate(0.25).a_ghz == Approx(20.0));
  CHECK(three.evaluate(0.25).b_ghz == Approx(7.5));

  SECTION("exact at nodes") {
    for (const auto& n : three.nodes()) {
      CHECK(three.evaluate(n.s).a_ghz == n.a_ghz);
      CHECK(three.evaluate(n.s).b_ghz == n.b_ghz);
    }
  }

  SECTION("s outside [0,1] is rejected") {
    CHECK_THROWS_AS(three.evaluate(-0.01), InvalidInput);
    CHECK_THROWS_AS(three.evaluate(1.0001), InvalidInput);
  }
}

TEST_CASE("evaluate is Lipschitz with the segment slopes", "[schedule][property]") {
  const auto sched = default_schedule();
  double max_slope = 0.0;
  for (std::size_t k = 1; k < sched.nodes().size(); ++k) {
    const auto& a = sched.nodes()[k - 1];
    const auto& b = sched.nodes()[k];
    max_slope = std::max({max_slope, std::abs(b.a_ghz - a.a_ghz) / (b.s - a.s), std::abs(b.b_ghz - a.b_ghz) / (b.s - a.s)});
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double s = u(rng), t = u(rng);
    const auto p = sched.evaluate(s), q = sched.evaluate(t);
    CHECK(std::abs(p.a_ghz - q.a_ghz) <= max_slope * std::abs(s - t) + 1e-12);
    CHECK(std::abs(p.b_ghz - q.b_ghz) <= max_slope * std::abs(s - t) + 1e-12);
  }
}

TEST_CASE("schedule invariants are enforced", "[schedule]") {
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}}, "one"), InvalidInput);
  CHECK_THROWS_AS(AnnealSchedule({{0.1, 1.0, 0.0}, {1.0, 0.0, 1.0}}, "late start"), InvalidInput);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}, {0.9, 0.0, 1.0}}, "early end"), InvalidInput);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}, {0.5, 1.0, 0.0}, {0.5, 1.0, 0.0}, {1.0, 0.0, 1.0}}, "dup"),
                  InvalidInput);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, -1.0, 0.0}, {1.0, 0.0, 1.0}}, "negative"), InvalidInput);
  CHECK_THROWS_AS(AnnealSchedule({{0.0, 1.0, 0.0}, {1.0, 0.0, INFINITY}}, "inf"), InvalidInput);
}

TEST_CASE("default schedule", "[schedule]") {
  const auto d = default_schedule();
  CHECK(d.nodes().size() == 21);
  CHECK(d.evaluate(0.0).a_ghz == kDefaultScheduleAmplitudeGhz);
  CHECK(d.evaluate(0.0).b_ghz == 0.0);
  CHECK(d.evaluate(1.0).a_ghz == 0.0);
  CHECK(d.evaluate(1.0).b_ghz == kDefaultScheduleAmplitudeGhz);
  CHECK(d.evaluate(0.5).a_ghz == Approx(0.25 * kDefaultScheduleAmplitudeGhz));

  SECTION("small alpha crosses T only after the transverse field has faded") {
    const auto c = crossings(d, 0.1099, 0.22);
    REQUIRE(c.s_b);
    REQUIRE(c.s_a);
    CHECK(*c.s_b > 0.2);
    CHECK(*c.s_b > *c.s_a);
    CHECK(d.evaluate(*c.s_b).a_ghz < 0.22);
    // the larger called-out alpha escapes the thermal regime while A is still on
    const auto big = crossings(d, 0.2834, 0.22);
    REQUIRE(big.s_b);
    CHECK(*big.s_b < *c.s_b);
    CHECK(d.evaluate(*big.s_b).a_ghz > 0.22);
  }
}

TEST_CASE("crossings on a linear schedule", "[schedule][crossings]") {
  const auto lin = linear_2ghz();
  const auto c = crossings(lin, 0.5, 0.22);
  REQUIRE(c.s_a);
  REQUIRE(c.s_b);
  CHECK(*c.s_a == Approx(0.89).margin(1e-12));
  CHECK(*c.s_b == Approx(0.22).margin(1e-12));

  CHECK_FALSE(crossings(lin, 0.0, 0.22).s_b);
  CHECK_FALSE(crossings(lin, 1.0, 5.0).s_b);
  CHECK(crossings(lin, 1.0, 5.0).s_a == 0.0);  // A starts below T

  CHECK_THROWS_AS(crossings(lin, 1.5, 0.22), InvalidInput);
  CHECK_THROWS_AS(crossings(lin, 0.5, 0.0), InvalidInput);
}

TEST_CASE("crossings agree with evaluate", "[schedule][crossings][property]") {
  const auto d = default_schedule();
  const double T = 0.22;
  for (double alpha = 0.08; alpha <= 1.0; alpha += 0.01) {
    const auto c = crossings(d, alpha, T);
    REQUIRE(c.s_b);
    CHECK(std::abs(alpha * d.evaluate(*c.s_b).b_ghz - T) <= 1e-9 * std::max(1.0, T));
    // nothing earlier on the grid already exceeds T
    for (double s = 0.0; s < *c.s_b - 1e-6; s += 0.001) CHECK(alpha * d.evaluate(s).b_ghz < T);
  }
  const auto ca = crossings(d, 1.0, T);
  REQUIRE(ca.s_a);
  CHECK(std::abs(d.evaluate(*ca.s_a).a_ghz - T) <= 1e-9);
}

TEST_CASE("s_B is monotone in alpha for non-decreasing B", "[schedule][crossings][property]") {
  const auto d = default_schedule();
  double previous = 2.0;
  for (double alpha = 0.1; alpha <= 1.0; alpha += 0.005) {
    const auto c = crossings(d, alpha, 0.22);
    REQUIRE(c.s_b);
    CHECK(*c.s_b <= previous);
    previous = *c.s_b;
  }
}

TEST_CASE("schedule CSV parsing", "[schedule][io]") {
  std::istringstream good("s,A_GHz,B_GHz\n0,2,0\n# comment\n0.5, 1, 1\n1,0,2\n");
  const auto s = parse_schedule_csv(good, "file");
  CHECK(s.nodes().size() == 3);
  CHECK(s.evaluate(0.25).a_ghz == Approx(1.5));

  std::ostringstream out;
  write_schedule_csv(default_schedule(), out);
  std::istringstream back(out.str());
  const auto again = parse_schedule_csv(back, "again");
  REQUIRE(again.nodes().size() == default_schedule().nodes().size());
  for (std::size_t k = 0; k < again.nodes().size(); ++k) {
    CHECK(again.nodes()[k].a_ghz == default_schedule().nodes()[k].a_ghz);
    CHECK(again.nodes()[k].b_ghz == default_schedule().nodes()[k].b_ghz);
  }

  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_schedule_csv(in, "bad");
  };
  CHECK_THROWS_AS(parse("0,2,0\n1,0,2\n"), InvalidInput);
  CHECK_THROWS_AS(parse("s,A_GHz,B_GHz\n0,2\n1,0,2\n"), InvalidInput);
  CHECK_THROWS_AS(parse("s,A_GHz,B_GHz\n0,2,x\n1,0,2\n"), InvalidInput);
  CHECK_THROWS_AS(parse("s,A_GHz,B_GHz\n0,2,0,1\n1,0,2\n"), InvalidInput);
  CHECK_THROWS_AS(parse("s,A_GHz,B_GHz\n0.5,2,0\n1,0,2\n"), InvalidInput);
  CHECK_THROWS_AS(load_schedule_csv("/nonexistent/schedule.csv"), IoError);
}
