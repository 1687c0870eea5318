#include <doctest.h>

#include <cmath>
#include <sstream>

#include "queuenet/error.hpp"
#include "queuenet/rates.hpp"

using namespace queuenet;

TEST_CASE("eval_rate: lookup, right-continuity and half-open horizon") {
  RateProfile p({0.0, 10.0, 30.0}, {3.0, 6.0});
  CHECK(p.at(5.0) == 3.0);
  CHECK(p.at(10.0) == 6.0);
  CHECK(p.at(0.0) == 3.0);
  CHECK_THROWS_AS(p.at(30.0), OutOfRangeError);
  CHECK_THROWS_AS(p.at(-0.1), OutOfRangeError);
  CHECK(p.hold(30.0) == 6.0);
  CHECK(p.hold(100.0) == 6.0);
}

TEST_CASE("eval_rate is piecewise constant within a bin") {
  RateProfile p({0.0, 1.0, 2.5, 4.0}, {1.0, 7.0, 2.0});
  for (double t = 1.0; t < 2.5; t += 0.125) CHECK(p.at(t) == p.at(1.0));
}

TEST_CASE("rate profile construction is validated") {
  CHECK_THROWS_AS(RateProfile({0.0, 1.0}, {-1.0}), ValidationError);
  CHECK_THROWS_AS(RateProfile({0.0, 0.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(RateProfile({0.0, 1.0, 2.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(RateProfile({0.0, 1.0}, {std::nan("")}), ValidationError);
}

TEST_CASE("integral, average and peak hold the last value past the horizon") {
  RateProfile p({0.0, 10.0, 30.0}, {3.0, 6.0});
  CHECK(p.integral(0.0, 30.0) == doctest::Approx(150.0));
  CHECK(p.integral(5.0, 15.0) == doctest::Approx(45.0));
  CHECK(p.integral(25.0, 40.0) == doctest::Approx(90.0));
  CHECK(p.average(0.0, 20.0) == doctest::Approx(4.5));
  CHECK(p.peak(0.0, 5.0) == 3.0);
  CHECK(p.peak(0.0, 15.0) == 6.0);
}

TEST_CASE("split_streams") {
  const RateProfile nine = RateProfile::constant(9.0, 0.0, 10.0);
  SUBCASE("symmetric shares") {
    ModeStreams s = split_streams(nine, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    for (Mode m : kModes) CHECK(s[m].at(4.0) == doctest::Approx(3.0).epsilon(1e-15));
  }
  SUBCASE("degenerate share") {
    ModeStreams s = split_streams(nine, {1.0, 0.0, 0.0});
    CHECK(s.taxi.at(0.0) == 9.0);
    CHECK(s.bus.at(0.0) == 0.0);
    CHECK(s.subway.at(0.0) == 0.0);
  }
  SUBCASE("BCIA-like split") {
    const RateProfile ten = RateProfile::constant(10.0, 0.0, 10.0);
    ModeStreams s = split_streams(ten, {0.331, 0.163, 0.506});
    CHECK(s.taxi.at(1.0) == doctest::Approx(10.0 * 0.331).epsilon(1e-15));
    CHECK(s.bus.at(1.0) == doctest::Approx(10.0 * 0.163).epsilon(1e-15));
    CHECK(s.subway.at(1.0) == doctest::Approx(10.0 * 0.506).epsilon(1e-15));
  }
  SUBCASE("off-simplex shares are rejected") {
    CHECK_THROWS_AS(split_streams(nine, {0.5, 0.5, 0.5}), ValidationError);
    CHECK_THROWS_AS(split_streams(nine, {1.2, -0.2, 0.0}), ValidationError);
  }
}

TEST_CASE("split streams re-sum to the input with identical breakpoints") {
  RateProfile total({0.0, 3.0, 7.0, 12.0}, {11.3, 17.9, 4.2});
  ShareVector sh{0.27, 0.41, 0.32};
  ModeStreams s = split_streams(total, sh);
  for (Mode m : kModes) {
    CHECK(std::vector<double>(s[m].breakpoints().begin(), s[m].breakpoints().end()) ==
          std::vector<double>(total.breakpoints().begin(), total.breakpoints().end()));
  }
  for (double t : {0.0, 2.9, 3.0, 8.5, 11.99}) {
    const double sum = s.taxi.at(t) + s.bus.at(t) + s.subway.at(t);
    CHECK(std::abs(sum - total.at(t)) <= 1e-12 * total.at(t));
  }
}

TEST_CASE("timetable_to_profile") {
  SUBCASE("one flight spread over three bins") {
    std::vector<Flight> f{{0.0, 60.0}};
    RateProfile p = timetable_to_profile(f, 30.0, 10.0);
    REQUIRE(p.size() == 3);
    for (double v : p.values()) CHECK(v == doctest::Approx(2.0));
    CHECK(p.t_start() == 0.0);
    CHECK(p.t_end() == 30.0);
  }
  SUBCASE("two disjoint windows") {
    std::vector<Flight> f{{0.0, 30.0}, {10.0, 30.0}};
    RateProfile p = timetable_to_profile(f, 10.0, 10.0);
    REQUIRE(p.size() == 2);
    CHECK(p.at(5.0) == doctest::Approx(3.0));
    CHECK(p.at(15.0) == doctest::Approx(3.0));
  }
  SUBCASE("overlapping flights conserve mass") {
    std::vector<Flight> f{{0.0, 60.0}, {5.0, 60.0}};
    RateProfile p = timetable_to_profile(f, 10.0, 5.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) mass += p.values()[k] * (p.breakpoints()[k + 1] - p.breakpoints()[k]);
    CHECK(mass == doctest::Approx(120.0).epsilon(1e-12));
  }
  SUBCASE("no flights gives a zero profile") {
    RateProfile p = timetable_to_profile({}, 30.0, 5.0);
    CHECK(p.at(0.0) == 0.0);
  }
  SUBCASE("cover extends the binned range with zeros") {
    std::vector<Flight> f{{10.0, 20.0}};
    RateProfile p = timetable_to_profile(f, 10.0, 5.0, std::make_pair(0.0, 40.0));
    CHECK(p.t_start() == 0.0);
    CHECK(p.t_end() == 40.0);
    CHECK(p.at(2.0) == 0.0);
    CHECK(p.at(12.0) == doctest::Approx(2.0));
  }
}

TEST_CASE("timetable mass conservation over irregular flights") {
  std::vector<Flight> f{{-3.7, 120.0}, {1.2, 45.0}, {14.9, 300.0}, {15.0, 0.0}, {33.3, 81.5}};
  double expected = 0.0;
  for (const Flight& x : f) expected += x.passengers;
  for (double spread : {7.0, 30.0, 61.3}) {
    for (double bin : {1.0, 2.5, 10.0}) {
      RateProfile p = timetable_to_profile(f, spread, bin);
      CHECK(p.integral(p.t_start(), p.t_end()) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("CSV round trips") {
  std::istringstream tt("time_min,passengers\n0,60\n\n12.5, 30\n");
  auto flights = read_timetable_csv(tt);
  REQUIRE(flights.size() == 2);
  CHECK(flights[1].time == 12.5);
  CHECK(flights[1].passengers == 30.0);

  RateProfile p({0.0, 1.5, 4.0}, {0.1, 1.0 / 3.0});
  std::ostringstream out;
  write_profile_csv(out, p);
  std::istringstream in(out.str());
  CHECK(read_profile_csv(in) == p);
}

TEST_CASE("CSV errors carry line numbers") {
  std::istringstream bad_header("t,rate\n0,1\n");
  CHECK_THROWS_AS(read_profile_csv(bad_header), ParseError);
  std::istringstream gap("t_start,t_end,rate\n0,1,2\n2,3,1\n");
  try {
    read_profile_csv(gap);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream nan_field("time_min,passengers\n0,abc\n");
  CHECK_THROWS_AS(read_timetable_csv(nan_field), ParseError);
}
