#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "queuenet/ctmc.hpp"
#include "queuenet/error.hpp"

using namespace queuenet;

namespace {

Generator flip(double a, double b) {
  Generator g(2, "flip");
  g.add_rule("up", +1, [](std::size_t s) { return s == 0 ? 1.0 : 0.0; }, [a](double) { return a; });
  g.add_rule("down", -1, [](std::size_t s) { return s == 1 ? 1.0 : 0.0; }, [b](double) { return b; });
  return g;
}

Generator birth_death(std::size_t K, int c, double lambda, double mu) {
  return build_birth_death_generator(K, c, mu, [lambda](double) { return lambda; }, "bd");
}

oracle::Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const oracle::Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

TEST_CASE("zero generator leaves the state unchanged") {
  Generator g = flip(0.0, 0.0);
  TransientState s{{0.3, 0.7}, 0.0};
  TransientState out = rk4_step(g, s, 0.1);
  CHECK(out.probs == s.probs);
  CHECK(out.t == doctest::Approx(0.1));
}

TEST_CASE("two-state flip matches the closed form") {
  Generator g = flip(1.0, 1.0);
  TransientState out = advance(g, TransientState::point_mass(2, 0, 0.0), 5.0, kDefaultDt);
  CHECK(out.t == 5.0);
  CHECK(std::abs(out.probs[0] - (0.5 + 0.5 * std::exp(-10.0))) < 1e-6);
  CHECK(std::abs(out.probs[1] - (0.5 - 0.5 * std::exp(-10.0))) < 1e-6);
}

TEST_CASE("M/M/1 truncated at 50 relaxes to the linear-system stationary mean") {
  Generator g = birth_death(50, 1, 0.5, 1.0);
  const oracle::Matrix Q = oracle::birth_death(50, 1, 0.5, 1.0);
  const oracle::Vector pi = oracle::stationary(Q);
  double pi_mean = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) pi_mean += static_cast<double>(i) * pi(i);
  CHECK(pi_mean == doctest::Approx(1.0).epsilon(1e-9));

  const TransientState s0 = TransientState::point_mass(51, 0, 0.0);
  TransientState at30 = advance(g, s0, 30.0, kDefaultDt);
  const oracle::Vector exact30 = oracle::uniformization(Q, to_eigen(s0.probs), 30.0);
  double exact_mean = 0.0;
  for (Eigen::Index i = 0; i < exact30.size(); ++i) exact_mean += static_cast<double>(i) * exact30(i);
  // Relaxation time is about 11.7, so the mean is still 0.007 short at t = 30.
  CHECK(std::abs(expected_index(at30) - exact_mean) < 1e-6);
  CHECK(std::abs(exact_mean - pi_mean) > 1e-3);

  TransientState at80 = advance(g, at30, 80.0, kDefaultDt);
  CHECK(std::abs(expected_index(at80) - pi_mean) < 1e-4);
}

TEST_CASE("generator entries match an entry-by-entry construction") {
  Generator g = birth_death(12, 3, 2.5, 0.7);
  const oracle::Matrix Q = oracle::birth_death(12, 3, 2.5, 0.7);
  const auto dense = g.dense(0.0);
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
      CHECK(dense[static_cast<std::size_t>(i * Q.cols() + j)] == doctest::Approx(Q(i, j)).epsilon(1e-15));
      CHECK(g.rate(static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0.0) ==
            doctest::Approx(Q(i, j)).epsilon(1e-15));
    }
  }
}

TEST_CASE("rows sum to zero at random times") {
  Generator g(40, "mixed");
  g.add_rule("a", +1, [](std::size_t s) { return s < 39 ? 1.0 + 0.1 * static_cast<double>(s % 3) : 0.0; },
             [](double t) { return 2.0 + std::sin(t); });
  g.add_rule("b", -2, [](std::size_t s) { return s >= 2 ? 0.5 * static_cast<double>(s) : 0.0; },
             [](double t) { return 1.0 + 0.5 * std::cos(t); });
  g.add_rule("c", +3, [](std::size_t s) { return s < 37 && s % 2 == 0 ? 0.25 : 0.0; }, [](double) { return 3.0; });
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 30.0);
  const std::vector<double> ones(40, 1.0);
  std::vector<double> out(40);
  for (int k = 0; k < 20; ++k) {
    g.apply_right(ones, U(rng), out);
    for (double x : out) CHECK(std::abs(x) <= 1e-12);
  }
}

TEST_CASE("rules are validated") {
  Generator g(3, "bad");
  CHECK_THROWS_AS(g.add_rule("neg", +1, [](std::size_t) { return -1.0; }, [](double) { return 1.0; }),
                  ValidationError);
  CHECK_THROWS_AS(g.add_rule("escape", +1, [](std::size_t) { return 1.0; }, [](double) { return 1.0; }),
                  ValidationError);
}

TEST_CASE("instability is reported with advice") {
  Generator g = birth_death(4, 1, 500.0, 1.0);
  try {
    rk4_step(g, TransientState::point_mass(5, 0, 0.0), 1.0);
    FAIL("expected InstabilityError");
  } catch (const InstabilityError& e) {
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
}

TEST_CASE("solve_transient grid and horizons") {
  Generator g = flip(1.0, 2.0);
  const TransientState s0 = TransientState::point_mass(2, 0, 0.0);
  SUBCASE("empty horizon") {
    auto traj = solve_transient(g, s0, 0.0, 0.01);
    REQUIRE(traj.size() == 1);
    CHECK(traj[0].probs == s0.probs);
  }
  SUBCASE("final partial step lands on t_end") {
    auto traj = solve_transient(g, s0, 0.25, 0.1);
    REQUIRE(traj.size() == 4);
    CHECK(traj[1].t == doctest::Approx(0.1));
    CHECK(traj[2].t == doctest::Approx(0.2));
    CHECK(traj.back().t == 0.25);
  }
  SUBCASE("split runs reproduce a single run") {
    TransientState whole = advance(g, s0, 3.0, 0.01);
    TransientState half = advance(g, advance(g, s0, 1.37, 0.01), 3.0, 0.01);
    CHECK(whole.probs[0] == doctest::Approx(half.probs[0]).epsilon(1e-13));
  }
}

TEST_CASE("constant-rate M/M/c/K queue length flattens") {
  Generator g = birth_death(100, 8, 3.0, 0.5);
  auto traj = solve_transient(g, TransientState::point_mass(101, 0, 0.0), 30.0, kDefaultDt);
  const double L30 = expected_index(traj.back());
  const double L25 = expected_index(traj[5000]);
  CHECK(traj[5000].t == doctest::Approx(25.0));
  CHECK(std::abs(L30 - L25) < 0.05 * L30);
}

TEST_CASE("heavily loaded M/M/c/K blocks more than 60 percent") {
  Generator g = birth_death(100, 8, 12.0, 0.5);
  TransientState out = advance(g, TransientState::point_mass(101, 0, 0.0), 30.0, kDefaultDt);
  CHECK(out.probs.back() > 0.6);
}

TEST_CASE("probability is conserved along trajectories") {
  Generator g(60, "tv");
  g.add_rule("in", +1, [](std::size_t s) { return s < 59 ? 1.0 : 0.0; },
             [](double t) { return t < 10.0 ? 6.0 : 1.0; });
  g.add_rule("out", -1, [](std::size_t s) { return static_cast<double>(std::min<std::size_t>(s, 3)); },
             [](double) { return 1.2; });
  auto traj = solve_transient(g, TransientState::point_mass(60, 0, 0.0), 20.0, kDefaultDt);
  for (const auto& s : traj) {
    CHECK(std::abs(s.total() - 1.0) <= 1e-8);
    CHECK(simd::min(s.probs) >= -1e-10);
  }
}

TEST_CASE("RK4 converges at fourth order") {
  Generator g = birth_death(20, 2, 1.5, 0.9);
  const TransientState s0 = TransientState::point_mass(21, 3, 0.0);
  const double T = 4.0;
  const double h = 0.2;
  const TransientState ref = advance(g, s0, T, h / 16.0);
  auto err = [&](double dt) {
    TransientState s = advance(g, s0, T, dt);
    double e = 0.0;
    for (std::size_t i = 0; i < s.probs.size(); ++i) e = std::max(e, std::abs(s.probs[i] - ref.probs[i]));
    return e;
  };
  const double e1 = err(h);
  const double e2 = err(h / 2.0);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e1 / e2 >= 12.0);
}

TEST_CASE("constant-rate trajectories match uniformization") {
  Generator g = birth_death(30, 2, 1.7, 0.6);
  const oracle::Matrix Q = oracle::birth_death(30, 2, 1.7, 0.6);
  const TransientState s0 = TransientState::point_mass(31, 4, 0.0);
  const oracle::Vector p0 = to_eigen(s0.probs);
  auto traj = solve_transient(g, s0, 10.0, kDefaultDt);
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); k += 200) {
    const oracle::Vector ref = oracle::uniformization(Q, p0, traj[k].t);
    worst = std::max(worst, (to_eigen(traj[k].probs) - ref).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("choose_truncation") {
  SUBCASE("zero arrivals") {
    const auto K = choose_truncation(RateProfile::constant(0.0, 0.0, 30.0), 4.0, 30.0, 5, 1e-9, 0.0);
    CHECK(K >= 5);
    CHECK(oracle::poisson_tail_above(0.0, K - 5) == 0.0);
  }
  SUBCASE("worst case ignores service") {
    CHECK(choose_truncation(RateProfile::constant(12.0, 0.0, 30.0), 4.0, 30.0, 0, 1e-9, 0.0) >= 360);
  }
  SUBCASE("Poisson tail bound is tight") {
    const auto K = choose_truncation(RateProfile::constant(3.0, 0.0, 30.0), 1.0, 30.0, 0, 1e-9, 0.0);
    CHECK(oracle::poisson_tail_above(90.0, K) < 1e-9);
    CHECK(oracle::poisson_tail_above(90.0, K - 1) >= 1e-9);
  }
  SUBCASE("deterministic") {
    RateProfile p({0.0, 5.0, 30.0}, {2.0, 7.5});
    CHECK(choose_truncation(p, 1.0, 20.0, 3, 1e-6, 1.0) == choose_truncation(p, 1.0, 20.0, 3, 1e-6, 1.0));
  }
  SUBCASE("tail_eps range") {
    CHECK_THROWS_AS(choose_truncation(RateProfile::constant(1.0, 0.0, 1.0), 1.0, 1.0, 0, 0.01, 0.0),
                    ValidationError);
  }
}

TEST_CASE("poisson quantile agrees with the distribution across means") {
  for (double mean : {0.3, 4.0, 29.9, 30.0, 250.0, 2000.0}) {
    for (double eps : {1e-3, 1e-9, 1e-12}) {
      CAPTURE(mean);
      CAPTURE(eps);
      const auto k = poisson_upper_quantile(mean, eps);
      CHECK(oracle::poisson_tail_above(mean, k) < eps * (1 + 1e-6));
      if (k > 0) CHECK(oracle::poisson_tail_above(mean, k - 1) >= eps * (1 - 1e-6));
    }
  }
}

TEST_CASE("expected_count") {
  CHECK(expected_count(TransientState::point_mass(10, 7, 0.0), [](std::size_t i) { return double(i); }) == 7.0);
  TransientState u{{1.0 / 3, 1.0 / 3, 1.0 / 3}, 0.0};
  CHECK(expected_count(u, [](std::size_t i) { return double(i); }) == doctest::Approx(1.0));

  Generator g = birth_death(40, 4, 5.0, 0.8);
  TransientState s = advance(g, TransientState::point_mass(41, 0, 0.0), 12.0, kDefaultDt);
  double brute = 0.0;
  for (std::size_t i = 0; i < s.probs.size(); ++i) brute += s.probs[i] * static_cast<double>(i);
  std::vector<double> counts(41);
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] = static_cast<double>(i);
  CHECK(expected_count(s, counts) == doctest::Approx(brute).epsilon(1e-13));
  CHECK(expected_index(s) == doctest::Approx(brute).epsilon(1e-13));
}

TEST_CASE("trajectory dump is sparse") {
  std::ostringstream out;
  write_trajectory_header(out);
  write_trajectory_rows(out, TransientState{{0.5, 1e-14, 0.5}, 2.0});
  CHECK(out.str() == "t,index,prob\n2,0,0.5\n2,2,0.5\n");
}

TEST_CASE("conservation statistics track worst steps") {
  reset_conservation_stats();
  advance(flip(1.0, 1.0), TransientState::point_mass(2, 0, 0.0), 1.0, 0.1);
  const auto st = conservation_stats();
  CHECK(st.steps == 10);
  CHECK(st.max_sum_error <= 1e-12);
  CHECK(st.min_prob >= 0.0);
}
