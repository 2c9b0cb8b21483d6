#include <doctest.h>

#include <sstream>

#include "voter/dynamics.hpp"
#include "voter/errors.hpp"

using namespace voter;

TEST_SUITE("dynamics") {
  TEST_CASE("response and thresholds") {
    const NoiseResponse f(0.1);
    CHECK(f(0.0) == doctest::Approx(0.1));
    CHECK(f(1.0) == doctest::Approx(0.9));
    CHECK(f(0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(NoiseResponse(0.6), DomainError);
    CHECK_THROWS_AS(NoiseResponse(-0.1), DomainError);
    CHECK(probability_threshold(1.0) == kThresholdOne);
    CHECK(probability_threshold(0.0) == 0);
    CHECK(bernoulli_from_word(~std::uint64_t{0}, kThresholdOne));
    CHECK_FALSE(bernoulli_from_word(0, 0));
  }

  TEST_CASE("bit state") {
    BitState s = BitState::from_string("0110");
    CHECK(s.size() == 4);
    CHECK(s.count() == 2);
    CHECK(s.flipped().to_string() == "1001");
    BitState big(130);
    big.set(129, true);
    CHECK(big[129]);
    CHECK(big.count() == 1);
  }

  TEST_CASE("noiseless controlled line is fully controlled") {
    const Graph g = make_line(20);
    Engine rng = make_stream(3);
    const auto traj = simulate(g, std::nullopt, NoiseResponse(0.0), ForcingPlan::single(0), 40, rng);
    CHECK(traj.at(0)[0]);
    for (std::size_t t = 20; t <= 40; ++t) CHECK(density(traj, t) == 1.0);
  }

  TEST_CASE("forced agent stays clamped and forcing overwrites the initial state") {
    const Graph g = make_line(5);
    Engine rng = make_stream(1);
    ForcingPlan plan = ForcingPlan::single(2, false);
    const auto traj = simulate(g, BitState(6, true), NoiseResponse(0.3), plan, 30, rng);
    for (std::size_t t = 0; t <= 30; ++t) CHECK_FALSE(traj.at(t)[2]);
    CHECK_THROWS_AS(ForcingPlan::single(9).validate(6), InvalidArgument);
  }

  TEST_CASE("maximal noise ignores the neighborhood") {
    const Graph g = make_line(1);
    const Stepper st(g, NoiseResponse(0.5), ForcingPlan{});
    BitState ones(2, true), zeros(2, false);
    for (std::uint64_t w : {0ULL, 1ULL << 62, ~0ULL}) CHECK(st.next_bit(ones, 1, w) == st.next_bit(zeros, 1, w));
  }

  TEST_CASE("same seed, same trajectory; forcing plans share draws") {
    const Graph g = make_line(10);
    Engine a = make_stream(5), b = make_stream(5);
    const auto ta = simulate(g, std::nullopt, NoiseResponse(0.05), ForcingPlan{}, 50, a);
    const auto tb = simulate(g, std::nullopt, NoiseResponse(0.05), ForcingPlan{}, 50, b);
    for (std::size_t t = 0; t <= 50; ++t) CHECK(ta.at(t) == tb.at(t));
    Engine c = make_stream(5);
    const auto tc = simulate(g, std::nullopt, NoiseResponse(0.05), ForcingPlan::single(10, true), 50, c);
    // Agent 10 has no followers, so everything upstream matches.
    for (std::size_t t = 0; t <= 50; ++t)
      for (NodeId i = 0; i < 10; ++i) CHECK(ta.at(t)[i] == tc.at(t)[i]);
  }

  TEST_CASE("density and output formats") {
    const Graph g = make_line(3, false);
    Engine rng = make_stream(0);
    const auto traj = simulate(g, BitState::from_string("1100"), NoiseResponse(0.0), ForcingPlan::single(0), 2, rng);
    CHECK(density(traj, 0) == doctest::Approx(0.5));
    CHECK(density(traj, 0, true) == doctest::Approx(1.0 / 3.0));
    std::ostringstream csv, st;
    write_trajectory_csv(csv, traj);
    write_spacetime(st, traj);
    CHECK(csv.str().rfind("t,s_0,s_1,s_2,s_3\n0,1,1,0,0\n", 0) == 0);
    CHECK(st.str() == "1100\n1110\n1111\n");
  }
}
