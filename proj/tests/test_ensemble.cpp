#include <doctest.h>

#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/meanfield.hpp"

using namespace voter;

namespace {

EnsembleSpec line_spec(std::size_t n, double eps, std::size_t runs, std::size_t horizon) {
  EnsembleSpec s;
  s.graph = make_line(n);
  s.noise = NoiseResponse(eps);
  s.forcing = ForcingPlan::single(0);
  s.runs = runs;
  s.horizon = horizon;
  s.base_seed = 42;
  return s;
}

}  // namespace

TEST_SUITE("ensemble") {
  TEST_CASE("normal quantile and precision") {
    CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400536).epsilon(1e-13));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0));
    CHECK(normal_quantile(0.025) == doctest::Approx(-1.9599639845400536).epsilon(1e-13));
    CHECK(precision(100000, 0.05) == doctest::Approx(0.0030989751615228068).epsilon(1e-12));
  }

  TEST_CASE("results do not depend on the worker count") {
    EnsembleSpec s = line_spec(12, 0.05, 503, 30);
    s.retain_times = {0, 17, 30};
    const EnsembleResult one = run_ensemble(s);
    s.workers = 4;
    const EnsembleResult four = run_ensemble(s);
    CHECK(one.summary.one_counts == four.summary.one_counts);
    for (std::size_t r = 0; r < s.runs; ++r)
      for (std::size_t slot = 0; slot < 3; ++slot)
        CHECK(std::equal(one.samples.row(r, slot).begin(), one.samples.row(r, slot).end(),
                         four.samples.row(r, slot).begin()));
  }

  TEST_CASE("run r reproduces a single simulation with seed base + r") {
    EnsembleSpec s = line_spec(6, 0.1, 4, 9);
    s.retain_times = {9};
    const EnsembleResult res = run_ensemble(s);
    for (std::size_t r = 0; r < 4; ++r) {
      Engine rng = make_stream(s.base_seed + r);
      const auto traj = simulate(s.graph, std::nullopt, s.noise, s.forcing, 9, rng);
      for (NodeId i = 0; i < 7; ++i) CHECK(res.samples.bit(r, 0, i) == traj.at(9)[i]);
    }
  }

  TEST_CASE("marginals track the exact site recursion") {
    const EnsembleSpec s = line_spec(10, 0.05, 20000, 15);
    const EnsembleSummary sum = run_ensemble(s).summary;
    const MeanFieldSystem mf(10, 0.05);
    const Eigen::VectorXd p = iterate(mf, Eigen::VectorXd::Constant(10, 0.5), 15);
    for (NodeId i = 1; i <= 10; ++i) CHECK(std::abs(sum.p_one(i, 15) - p[i - 1]) < 4.0 * precision(20000, 0.05));
    CHECK(sum.p_one(0, 15) == 1.0);
    CHECK(sum.mean_density(15, true) < sum.mean_density(15));
  }

  TEST_CASE("validation and budget") {
    EnsembleSpec s = line_spec(5, 0.1, 10, 5);
    s.retain_times = {6};
    CHECK_THROWS_AS(run_ensemble(s), InvalidArgument);
    s.retain_times = {};
    s.runs = 0;
    CHECK_THROWS_AS(run_ensemble(s), InvalidArgument);
    s = line_spec(500, 0.1, 1'000'000, 2000);
    s.retain_times = {1, 2, 3};
    s.memory_budget_bytes = 1 << 20;
    CHECK_THROWS_AS(run_ensemble(s), BudgetExceeded);
  }

  TEST_CASE("burn-in choice") {
    const BurnIn b = auto_burn_in(make_line(50), NoiseResponse(0.01), ForcingPlan::single(0));
    CHECK(b.from_mean_field);
    CHECK(b.steps == steady_state_time(MeanFieldSystem(50, 0.01), Eigen::VectorXd::Constant(50, 0.5)));
    const BurnIn other = auto_burn_in(make_scale_free(40, 1, 1), NoiseResponse(0.01), ForcingPlan{});
    CHECK_FALSE(other.from_mean_field);
    CHECK(other.steps == 400);
  }
}
