#include <doctest.h>

#include <cmath>

#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/infotheory.hpp"
#include "voter/meanfield.hpp"
#include "voter/oracle.hpp"

using namespace voter;

namespace {

// 0 -> {0}, 1 -> {0, 2}, 2 -> {1, 2, 3}, 3 -> {0, 3}
Graph small_graph() { return Graph(4, {{0}, {0, 2}, {1, 2, 3}, {0, 3}}); }

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("single node chain") {
    const ExactChain c(Graph(1, {{0}}), NoiseResponse(0.2), ForcingPlan{});
    const Eigen::MatrixXd t = c.dense_transition();
    CHECK(t(0, 1) == doctest::Approx(0.2));
    CHECK(t(1, 1) == doctest::Approx(0.8));
    CHECK_THROWS_AS(ExactChain(make_line(14), NoiseResponse(0.1), ForcingPlan{}), InvalidArgument);
  }

  TEST_CASE("rows are stochastic and the operator matches the matrix") {
    const ExactChain c(small_graph(), NoiseResponse(0.13), ForcingPlan::single(3, false));
    const Eigen::MatrixXd t = c.dense_transition();
    CHECK((t.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(16, 1.0, 16.0);
    d /= d.sum();
    CHECK((c.step(d) - t.transpose() * d).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(std::abs(c.propagate(d, 9).sum() - 1.0) < 1e-12);
  }

  TEST_CASE("noiseless controlled line is absorbed at all ones") {
    const ExactChain c(make_line(3), NoiseResponse(0.0), ForcingPlan::single(0));
    const Eigen::VectorXd d = c.propagate(uniform_initial(c), 40);
    CHECK(d[15] == doctest::Approx(1.0));
  }

  TEST_CASE("frozen values on the forced three-node line") {
    const ExactChain c(make_line(2), NoiseResponse(0.1), ForcingPlan::single(0));
    const Eigen::VectorXd pi = exact_stationary(c);
    const auto m = exact_marginals(c, pi, 0);
    CHECK(m[0] == doctest::Approx(1.0));
    CHECK(m[1] == doctest::Approx(0.8333333333333333).epsilon(1e-11));
    CHECK(m[2] == doctest::Approx(0.7222222222222221).epsilon(1e-11));
    CHECK(exact_delayed_mi(c, pi, 1, 2, 0, 1) == doctest::Approx(0.10176108090689409).epsilon(1e-10));
    CHECK(exact_delayed_mi(c, pi, 1, 1, 0, 1) == doctest::Approx(0.09252609365728659).epsilon(1e-10));
    CHECK(exact_delayed_mi(c, pi, 2, 1, 0, 1) == doctest::Approx(0.0028046675405709286).epsilon(1e-9));
    CHECK(exact_delayed_multi_info(c, pi, 1, 0, 1) == doctest::Approx(0.10176108090689409).epsilon(1e-10));
    CHECK(exact_delayed_multi_info(c, pi, 2, 0, 1) == doctest::Approx(0.0028046675405709286).epsilon(1e-9));
    const auto m2 = exact_marginals(c, uniform_initial(c), 2);
    CHECK(m2[1] == doctest::Approx(0.78));
    CHECK(m2[2] == doctest::Approx(0.58));
  }

  TEST_CASE("zero delay and maximal noise") {
    const ExactChain c(small_graph(), NoiseResponse(0.05), ForcingPlan{});
    const Eigen::VectorXd d0 = uniform_initial(c);
    for (NodeId i = 0; i < 4; ++i) {
      const double p = exact_marginals(c, d0, 3)[i];
      const double h = -(p * std::log2(p) + (1 - p) * std::log2(1 - p));
      CHECK(exact_delayed_mi(c, d0, i, i, 3, 0) == doctest::Approx(h).epsilon(1e-12));
    }
    const ExactChain noisy(small_graph(), NoiseResponse(0.5), ForcingPlan{});
    for (NodeId i = 0; i < 4; ++i) {
      CHECK(exact_delayed_multi_info(noisy, uniform_initial(noisy), i, 2, 1) < 1e-15);
      for (NodeId j = 0; j < 4; ++j) CHECK(exact_delayed_mi(noisy, uniform_initial(noisy), i, j, 1, 1) < 1e-15);
    }
  }

  TEST_CASE("exact marginals on the controlled line equal the site recursion") {
    const double eps = 0.03;
    const ExactChain c(make_line(9), NoiseResponse(eps), ForcingPlan::single(0));
    const MeanFieldSystem mf(9, eps);
    for (std::size_t t : {1, 4, 15}) {
      const auto m = exact_marginals(c, uniform_initial(c), t);
      const Eigen::VectorXd p = iterate(mf, Eigen::VectorXd::Constant(9, 0.5), t);
      for (NodeId i = 1; i <= 9; ++i) CHECK(std::abs(m[i] - p[i - 1]) < 1e-13);
    }
    const auto ms = exact_marginals(c, exact_stationary(c), 0);
    const auto pi = stationary(mf).pi;
    for (NodeId i = 1; i <= 9; ++i) CHECK(std::abs(ms[i] - pi[i - 1]) < 1e-10);
  }

  TEST_CASE("moment propagator agrees with enumeration") {
    const NoiseResponse noise(0.08);
    const ForcingPlan forcing = ForcingPlan::single(1, true);
    const ExactChain c(small_graph(), noise, forcing);
    const MomentPropagator mp(small_graph(), noise, forcing);
    const std::vector<double> p0 = {0.3, 0.5, 0.9, 0.2};
    const Eigen::VectorXd d0 = product_distribution(c, p0);
    const PairMoments m0 = mp.independent(p0);
    for (std::size_t t : {0, 2, 6}) {
      const PairMoments mt = mp.propagate(m0, t);
      const auto exact = exact_marginals(c, d0, t);
      for (NodeId i = 0; i < 4; ++i) CHECK(std::abs(mt.p[i] - exact[i]) < 1e-13);
      for (NodeId i = 0; i < 4; ++i)
        for (NodeId j = 0; j < 4; ++j)
          for (std::size_t tau : {0, 1, 3}) {
            const auto law = exact_joint(c, d0, i, j, t, tau);
            CHECK(std::abs(mp.delayed_cross(mt, i, tau)[j] - law[3]) < 1e-13);
            CHECK(std::abs(mp.delayed_mi(mt, i, j, tau) - exact_delayed_mi(c, d0, i, j, t, tau)) < 1e-11);
          }
    }
    const PairMoments st = mp.stationary();
    const auto es = exact_marginals(c, exact_stationary(c), 0);
    for (NodeId i = 0; i < 4; ++i) CHECK(std::abs(st.p[i] - es[i]) < 1e-11);
  }

  TEST_CASE("Monte-Carlo estimates approach the exact values") {
    const ExactChain c(make_line(2), NoiseResponse(0.1), ForcingPlan::single(0));
    const double exact = exact_delayed_mi(c, uniform_initial(c), 1, 2, 3, 1);
    for (std::size_t runs : {1000, 100000}) {
      EnsembleSpec s;
      s.graph = make_line(2);
      s.noise = NoiseResponse(0.1);
      s.forcing = ForcingPlan::single(0);
      s.runs = runs;
      s.horizon = 4;
      s.retain_times = {3, 4};
      s.base_seed = 17;
      const EnsembleResult r = run_ensemble(s);
      const double err = std::abs(delayed_mutual_information(r.samples, 1, 2, 3, 1).value_bits - exact);
      CHECK(err < 0.03);
      if (runs == 100000) CHECK(err < 0.005);
    }
  }
}
