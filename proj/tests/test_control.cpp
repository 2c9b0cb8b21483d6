#include <doctest.h>

#include <random>

#include "voter/control.hpp"
#include "voter/errors.hpp"
#include "voter/meanfield.hpp"

using namespace voter;

TEST_SUITE("control") {
  TEST_CASE("state-space form") {
    const StateSpaceSystem s = build_system(4, 0.1);
    CHECK(s.b[0] == doctest::Approx(0.4));
    CHECK(s.b.tail(3).isZero());
    CHECK(s.c[3] == 1.0);
    const Eigen::VectorXcd ev = s.a.eigenvalues();
    for (Eigen::Index k = 0; k < 4; ++k) CHECK(std::abs(ev[k] - 0.4) < 1e-3);
    CHECK(centered_residual(s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(centered_residual(build_system(30, 0.013)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK_THROWS_AS(build_system(3, 0.5), DomainError);
  }

  TEST_CASE("solution reproduces the affine recursion under centering") {
    const double eps = 0.07;
    const StateSpaceSystem s = build_system(6, eps);
    const MeanFieldSystem mf(6, eps);
    Eigen::VectorXd p0(6);
    p0 << 0.2, 0.5, 0.9, 0.1, 0.6, 0.4;
    const std::vector<double> u(30, 0.5);
    for (std::size_t t : {0, 1, 7, 30}) {
      const Eigen::VectorXd x = solution(s, p0.array() - 0.5, u, t);
      CHECK(((x.array() + 0.5).matrix() - iterate(mf, p0, t)).cwiseAbs().maxCoeff() < 1e-13);
    }
    std::vector<double> signal = {0.3, -0.2, 0.5};
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(6, 0.1);
    CHECK((solution(s, x0, signal, 1) - (s.a * x0 + s.b * 0.3)).norm() < 1e-15);
    const std::vector<double> zero(400, 0.0);
    CHECK(solution(s, x0, zero, 400).norm() < 1e-30);
  }

  TEST_CASE("observability matrix") {
    CHECK(matrix_rank(observability_matrix(build_system(2, 0.01))) == 2);
    CHECK(matrix_rank(observability_matrix(build_system(8, 0.05))) == 8);
    const StateSpaceSystem s = build_system(5, 0.1);
    const MeanFieldSystem mf(5, 0.1);
    const Eigen::MatrixXd o = observability_matrix(s);
    for (std::size_t k = 0; k < 5; ++k) CHECK((o.row(k) - matrix_power(mf, k).row(4)).norm() < 1e-15);
  }

  TEST_CASE("scalar Gramians") {
    const StateSpaceSystem s = build_system(1, 0.05);
    const GramianResult wo = observability_gramian(s);
    CHECK(wo.matrix(0, 0) == doctest::Approx(1.2539184952978057).epsilon(1e-13));
    const GramianResult wc = reachability_gramian(s);
    CHECK(wc.matrix(0, 0) == doctest::Approx(0.2539184952978057).epsilon(1e-13));
    CHECK(min_energy(wc, Eigen::VectorXd::Constant(1, 0.5)) == doctest::Approx(0.25 / 0.2539184952978057).epsilon(1e-12));
    CHECK_THROWS_AS(observability_gramian(s, 0.0), InvalidArgument);
  }

  TEST_CASE("Gramians: certificate, Lyapunov equation and symmetry") {
    for (std::size_t n : {3, 5, 10})
      for (double eps : {0.0, 0.01, 0.05, 0.1}) {
        const StateSpaceSystem s = build_system(n, eps);
        const GramianResult wo = observability_gramian(s);
        const GramianResult wc = reachability_gramian(s);
        CHECK(wo.tail_bound < 1e-14);
        CHECK(observability_residual(s, wo.matrix).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(reachability_residual(s, wc.matrix).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((wo.matrix - wo.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(wo.matrix).eigenvalues().minCoeff() > -1e-12);
        const Eigen::MatrixXd lyap = solve_discrete_lyapunov(s.a, s.c * s.c.transpose());
        CHECK((lyap - wo.matrix).cwiseAbs().maxCoeff() < 1e-8);
        // Reversing the agent order swaps the roles of b and c.
        const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n).rowwise().reverse();
        const double g = 0.5 - eps;
        CHECK((wc.matrix - g * g * j * wo.matrix * j).cwiseAbs().maxCoeff() < 1e-12);
      }
  }

  TEST_CASE("output energy equals the summed free response") {
    const StateSpaceSystem s = build_system(5, 0.05);
    const GramianResult wo = observability_gramian(s);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd x(5);
      for (int k = 0; k < 5; ++k) x[k] = u(rng);
      const double direct = simulated_output_energy(s, x);
      CHECK(std::abs(output_energy(wo.matrix, x) - direct) <= 1e-6 * direct);
    }
  }

  TEST_CASE("energy bounds") {
    const struct {
      std::size_t n;
      double eps;
      double energy;
    } frozen[] = {{3, 0.05, 0.23529054821996871564}, {5, 0.05, 0.07539398002599735004}, {10, 0.1, 1.6649074764937968e-4}};
    for (const auto& f : frozen)
      CHECK(observability_gramian(build_system(f.n, f.eps)).matrix(0, 0) == doctest::Approx(f.energy).epsilon(1e-12));
    for (std::size_t n : {3, 5, 10})
      for (double eps : {0.01, 0.05, 0.1}) {
        const double e = observability_gramian(build_system(n, eps)).matrix(0, 0);
        const EnergyBounds b = observation_energy_bounds(n, eps);
        CHECK(b.lower < e);
        CHECK(e < b.upper);
        CHECK(std::log(b.lower) == doctest::Approx(b.log_lower));
      }
    for (double eps : {0.01, 0.05, 0.1}) {
      double prev = 0.0;
      for (std::size_t n = 3; n <= 10; ++n) {
        const EnergyBounds b = observation_energy_bounds(n, eps);
        CHECK(b.log_upper - b.log_lower > prev);
        prev = b.log_upper - b.log_lower;
      }
    }
    const double lc = control_length(0.05).value;
    const std::size_t k = static_cast<std::size_t>(std::ceil(lc / 2.0));
    CHECK(observation_energy_bounds(10 + k, 0.05).upper <= 0.5 * observation_energy_bounds(10, 0.05).upper);
    CHECK(observation_energy_bounds(10, 0.4999).upper < 1e-30);
    CHECK(std::isfinite(observation_energy_bounds(2000, 0.01).log_lower));
  }

  TEST_CASE("minimum-energy reachability") {
    double prev = 0.0;
    for (std::size_t n = 2; n <= 10; ++n) {
      const StateSpaceSystem s = build_system(n, 0.05);
      const double e = min_energy(reachability_gramian(s), Eigen::VectorXd::Constant(n, 0.5));
      CHECK(e > prev);
      prev = e;
    }
    GramianResult singular;
    singular.matrix = Eigen::MatrixXd::Zero(2, 2);
    singular.matrix(0, 0) = 1.0;
    CHECK_THROWS_AS(min_energy(singular, Eigen::Vector2d(0.0, 1.0)), UnreachableTarget);
  }
}
