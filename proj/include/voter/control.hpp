#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace voter {

/// Centered state-space form of the controlled line: x = p - 1/2 for the n
/// free agents, input u = p_0 - 1/2 on the forced agent, output the last agent.
///   x(t+1) = A x(t) + b u(t),   y(t) = c^T x(t)
/// The constant term of the uncentered recursion cancels exactly, see
/// centered_residual().
struct StateSpaceSystem {
  std::size_t n = 0;
  double epsilon = 0.0;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;  // (1/2 - eps) e_1
  Eigen::VectorXd c;  // e_n
};

StateSpaceSystem build_system(std::size_t n, double epsilon);

/// Constant term left over after centering the uncentered affine recursion
/// with the forcing routed through b. Zero up to rounding.
Eigen::VectorXd centered_residual(const StateSpaceSystem& sys);

/// A^t x0 + sum_{j<t} A^{t-1-j} b u(j); u must hold at least t values.
Eigen::VectorXd solution(const StateSpaceSystem& sys, const Eigen::VectorXd& x0,
                         std::span<const double> u, std::size_t t);

/// Rows c^T, c^T A, ..., c^T A^{n-1}.
Eigen::MatrixXd observability_matrix(const StateSpaceSystem& sys);
std::size_t matrix_rank(const Eigen::MatrixXd& m);

struct GramianResult {
  Eigen::MatrixXd matrix;
  std::size_t truncation_k = 0;  // number of summed terms
  double tail_bound = 0.0;       // certified bound on the Frobenius norm of the omitted tail
};

/// W_o = sum_k (A^k)^T c c^T A^k, summed until the certified tail is below tol.
GramianResult observability_gramian(const StateSpaceSystem& sys, double tol = 1e-14);
/// W_c = sum_k A^k b b^T (A^T)^k, summed until the certified tail is below tol.
GramianResult reachability_gramian(const StateSpaceSystem& sys, double tol = 1e-14);

/// Solves M^T X M - X + Q = 0 through the Kronecker form; n <= 30.
Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q);
/// A^T W A - W + c c^T
Eigen::MatrixXd observability_residual(const StateSpaceSystem& sys, const Eigen::MatrixXd& w);
/// A W A^T - W + b b^T
Eigen::MatrixXd reachability_residual(const StateSpaceSystem& sys, const Eigen::MatrixXd& w);

/// x0^T W_o x0.
double output_energy(const Eigen::MatrixXd& observability, const Eigen::VectorXd& x0);
/// sum_k y(k)^2 of the free response, summed step by step.
double simulated_output_energy(const StateSpaceSystem& sys, const Eigen::VectorXd& x0);

/// x^T W_c^{-1} x via a factorized solve. Throws UnreachableTarget when the
/// solve does not reproduce the target to within tol (relative).
double min_energy(const GramianResult& reachability, const Eigen::VectorXd& target,
                  double tol = 1e-8);

/// Bounds on the output energy of the initial deviation e_1 (unit deviation
/// on the agent next to the forced one), kept in log-space as well.
struct EnergyBounds {
  double log_lower;
  double log_upper;
  double lower;
  double upper;
};

EnergyBounds observation_energy_bounds(std::size_t n, double epsilon);

}  // namespace voter
