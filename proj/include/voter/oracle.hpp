#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "voter/dynamics.hpp"
#include "voter/graph.hpp"

namespace voter {

/// The full 2^n-state Markov chain induced by the synchronous update.
/// State index bit i holds s_i. Transitions are generated on the fly from the
/// per-node one-probabilities, so no 2^n x 2^n matrix is stored.
class ExactChain {
 public:
  static constexpr std::size_t kMaxNodes = 14;

  ExactChain(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing);

  std::size_t node_count() const { return n_; }
  std::size_t state_count() const { return std::size_t{1} << n_; }
  const ForcingPlan& forcing() const { return forcing_; }

  /// P(s_i(t+1) = 1 | s(t) = state) for every node.
  std::span<const double> next_one_probabilities(std::uint32_t state) const;
  double transition(std::uint32_t from, std::uint32_t to) const;
  /// Row-stochastic matrix; only for node_count() <= 10.
  Eigen::MatrixXd dense_transition() const;

  Eigen::VectorXd step(const Eigen::VectorXd& dist) const;
  Eigen::VectorXd propagate(Eigen::VectorXd dist, std::size_t steps) const;

 private:
  std::size_t n_;
  ForcingPlan forcing_;
  std::vector<double> q_;  // state_count x n
};

/// Independent Bernoulli initial law with the forcing applied.
Eigen::VectorXd product_distribution(const ExactChain& chain, const std::vector<double>& p_one);
/// Free agents i.i.d. Bernoulli(1/2).
Eigen::VectorXd uniform_initial(const ExactChain& chain);
Eigen::VectorXd point_mass(const ExactChain& chain, const BitState& state);

std::vector<double> exact_marginals(const ExactChain& chain, const Eigen::VectorXd& dist0, std::size_t t);

/// Law of (X_i(t), X_j(t+tau)) as {p00, p01, p10, p11}.
std::array<double, 4> exact_joint(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i,
                                  NodeId j, std::size_t t, std::size_t tau);

double exact_delayed_mi(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i, NodeId j,
                        std::size_t t, std::size_t tau);
double exact_delayed_multi_info(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i,
                                std::size_t t, std::size_t tau);

/// Power iteration until the L1 change drops below tol.
Eigen::VectorXd exact_stationary(const ExactChain& chain, double tol = 1e-12,
                                 std::size_t max_iterations = 1'000'000);

/// First and second moments of the state vector: p_i = E[s_i] and
/// second(i, k) = E[s_i s_k] (so second(i, i) = p_i).
struct PairMoments {
  Eigen::VectorXd p;
  Eigen::MatrixXd second;
};

/// Exact propagation of PairMoments. Because the response is affine in the
/// neighborhood density and the node draws are conditionally independent,
/// the first two moments close on themselves for any graph. Scales to
/// graphs far beyond the 2^n enumeration limit.
class MomentPropagator {
 public:
  MomentPropagator(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing);

  std::size_t node_count() const { return static_cast<std::size_t>(c_.size()); }

  PairMoments independent(const std::vector<double>& p_one) const;
  PairMoments step(const PairMoments& m) const;
  PairMoments propagate(PairMoments m, std::size_t steps) const;
  PairMoments stationary(double tol = 1e-14, std::size_t max_iterations = 1'000'000) const;

  Eigen::VectorXd mean_after(Eigen::VectorXd p, std::size_t steps) const;
  /// E[s_j(t+tau) s_i(t)] for every j, given the moments at time t.
  Eigen::VectorXd delayed_cross(const PairMoments& at_t, NodeId i, std::size_t tau) const;
  /// Exact I(X_i(t); X_j(t+tau)) in bits.
  double delayed_mi(const PairMoments& at_t, NodeId i, NodeId j, std::size_t tau) const;

 private:
  Eigen::MatrixXd g_;  // E[s(t+1) | s(t)] = g_ s(t) + c_
  Eigen::VectorXd c_;
  std::vector<bool> forced_;
};

/// I(X;Y) in bits of two binary variables from P(X=1), P(Y=1), P(X=1,Y=1).
double binary_pair_mi(double px, double py, double p11);

}  // namespace voter
