#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace voter {

/// A value that may be an endpoint limit rather than a regular evaluation
/// (for instance the control length at zero noise).
struct LimitValue {
  double value;
  bool is_limit = false;
};

/// Affine recursion P(t+1) = A P(t) + B for the one-probabilities of the n
/// free agents of the controlled line (agent 0 clamped to 1).
class MeanFieldSystem {
 public:
  MeanFieldSystem(std::size_t n, double epsilon);

  std::size_t n() const { return n_; }
  double epsilon() const { return epsilon_; }
  double gain() const { return 0.5 - epsilon_; }  // the diagonal/sub-diagonal value of A

  Eigen::MatrixXd matrix_a() const;
  Eigen::VectorXd vector_b() const;

 private:
  std::size_t n_;
  double epsilon_;
};

/// P(t) by the site recursion p_i(t+1) = g p_i(t) + g p_{i-1}(t) + eps with p_0 = 1.
Eigen::VectorXd iterate(const MeanFieldSystem& sys, const Eigen::VectorXd& p0, std::size_t t);

/// P(t) = A^t P0 + (sum_{j<t} A^j) B through explicit matrix powers.
Eigen::VectorXd iterate_explicit(const MeanFieldSystem& sys, const Eigen::VectorXd& p0,
                                 std::size_t t);

/// A^p from its closed form: entry (i, i-d) is g^p * binom(p, d), evaluated
/// in log-space so large p stays finite.
Eigen::MatrixXd matrix_power(const MeanFieldSystem& sys, std::size_t p);

struct StationaryDistribution {
  Eigen::VectorXd pi;         // pi(0) is agent 1
  bool noiseless_limit = false;
};

StationaryDistribution stationary(const MeanFieldSystem& sys);

/// l_c = 1 / ln((1 + 2 eps) / (1 - 2 eps)); +inf (flagged) at eps = 0, 0 at eps = 1/2.
LimitValue control_length(double epsilon);

/// Long-time mean density S of the free agents; 1 (flagged) at eps = 0.
LimitValue mean_density(const MeanFieldSystem& sys);

/// First t with |P(t) - Pi|_inf < threshold, starting from p0.
std::size_t steady_state_time(const MeanFieldSystem& sys, const Eigen::VectorXd& p0,
                              double threshold = 1e-4, std::size_t max_steps = 1'000'000);

/// Smallest noise at which S - 1/2 drops below threshold, by bisection on
/// eps in (0, 1/2). S decreases monotonically in eps.
double critical_noise(std::size_t n, double threshold, double tolerance = 1e-10);

}  // namespace voter
