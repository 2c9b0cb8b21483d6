#include "voter/meanfield.hpp"

#include <cmath>
#include <limits>

#include "voter/errors.hpp"

namespace voter {

namespace {

void check_probability_vector(const MeanFieldSystem& sys, const Eigen::VectorXd& p0) {
  if (static_cast<std::size_t>(p0.size()) != sys.n())
    throw DimensionError("probability vector length does not match system size");
  for (Eigen::Index i = 0; i < p0.size(); ++i)
    if (!(p0[i] >= 0.0 && p0[i] <= 1.0)) throw DomainError("initial entries must lie in [0, 1]");
}

}  // namespace

MeanFieldSystem::MeanFieldSystem(std::size_t n, double epsilon) : n_(n), epsilon_(epsilon) {
  if (n == 0) throw InvalidArgument("mean-field system needs at least one free agent");
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw DomainError("noise must lie in [0, 1/2]");
}

Eigen::MatrixXd MeanFieldSystem::matrix_a() const {
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = gain();
    if (i > 0) a(i, i - 1) = gain();
  }
  return a;
}

Eigen::VectorXd MeanFieldSystem::vector_b() const {
  Eigen::VectorXd b = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_), epsilon_);
  b[0] = 0.5;
  return b;
}

Eigen::VectorXd iterate(const MeanFieldSystem& sys, const Eigen::VectorXd& p0, std::size_t t) {
  check_probability_vector(sys, p0);
  const double g = sys.gain();
  const double eps = sys.epsilon();
  Eigen::VectorXd p = p0;
  for (std::size_t s = 0; s < t; ++s) {
    // Descending order keeps p_{i-1}(t) intact until p_i is updated.
    for (Eigen::Index i = p.size() - 1; i >= 1; --i) p[i] = g * (p[i] + p[i - 1]) + eps;
    p[0] = g * (p[0] + 1.0) + eps;
  }
  return p;
}

Eigen::VectorXd iterate_explicit(const MeanFieldSystem& sys, const Eigen::VectorXd& p0,
                                 std::size_t t) {
  check_probability_vector(sys, p0);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p0.size());
  for (std::size_t j = 0; j < t; ++j) acc += matrix_power(sys, j) * sys.vector_b();
  return matrix_power(sys, t) * p0 + acc;
}

Eigen::MatrixXd matrix_power(const MeanFieldSystem& sys, std::size_t p) {
  const auto n = static_cast<Eigen::Index>(sys.n());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const double g = sys.gain();
  if (p == 0) return Eigen::MatrixXd::Identity(n, n);
  if (g == 0.0) return out;
  const double log_scale = static_cast<double>(p) * std::log(g);
  const double lp = std::lgamma(static_cast<double>(p) + 1.0);
  const auto band = static_cast<Eigen::Index>(std::min<std::size_t>(p, sys.n() - 1));
  for (Eigen::Index d = 0; d <= band; ++d) {
    const double log_binom = lp - std::lgamma(static_cast<double>(d) + 1.0) -
                             std::lgamma(static_cast<double>(p - d) + 1.0);
    const double v = std::exp(log_binom + log_scale);
    for (Eigen::Index i = d; i < n; ++i) out(i, i - d) = v;
  }
  return out;
}

StationaryDistribution stationary(const MeanFieldSystem& sys) {
  const double eps = sys.epsilon();
  const auto n = static_cast<Eigen::Index>(sys.n());
  StationaryDistribution st;
  if (eps == 0.0) {
    st.pi = Eigen::VectorXd::Ones(n);
    st.noiseless_limit = true;
    return st;
  }
  const double ratio = (1.0 - 2.0 * eps) / (1.0 + 2.0 * eps);
  const double pi1 = 1.0 / (1.0 + 2.0 * eps);
  st.pi.resize(n);
  double r = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    st.pi[i] = 0.5 + r * (pi1 - 0.5);
    r *= ratio;
  }
  return st;
}

LimitValue control_length(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw DomainError("noise must lie in [0, 1/2]");
  if (epsilon == 0.0) return {std::numeric_limits<double>::infinity(), true};
  if (epsilon == 0.5) return {0.0, true};
  // log1p keeps precision for small eps: ln((1+x)/(1-x)) = log1p(x) - log1p(-x)
  const double x = 2.0 * epsilon;
  return {1.0 / (std::log1p(x) - std::log1p(-x)), false};
}

LimitValue mean_density(const MeanFieldSystem& sys) {
  const double eps = sys.epsilon();
  if (eps == 0.0) return {1.0, true};
  const double n = static_cast<double>(sys.n());
  const double ratio = (1.0 - 2.0 * eps) / (1.0 + 2.0 * eps);
  const double s = 0.5 + (1.0 / (2.0 * n)) * ((1.0 - 2.0 * eps) / (4.0 * eps)) *
                             (1.0 - std::pow(ratio, n));
  return {s, false};
}

std::size_t steady_state_time(const MeanFieldSystem& sys, const Eigen::VectorXd& p0,
                              double threshold, std::size_t max_steps) {
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  const Eigen::VectorXd pi = stationary(sys).pi;
  Eigen::VectorXd p = p0;
  check_probability_vector(sys, p0);
  for (std::size_t t = 0; t <= max_steps; ++t) {
    if ((p - pi).cwiseAbs().maxCoeff() < threshold) return t;
    p = iterate(sys, p, 1);
  }
  throw NumericFailure("mean-field recursion did not reach steady state");
}

double critical_noise(std::size_t n, double threshold, double tolerance) {
  if (!(threshold > 0.0 && threshold < 0.5)) throw InvalidArgument("threshold must lie in (0, 1/2)");
  auto excess = [n](double eps) { return mean_density(MeanFieldSystem(n, eps)).value - 0.5; };
  double lo = 0.0, hi = 0.5;
  if (excess(std::nextafter(0.5, 0.0)) >= threshold) return 0.5;
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid > 0.0 && excess(mid) < threshold) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace voter
