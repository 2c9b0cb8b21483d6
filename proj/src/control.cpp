#include "voter/control.hpp"

#include <cmath>
#include <limits>

#include "voter/errors.hpp"
#include "voter/meanfield.hpp"

namespace voter {

namespace {

// g(k) = a^k sum_{d<n} binom(k, d) bounds the largest entry of a row/column
// of A^k times its length; evaluated in log-space.
double log_row_mass(double a, std::size_t n, std::size_t k) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < n && d <= k; ++d) {
    const double lb = std::lgamma(k + 1.0) - std::lgamma(d + 1.0) - std::lgamma(k - d + 1.0);
    m = std::max(m, lb) + std::log1p(std::exp(std::min(m, lb) - std::max(m, lb)));
  }
  return static_cast<double>(k) * std::log(a) + m;
}

// Sums v_k v_k^T with v_{k+1} = step v_k, stopping once the certified tail
// scale * sum_{k>K} g(k)^2 is below tol.
GramianResult truncated_sum(const Eigen::MatrixXd& step, Eigen::VectorXd v, double a, std::size_t n,
                            double scale, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  GramianResult r;
  r.matrix = Eigen::MatrixXd::Zero(v.size(), v.size());
  if (a == 0.0) {
    r.matrix = v * v.transpose();
    r.truncation_k = 1;
    return r;
  }
  for (std::size_t k = 0;; ++k) {
    r.matrix.noalias() += v * v.transpose();
    v = step * v;
    r.truncation_k = k + 1;
    if (k + 2 <= n) continue;
    const double q = a * (k + 1.0) / (k + 2.0 - static_cast<double>(n));
    if (q >= 1.0) continue;
    const double tail = scale * std::exp(2.0 * log_row_mass(a, n, k)) * q * q / (1.0 - q * q);
    if (tail < tol) {
      r.tail_bound = tail;
      break;
    }
  }
  r.matrix = 0.5 * (r.matrix + r.matrix.transpose());
  return r;
}

}  // namespace

StateSpaceSystem build_system(std::size_t n, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw DomainError("noise must lie in [0, 1/2)");
  MeanFieldSystem mf(n, epsilon);
  StateSpaceSystem s;
  s.n = n;
  s.epsilon = epsilon;
  s.a = mf.matrix_a();
  s.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.b[0] = mf.gain();
  s.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  s.c[static_cast<Eigen::Index>(n) - 1] = 1.0;
  return s;
}

Eigen::VectorXd centered_residual(const StateSpaceSystem& sys) {
  MeanFieldSystem mf(sys.n, sys.epsilon);
  const Eigen::VectorXd half = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(sys.n), 0.5);
  // p = x + 1/2 and p_0 = u + 1/2 substituted into P' = A P + B.
  return sys.a * half + mf.vector_b() - half - sys.b * 0.5;
}

Eigen::VectorXd solution(const StateSpaceSystem& sys, const Eigen::VectorXd& x0,
                         std::span<const double> u, std::size_t t) {
  if (static_cast<std::size_t>(x0.size()) != sys.n) throw DimensionError("initial state length mismatch");
  if (u.size() < t) throw DimensionError("input signal shorter than horizon");
  MeanFieldSystem mf(sys.n, sys.epsilon);
  Eigen::VectorXd x = matrix_power(mf, t) * x0;
  for (std::size_t j = 0; j < t; ++j) x += matrix_power(mf, t - 1 - j) * sys.b * u[j];
  return x;
}

Eigen::MatrixXd observability_matrix(const StateSpaceSystem& sys) {
  const auto n = static_cast<Eigen::Index>(sys.n);
  Eigen::MatrixXd o(n, n);
  Eigen::RowVectorXd row = sys.c.transpose();
  for (Eigen::Index k = 0; k < n; ++k) {
    o.row(k) = row;
    row = row * sys.a;
  }
  return o;
}

std::size_t matrix_rank(const Eigen::MatrixXd& m) {
  return static_cast<std::size_t>(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(m).rank());
}

GramianResult observability_gramian(const StateSpaceSystem& sys, double tol) {
  return truncated_sum(sys.a.transpose(), sys.c, 0.5 - sys.epsilon, sys.n, 1.0, tol);
}

GramianResult reachability_gramian(const StateSpaceSystem& sys, double tol) {
  const double g = 0.5 - sys.epsilon;
  return truncated_sum(sys.a, sys.b, g, sys.n, g * g, tol);
}

Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& m, const Eigen::MatrixXd& q) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || q.rows() != n || q.cols() != n) throw DimensionError("Lyapunov operands must be square and equal size");
  if (n > 30) throw InvalidArgument("Kronecker Lyapunov solve limited to n <= 30");
  // vec(M^T X M) = (M^T kron M^T) vec(X)
  const Eigen::MatrixXd mt = m.transpose();
  Eigen::MatrixXd k(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = mt(i, j) * mt;
  k -= Eigen::MatrixXd::Identity(n * n, n * n);
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  Eigen::VectorXd x = k.partialPivLu().solve(rhs);
  Eigen::MatrixXd out = Eigen::Map<Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd observability_residual(const StateSpaceSystem& sys, const Eigen::MatrixXd& w) {
  return sys.a.transpose() * w * sys.a - w + sys.c * sys.c.transpose();
}

Eigen::MatrixXd reachability_residual(const StateSpaceSystem& sys, const Eigen::MatrixXd& w) {
  return sys.a * w * sys.a.transpose() - w + sys.b * sys.b.transpose();
}

double output_energy(const Eigen::MatrixXd& observability, const Eigen::VectorXd& x0) {
  if (observability.rows() != x0.size()) throw DimensionError("state length mismatch");
  return x0.dot(observability * x0);
}

double simulated_output_energy(const StateSpaceSystem& sys, const Eigen::VectorXd& x0) {
  if (static_cast<std::size_t>(x0.size()) != sys.n) throw DimensionError("state length mismatch");
  Eigen::VectorXd x = x0;
  double sum = 0.0;
  for (std::size_t k = 0; k < 1'000'000; ++k) {
    const double y = sys.c.dot(x);
    sum += y * y;
    if (k >= sys.n && x.squaredNorm() <= 1e-40 * std::max(sum, 1e-300)) return sum;
    x = sys.a * x;
    if (x.isZero(0.0)) return sum;
  }
  throw NumericFailure("free response did not decay");
}

double min_energy(const GramianResult& reachability, const Eigen::VectorXd& target, double tol) {
  const Eigen::MatrixXd& w = reachability.matrix;
  if (w.rows() != target.size()) throw DimensionError("target length mismatch");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(w);
  if (ldlt.info() != Eigen::Success) throw UnreachableTarget("reachability Gramian factorization failed");
  const Eigen::VectorXd x = ldlt.solve(target);
  const double err = (w * x - target).norm();
  if (!x.allFinite() || err > tol * std::max(target.norm(), 1e-300))
    throw UnreachableTarget("target lies outside the reachable subspace");
  return target.dot(x);
}

EnergyBounds observation_energy_bounds(std::size_t n, double epsilon) {
  if (n == 0) throw InvalidArgument("dimension must be positive");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("noise must lie in (0, 1/2)");
  const double nn = static_cast<double>(n);
  EnergyBounds e{};
  e.log_lower = 2.0 * nn * std::log(0.5 - epsilon) + std::log(4.0 * (3.0 - 2.0 * epsilon)) -
                3.0 * std::log1p(2.0 * epsilon) - 2.0 * std::lgamma(nn);
  e.log_upper = std::log(4.0) + 2.0 * nn * std::log1p(-2.0 * epsilon) -
                (2.0 * nn + 2.0) * std::log1p(2.0 * epsilon);
  e.lower = std::exp(e.log_lower);
  e.upper = std::exp(e.log_upper);
  return e;
}

}  // namespace voter
