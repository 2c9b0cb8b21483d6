#include "voter/oracle.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <string>

#include "voter/errors.hpp"

namespace voter {

namespace {

double entropy_bits(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

}  // namespace

ExactChain::ExactChain(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing)
    : n_(graph.node_count()), forcing_(forcing) {
  if (n_ > kMaxNodes)
    throw InvalidArgument("exact chain supports at most " + std::to_string(kMaxNodes) + " nodes");
  forcing.validate(n_);
  q_.resize(state_count() * n_);
  for (std::uint32_t s = 0; s < state_count(); ++s) {
    for (NodeId i = 0; i < n_; ++i) {
      double q;
      if (auto v = forcing.value(i)) {
        q = *v ? 1.0 : 0.0;
      } else {
        auto nb = graph.in_neighbors(i);
        std::size_t ones = 0;
        for (NodeId j : nb) ones += (s >> j) & 1U;
        q = noise(static_cast<double>(ones) / static_cast<double>(nb.size()));
      }
      q_[s * n_ + i] = q;
    }
  }
}

std::span<const double> ExactChain::next_one_probabilities(std::uint32_t state) const {
  return {q_.data() + static_cast<std::size_t>(state) * n_, n_};
}

double ExactChain::transition(std::uint32_t from, std::uint32_t to) const {
  auto q = next_one_probabilities(from);
  double p = 1.0;
  for (std::size_t i = 0; i < n_; ++i) p *= ((to >> i) & 1U) ? q[i] : 1.0 - q[i];
  return p;
}

Eigen::MatrixXd ExactChain::dense_transition() const {
  if (n_ > 10) throw InvalidArgument("dense transition matrix limited to 10 nodes");
  const auto m = static_cast<Eigen::Index>(state_count());
  Eigen::MatrixXd t(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = 0; b < m; ++b)
      t(a, b) = transition(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b));
  return t;
}

Eigen::VectorXd ExactChain::step(const Eigen::VectorXd& dist) const {
  if (static_cast<std::size_t>(dist.size()) != state_count())
    throw DimensionError("distribution length does not match state count");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dist.size());
  std::vector<double> mass;
  std::vector<std::uint32_t> target;
  for (std::uint32_t s = 0; s < state_count(); ++s) {
    const double w = dist[s];
    if (w == 0.0) continue;
    auto q = next_one_probabilities(s);
    // Expand the product law node by node.
    mass.assign(1, w);
    target.assign(1, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (q[i] == 1.0) {
        for (auto& t : target) t |= 1U << i;
        continue;
      }
      if (q[i] == 0.0) continue;
      const std::size_t k = mass.size();
      for (std::size_t r = 0; r < k; ++r) {
        mass.push_back(mass[r] * q[i]);
        target.push_back(target[r] | (1U << i));
        mass[r] *= 1.0 - q[i];
      }
    }
    for (std::size_t r = 0; r < mass.size(); ++r) out[target[r]] += mass[r];
  }
  return out;
}

Eigen::VectorXd ExactChain::propagate(Eigen::VectorXd dist, std::size_t steps) const {
  for (std::size_t k = 0; k < steps; ++k) dist = step(dist);
  return dist;
}

Eigen::VectorXd product_distribution(const ExactChain& chain, const std::vector<double>& p_one) {
  const std::size_t n = chain.node_count();
  if (p_one.size() != n) throw DimensionError("initial probability vector length mismatch");
  std::vector<double> p = p_one;
  for (auto [node, v] : chain.forcing().entries()) p[node] = v ? 1.0 : 0.0;
  Eigen::VectorXd dist(static_cast<Eigen::Index>(chain.state_count()));
  for (std::uint32_t s = 0; s < chain.state_count(); ++s) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= ((s >> i) & 1U) ? p[i] : 1.0 - p[i];
    dist[s] = w;
  }
  return dist;
}

Eigen::VectorXd uniform_initial(const ExactChain& chain) {
  return product_distribution(chain, std::vector<double>(chain.node_count(), 0.5));
}

Eigen::VectorXd point_mass(const ExactChain& chain, const BitState& state) {
  if (state.size() != chain.node_count()) throw DimensionError("state length mismatch");
  BitState s = state;
  chain.forcing().apply(s);
  std::uint32_t idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) idx |= static_cast<std::uint32_t>(s[i]) << i;
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(chain.state_count()));
  dist[idx] = 1.0;
  return dist;
}

std::vector<double> exact_marginals(const ExactChain& chain, const Eigen::VectorXd& dist0, std::size_t t) {
  const Eigen::VectorXd d = chain.propagate(dist0, t);
  std::vector<double> m(chain.node_count(), 0.0);
  for (std::uint32_t s = 0; s < chain.state_count(); ++s)
    for (std::size_t i = 0; i < m.size(); ++i)
      if ((s >> i) & 1U) m[i] += d[s];
  return m;
}

namespace {

// Splits the law at time t by the value of s_i, then runs each half tau more steps.
std::array<Eigen::VectorXd, 2> conditioned_halves(const ExactChain& chain, const Eigen::VectorXd& dist0,
                                                  NodeId i, std::size_t t, std::size_t tau) {
  if (i >= chain.node_count()) throw InvalidArgument("agent index out of range");
  const Eigen::VectorXd d = chain.propagate(dist0, t);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.size()), one = Eigen::VectorXd::Zero(d.size());
  for (std::uint32_t s = 0; s < chain.state_count(); ++s) ((s >> i) & 1U ? one : zero)[s] = d[s];
  return {chain.propagate(zero, tau), chain.propagate(one, tau)};
}

}  // namespace

std::array<double, 4> exact_joint(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i,
                                  NodeId j, std::size_t t, std::size_t tau) {
  if (j >= chain.node_count()) throw InvalidArgument("agent index out of range");
  auto halves = conditioned_halves(chain, dist0, i, t, tau);
  std::array<double, 4> law{};
  for (int x = 0; x < 2; ++x)
    for (std::uint32_t s = 0; s < chain.state_count(); ++s)
      law[2 * x + ((s >> j) & 1U)] += halves[x][s];
  return law;
}

double exact_delayed_mi(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i, NodeId j,
                        std::size_t t, std::size_t tau) {
  const auto law = exact_joint(chain, dist0, i, j, t, tau);
  const double px[2] = {law[0] + law[1], law[2] + law[3]};
  const double py[2] = {law[0] + law[2], law[1] + law[3]};
  const double mi = entropy_bits(px) + entropy_bits(py) - entropy_bits(law);
  return std::max(mi, 0.0);
}

double exact_delayed_multi_info(const ExactChain& chain, const Eigen::VectorXd& dist0, NodeId i,
                                std::size_t t, std::size_t tau) {
  auto halves = conditioned_halves(chain, dist0, i, t, tau);
  const std::size_t n = chain.node_count();
  std::vector<double> joint(2 * n, 0.0), py(n, 0.0);
  double px[2] = {0.0, 0.0};
  for (int x = 0; x < 2; ++x) {
    for (std::uint32_t s = 0; s < chain.state_count(); ++s) {
      const std::size_t y = static_cast<std::size_t>(std::popcount(s)) - ((s >> i) & 1U);
      joint[x * n + y] += halves[x][s];
      py[y] += halves[x][s];
      px[x] += halves[x][s];
    }
  }
  const double mi = entropy_bits(px) + entropy_bits(py) - entropy_bits(joint);
  return std::max(mi, 0.0);
}

Eigen::VectorXd exact_stationary(const ExactChain& chain, double tol, std::size_t max_iterations) {
  Eigen::VectorXd d = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(chain.state_count()),
                                                1.0 / static_cast<double>(chain.state_count()));
  for (std::size_t k = 0; k < max_iterations; ++k) {
    Eigen::VectorXd next = chain.step(d);
    const double change = (next - d).lpNorm<1>();
    d = std::move(next);
    if (change < tol) return d;
  }
  throw NumericFailure("power iteration did not converge");
}

MomentPropagator::MomentPropagator(const Graph& graph, const NoiseResponse& noise,
                                   const ForcingPlan& forcing) {
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  forcing.validate(graph.node_count());
  g_ = Eigen::MatrixXd::Zero(n, n);
  c_ = Eigen::VectorXd::Constant(n, noise.epsilon());
  forced_.assign(graph.node_count(), false);
  const double slope = 1.0 - 2.0 * noise.epsilon();
  for (NodeId i = 0; i < n; ++i) {
    if (auto v = forcing.value(i)) {
      c_[i] = *v ? 1.0 : 0.0;
      forced_[i] = true;
      continue;
    }
    auto nb = graph.in_neighbors(i);
    for (NodeId j : nb) g_(i, j) += slope / static_cast<double>(nb.size());
  }
}

PairMoments MomentPropagator::independent(const std::vector<double>& p_one) const {
  if (static_cast<Eigen::Index>(p_one.size()) != c_.size()) throw DimensionError("moment vector length mismatch");
  PairMoments m;
  m.p = Eigen::Map<const Eigen::VectorXd>(p_one.data(), c_.size());
  // Forced nodes are deterministic from t = 0.
  for (Eigen::Index i = 0; i < c_.size(); ++i)
    if (forced_[static_cast<std::size_t>(i)]) m.p[i] = c_[i];
  m.second = m.p * m.p.transpose();
  m.second.diagonal() = m.p;
  return m;
}

PairMoments MomentPropagator::step(const PairMoments& m) const {
  PairMoments out;
  const Eigen::VectorXd gp = g_ * m.p;
  out.p = gp + c_;
  out.second = g_ * m.second * g_.transpose() + gp * c_.transpose() + c_ * gp.transpose() +
               c_ * c_.transpose();
  out.second.diagonal() = out.p;
  return out;
}

PairMoments MomentPropagator::propagate(PairMoments m, std::size_t steps) const {
  for (std::size_t k = 0; k < steps; ++k) m = step(m);
  return m;
}

PairMoments MomentPropagator::stationary(double tol, std::size_t max_iterations) const {
  PairMoments m = independent(std::vector<double>(node_count(), 0.5));
  for (std::size_t k = 0; k < max_iterations; ++k) {
    PairMoments next = step(m);
    const double change = (next.second - m.second).cwiseAbs().maxCoeff();
    m = std::move(next);
    if (change < tol) return m;
  }
  throw NumericFailure("moment iteration did not converge");
}

Eigen::VectorXd MomentPropagator::mean_after(Eigen::VectorXd p, std::size_t steps) const {
  for (std::size_t k = 0; k < steps; ++k) p = g_ * p + c_;
  return p;
}

Eigen::VectorXd MomentPropagator::delayed_cross(const PairMoments& at_t, NodeId i, std::size_t tau) const {
  if (i >= node_count()) throw InvalidArgument("agent index out of range");
  Eigen::VectorXd v = at_t.second.col(i);
  for (std::size_t k = 0; k < tau; ++k) v = g_ * v + c_ * at_t.p[i];
  return v;
}

double MomentPropagator::delayed_mi(const PairMoments& at_t, NodeId i, NodeId j, std::size_t tau) const {
  if (j >= node_count()) throw InvalidArgument("agent index out of range");
  const Eigen::VectorXd cross = delayed_cross(at_t, i, tau);
  const Eigen::VectorXd later = mean_after(at_t.p, tau);
  return binary_pair_mi(at_t.p[i], later[j], cross[j]);
}

double binary_pair_mi(double px, double py, double p11) {
  const double law[4] = {1.0 - px - py + p11, py - p11, px - p11, p11};
  double clamped[4];
  for (int k = 0; k < 4; ++k) clamped[k] = std::max(law[k], 0.0);
  const double mx[2] = {1.0 - px, px};
  const double my[2] = {1.0 - py, py};
  return std::max(entropy_bits(mx) + entropy_bits(my) - entropy_bits(clamped), 0.0);
}

}  // namespace voter
