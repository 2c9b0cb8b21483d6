#include "voter/dynamics.hpp"

#include <bit>
#include <ostream>

#include "voter/errors.hpp"

namespace voter {

NoiseResponse::NoiseResponse(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw DomainError("noise must lie in [0, 1/2]");
}

BitState::BitState(std::size_t n, bool value)
    : size_(n), words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  if (value && (n & 63)) words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
}

BitState BitState::from_string(const std::string& bits) {
  BitState s(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw InvalidArgument("bit string may only hold 0/1");
    s.set(i, bits[i] == '1');
  }
  return s;
}

std::size_t BitState::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

BitState BitState::flipped() const {
  BitState out(size_, true);
  for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] &= ~words_[k];
  return out;
}

std::string BitState::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

ForcingPlan ForcingPlan::single(NodeId node, bool value) {
  ForcingPlan p;
  p.force(node, value);
  return p;
}

ForcingPlan ForcingPlan::spaced(std::size_t node_count, std::size_t spacing, bool value) {
  if (spacing == 0) throw InvalidArgument("forcing spacing must be at least 1");
  ForcingPlan p;
  for (std::size_t i = 0; i < node_count; i += spacing) p.force(static_cast<NodeId>(i), value);
  return p;
}

std::optional<bool> ForcingPlan::value(NodeId node) const {
  auto it = forced_.find(node);
  if (it == forced_.end()) return std::nullopt;
  return it->second;
}

ForcingPlan ForcingPlan::flipped() const {
  ForcingPlan p;
  for (auto [node, v] : forced_) p.force(node, !v);
  return p;
}

void ForcingPlan::apply(BitState& state) const {
  for (auto [node, v] : forced_) state.set(node, v);
}

void ForcingPlan::validate(std::size_t node_count) const {
  if (!forced_.empty() && forced_.rbegin()->first >= node_count)
    throw InvalidArgument("forced node index out of range");
}

Stepper::Stepper(const Graph& graph, const NoiseResponse& response, const ForcingPlan& forcing)
    : Stepper(graph, std::function<double(double)>(response), forcing) {}

Stepper::Stepper(const Graph& graph, const std::function<double(double)>& response,
                 const ForcingPlan& forcing)
    : graph_(&graph) {
  const std::size_t n = graph.node_count();
  forcing.validate(n);
  table_offset_.reserve(n);
  forced_.assign(n, -1);
  for (NodeId i = 0; i < n; ++i) {
    table_offset_.push_back(thresholds_.size());
    const std::size_t k = graph.in_degree(i);
    for (std::size_t c = 0; c <= k; ++c)
      thresholds_.push_back(probability_threshold(response(static_cast<double>(c) / k)));
  }
  for (auto [node, v] : forcing.entries()) forced_[node] = v ? 1 : 0;
}

bool Stepper::next_bit(const BitState& current, NodeId i, std::uint64_t draw) const {
  if (forced_[i] >= 0) return forced_[i] == 1;
  std::size_t ones = 0;
  for (NodeId j : graph_->in_neighbors(i)) ones += current[j];
  return bernoulli_from_word(draw, thresholds_[table_offset_[i] + ones]);
}

void Stepper::advance(const BitState& current, BitState& next, Engine& rng) const {
  const std::size_t n = node_count();
  if (current.size() != n) throw DimensionError("state length does not match graph");
  if (next.size() != n) next = BitState(n);
  auto out = next.words();
  std::fill(out.begin(), out.end(), 0);
  for (NodeId i = 0; i < n; ++i) {
    const std::uint64_t draw = rng();
    if (next_bit(current, i, draw)) out[i >> 6] |= std::uint64_t{1} << (i & 63);
  }
}

void Stepper::advance_with_draws(const BitState& current, BitState& next,
                                 std::span<const std::uint64_t> draws) const {
  const std::size_t n = node_count();
  if (current.size() != n || draws.size() != n)
    throw DimensionError("state or draw count does not match graph");
  if (next.size() != n) next = BitState(n);
  for (NodeId i = 0; i < n; ++i) next.set(i, next_bit(current, i, draws[i]));
}

BitState Stepper::random_initial(Engine& rng) const {
  BitState s(node_count());
  for (NodeId i = 0; i < node_count(); ++i) s.set(i, (rng() >> 63) != 0);
  apply_forcing(s);
  return s;
}

void Stepper::apply_forcing(BitState& state) const {
  for (NodeId i = 0; i < node_count(); ++i)
    if (forced_[i] >= 0) state.set(i, forced_[i] == 1);
}

const BitState& StateTrajectory::at(std::size_t t) const {
  if (t >= states_.size()) throw InvalidArgument("time index beyond trajectory horizon");
  return states_[t];
}

BitState step(const Graph& graph, const BitState& state, const NoiseResponse& noise,
              const ForcingPlan& forcing, Engine& rng) {
  if (state.size() != graph.node_count()) throw DimensionError("state length does not match graph");
  Stepper stepper(graph, noise, forcing);
  BitState next(state.size());
  stepper.advance(state, next, rng);
  return next;
}

StateTrajectory simulate(const Graph& graph, const std::optional<BitState>& initial,
                         const NoiseResponse& noise, const ForcingPlan& forcing,
                         std::size_t horizon, Engine& rng) {
  Stepper stepper(graph, noise, forcing);
  StateTrajectory traj(graph.node_count(), forcing);
  BitState current;
  if (initial) {
    if (initial->size() != graph.node_count())
      throw DimensionError("initial state length does not match graph");
    current = *initial;
    stepper.apply_forcing(current);
  } else {
    current = stepper.random_initial(rng);
  }
  traj.push_back(current);
  BitState next(graph.node_count());
  for (std::size_t t = 0; t < horizon; ++t) {
    stepper.advance(current, next, rng);
    traj.push_back(next);
    std::swap(current, next);
  }
  return traj;
}

double density(const StateTrajectory& trajectory, std::size_t t, bool free_only) {
  const BitState& s = trajectory.at(t);
  if (!free_only) return static_cast<double>(s.count()) / static_cast<double>(s.size());
  const auto& forced = trajectory.forcing();
  std::size_t ones = 0, free = 0;
  for (NodeId i = 0; i < s.size(); ++i) {
    if (forced.is_forced(i)) continue;
    ++free;
    ones += s[i];
  }
  if (free == 0) throw InvalidArgument("no free agents to average over");
  return static_cast<double>(ones) / static_cast<double>(free);
}

void write_trajectory_csv(std::ostream& out, const StateTrajectory& trajectory) {
  out << 't';
  for (std::size_t i = 0; i < trajectory.node_count(); ++i) out << ",s_" << i;
  out << '\n';
  for (std::size_t t = 0; t < trajectory.length(); ++t) {
    out << t;
    const BitState& s = trajectory.at(t);
    for (std::size_t i = 0; i < s.size(); ++i) out << ',' << (s[i] ? '1' : '0');
    out << '\n';
  }
}

void write_spacetime(std::ostream& out, const StateTrajectory& trajectory) {
  for (std::size_t t = 0; t < trajectory.length(); ++t) out << trajectory.at(t).to_string() << '\n';
}

}  // namespace voter
