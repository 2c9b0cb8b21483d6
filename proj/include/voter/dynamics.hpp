#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voter/graph.hpp"
#include "voter/rng.hpp"

namespace voter {

/// Affine response f(rho) = (1 - 2 eps) rho + eps with noise eps in [0, 1/2].
class NoiseResponse {
 public:
  explicit NoiseResponse(double epsilon);

  double epsilon() const { return epsilon_; }
  double operator()(double rho) const { return (1.0 - 2.0 * epsilon_) * rho + epsilon_; }

 private:
  double epsilon_;
};

/// Fixed-length bit vector, packed 64 agents per word.
class BitState {
 public:
  BitState() = default;
  explicit BitState(std::size_t n, bool value = false);
  static BitState from_string(const std::string& bits);  // "0110"

  std::size_t size() const { return size_; }
  bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (v) words_[i >> 6] |= mask; else words_[i >> 6] &= ~mask;
  }
  std::size_t count() const;
  BitState flipped() const;
  std::string to_string() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  friend bool operator==(const BitState&, const BitState&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Agents whose opinion is clamped for the whole run.
class ForcingPlan {
 public:
  ForcingPlan() = default;
  static ForcingPlan single(NodeId node, bool value = true);
  /// Forces nodes 0, d, 2d, ... below node_count.
  static ForcingPlan spaced(std::size_t node_count, std::size_t spacing, bool value = true);

  void force(NodeId node, bool value) { forced_[node] = value; }
  bool is_forced(NodeId node) const { return forced_.count(node) != 0; }
  std::optional<bool> value(NodeId node) const;
  std::size_t size() const { return forced_.size(); }
  bool empty() const { return forced_.empty(); }
  const std::map<NodeId, bool>& entries() const { return forced_; }

  ForcingPlan flipped() const;
  void apply(BitState& state) const;
  void validate(std::size_t node_count) const;

  friend bool operator==(const ForcingPlan&, const ForcingPlan&) = default;

 private:
  std::map<NodeId, bool> forced_;
};

/// Synchronous update rule for one (graph, response, forcing) triple with the
/// response tabulated at every density a node can observe. The graph must
/// outlive the stepper.
///
/// Every step consumes exactly one 64-bit draw per node, in node-index order,
/// forced nodes included; realizations that differ only in their forcing plan
/// therefore share random numbers.
class Stepper {
 public:
  Stepper(const Graph& graph, const NoiseResponse& response, const ForcingPlan& forcing);
  Stepper(const Graph& graph, const std::function<double(double)>& response,
          const ForcingPlan& forcing);

  std::size_t node_count() const { return graph_->node_count(); }
  const Graph& graph() const { return *graph_; }

  /// Next state of node i given the pre-step state and that node's draw.
  bool next_bit(const BitState& current, NodeId i, std::uint64_t draw) const;

  void advance(const BitState& current, BitState& next, Engine& rng) const;
  void advance_with_draws(const BitState& current, BitState& next,
                          std::span<const std::uint64_t> draws) const;

  /// i.i.d. Bernoulli(1/2) opinions (one draw per node), then forcing.
  BitState random_initial(Engine& rng) const;
  void apply_forcing(BitState& state) const;

 private:
  const Graph* graph_;
  std::vector<std::size_t> table_offset_;
  std::vector<std::uint64_t> thresholds_;
  std::vector<std::int8_t> forced_;  // -1 free, else the clamped bit
};

class StateTrajectory {
 public:
  StateTrajectory(std::size_t node_count, ForcingPlan forcing)
      : node_count_(node_count), forcing_(std::move(forcing)) {}

  std::size_t node_count() const { return node_count_; }
  std::size_t horizon() const { return states_.empty() ? 0 : states_.size() - 1; }
  std::size_t length() const { return states_.size(); }
  const BitState& at(std::size_t t) const;
  const ForcingPlan& forcing() const { return forcing_; }
  void push_back(BitState s) { states_.push_back(std::move(s)); }

 private:
  std::size_t node_count_;
  ForcingPlan forcing_;
  std::vector<BitState> states_;
};

BitState step(const Graph& graph, const BitState& state, const NoiseResponse& noise,
              const ForcingPlan& forcing, Engine& rng);

/// Runs T synchronous steps. Without an explicit initial state the free
/// agents start i.i.d. Bernoulli(1/2). Forcing overwrites states[0] too.
StateTrajectory simulate(const Graph& graph, const std::optional<BitState>& initial,
                         const NoiseResponse& noise, const ForcingPlan& forcing,
                         std::size_t horizon, Engine& rng);

/// Fraction of agents voting 1 at time t; with free_only the forced agents
/// are left out of both numerator and denominator.
double density(const StateTrajectory& trajectory, std::size_t t, bool free_only = false);

// CSV with columns t,s_0,...,s_{n-1}.
void write_trajectory_csv(std::ostream& out, const StateTrajectory& trajectory);
// One row of '0'/'1' characters per time step.
void write_spacetime(std::ostream& out, const StateTrajectory& trajectory);

}  // namespace voter
