#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voter/dynamics.hpp"
#include "voter/graph.hpp"

namespace voter {

struct EnsembleSpec {
  Graph graph;
  NoiseResponse noise{0.0};
  ForcingPlan forcing;
  std::size_t runs = 1;
  std::size_t horizon = 0;
  std::uint64_t base_seed = 0;
  std::optional<BitState> initial;          // nullopt: i.i.d. Bernoulli(1/2)
  std::vector<std::size_t> retain_times;    // slices kept for the estimators
  bool record_marginals = true;             // per-node, per-time one-counts
  double alpha = 0.05;                      // risk level of the reported precision
  unsigned workers = 1;
  std::size_t memory_budget_bytes = std::size_t{2} << 30;
};

/// Raw states of every run at a few retained times, bit-packed.
class SampleSet {
 public:
  SampleSet() = default;
  SampleSet(std::size_t node_count, std::size_t runs, std::vector<std::size_t> times);

  std::size_t node_count() const { return node_count_; }
  std::size_t runs() const { return runs_; }
  const std::vector<std::size_t>& times() const { return times_; }
  bool has_time(std::size_t t) const;
  /// Throws InvalidArgument when t was not retained.
  std::size_t slot(std::size_t t) const;

  bool bit(std::size_t run, std::size_t slot, NodeId i) const {
    return (data_[offset(run, slot) + (i >> 6)] >> (i & 63)) & 1U;
  }
  std::span<const std::uint64_t> row(std::size_t run, std::size_t slot) const {
    return {data_.data() + offset(run, slot), words_};
  }
  void store(std::size_t run, std::size_t slot, const BitState& s);

  static std::size_t bytes_needed(std::size_t node_count, std::size_t runs, std::size_t times);

 private:
  std::size_t offset(std::size_t run, std::size_t slot) const {
    return (slot * runs_ + run) * words_;
  }

  std::size_t node_count_ = 0;
  std::size_t runs_ = 0;
  std::size_t words_ = 0;
  std::vector<std::size_t> times_;
  std::vector<std::uint64_t> data_;
};

struct EnsembleSummary {
  std::size_t node_count = 0;
  std::size_t horizon = 0;
  std::size_t runs = 0;
  ForcingPlan forcing;
  std::vector<std::uint64_t> one_counts;  // (horizon + 1) x node_count, time-major
  double alpha = 0.05;
  double precision_bound = 0.0;           // t_{1-alpha/2} / (2 sqrt(N))

  std::uint64_t ones(NodeId i, std::size_t t) const { return one_counts[t * node_count + i]; }
  double p_one(NodeId i, std::size_t t) const;
  std::vector<double> marginals(std::size_t t) const;
  double mean_density(std::size_t t, bool free_only = false) const;
};

struct EnsembleResult {
  EnsembleSummary summary;
  SampleSet samples;
};

/// Runs spec.runs independent realizations with seeds base_seed + r.
/// Results are bit-identical for any worker count. Throws BudgetExceeded
/// instead of shrinking the ensemble when the memory estimate is too large.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

std::size_t estimate_memory(const EnsembleSpec& spec);

/// Inverse of the standard normal CDF (Acklam's rational approximation with
/// one Halley refinement step).
double normal_quantile(double p);

/// Worst-case (p = 1/2) half-width of the alpha-level confidence interval of
/// an estimated probability from N samples.
double precision(std::size_t runs, double alpha);

/// Burn-in before measuring in a steady state: the mean-field steady-state
/// time for the controlled line forced to 1 at node 0, otherwise 10 n.
struct BurnIn {
  std::size_t steps;
  bool from_mean_field;
};
BurnIn auto_burn_in(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing);

}  // namespace voter
