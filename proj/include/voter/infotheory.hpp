#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "voter/ensemble.hpp"

namespace voter {

/// Joint counts of (X_i(t), X_j(t + tau)) over the ensemble; nxy counts
/// runs with X_i(t) = x and X_j(t + tau) = y.
struct PairCounts {
  std::uint64_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;

  std::uint64_t total() const { return n00 + n01 + n10 + n11; }
  PairCounts& operator+=(const PairCounts& o);
};

/// Counts of (X_i(t), Y_i(t + tau)) with Y_i the number of other agents
/// voting 1. zero[k] (one[k]) counts runs where X_i(t) = 0 (1) and Y_i = k.
struct AggregateCounts {
  std::vector<std::uint64_t> zero;
  std::vector<std::uint64_t> one;

  explicit AggregateCounts(std::size_t support = 0) : zero(support, 0), one(support, 0) {}
  std::uint64_t total() const;
};

struct DelayedInfoResult {
  double value_bits = 0.0;
  bool deterministic = false;  // a marginal was constant; value forced to 0
  NodeId i = 0;
  std::optional<NodeId> j;     // empty for multi-information
  std::size_t t = 0;
  std::size_t tau = 0;
  std::size_t runs = 0;
};

struct ProfilePoint {
  NodeId j;
  std::size_t tau;
  double value_bits;
};

/// Plug-in mutual information (bits) of a 2 x K contingency table, with
/// 0 log 0 = 0. Rounding noise below zero is clamped.
double plugin_mutual_information(const std::vector<std::uint64_t>& row0,
                                 const std::vector<std::uint64_t>& row1, bool* deterministic = nullptr);
double plugin_mutual_information(const PairCounts& counts, bool* deterministic = nullptr);
double plugin_mutual_information(const AggregateCounts& counts, bool* deterministic = nullptr);

/// Plug-in entropy (bits) of a count vector.
double plugin_entropy(const std::vector<std::uint64_t>& counts);

PairCounts count_pairs(const SampleSet& samples, NodeId i, NodeId j, std::size_t t, std::size_t tau);
AggregateCounts count_aggregate(const SampleSet& samples, NodeId i, std::size_t t, std::size_t tau);

/// w_{i,j}(t, tau) = I(X_i(t); X_j(t + tau)).
DelayedInfoResult delayed_mutual_information(const SampleSet& samples, NodeId i, NodeId j,
                                             std::size_t t, std::size_t tau);

/// w_i(t, tau) = I(X_i(t); sum_{k != i} X_k(t + tau)).
DelayedInfoResult delayed_multi_information(const SampleSet& samples, NodeId i, std::size_t t,
                                            std::size_t tau);

/// w_{i,j}(t, tau) for every j != i at a fixed delay.
std::vector<ProfilePoint> mutual_information_profile(const SampleSet& samples, NodeId i,
                                                     std::size_t t, std::size_t tau);

/// w_{i,j}(t, j - i) for j = i+1 .. last: each agent is read after the delay
/// that matches its distance from i.
std::vector<ProfilePoint> delay_matched_profile(const SampleSet& samples, NodeId i, std::size_t t,
                                                NodeId last);

/// Estimates of pure noise rarely exceed this: the 95% quantile of the
/// plug-in estimate of independent binary variables, chi2_1(0.95) / (2 N ln 2).
double independence_threshold_bits(std::size_t runs);

}  // namespace voter
