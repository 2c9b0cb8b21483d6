#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "voter/dynamics.hpp"
#include "voter/graph.hpp"
#include "voter/infotheory.hpp"

namespace voter {

enum class InfluenceMode { Steady, Transient };

struct EnsembleOptions {
  std::size_t runs = 10'000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  unsigned workers = 1;
  std::optional<std::size_t> burn_in;  // steady mode; nullopt: auto_burn_in
};

/// Free-agent density <rho(t)>_i with agent i forced.
struct InfluenceScore {
  NodeId agent = 0;
  bool forced_value = true;
  double mean_density = 0.0;
  std::size_t runs = 0;
  std::size_t t_measure = 0;
};

/// Transient mode starts from i.i.d. Bernoulli(1/2) opinions and measures at
/// t_measure; steady mode measures t_measure steps after the burn-in.
/// Realizations share seeds across agents, so scores of different agents are
/// driven by common random numbers.
InfluenceScore influence_by_forcing(const Graph& graph, const NoiseResponse& noise, NodeId agent,
                                    InfluenceMode mode, std::size_t t_measure,
                                    const EnsembleOptions& options, bool forced_value = true);

/// Scores for every agent minus the unforced baseline density.
std::vector<double> influence_scores(const Graph& graph, const NoiseResponse& noise, InfluenceMode mode,
                                     std::size_t t_measure, const EnsembleOptions& options);

/// w_i(t, tau) for every agent of the unforced system; t counts from the
/// burn-in in steady mode.
std::vector<double> multi_information_scores(const Graph& graph, const NoiseResponse& noise,
                                             InfluenceMode mode, std::size_t t, std::size_t tau,
                                             const EnsembleOptions& options);

/// Agents by descending value; ties by ascending index.
std::vector<NodeId> rank_agents(const std::vector<double>& values);

/// w ~ alpha exp(-lambda (j - i)) fitted by least squares on ln w.
struct DecayFit {
  NodeId agent = 0;
  double alpha = 0.0;
  double lambda = 0.0;
  double correlation = 0.0;  // Pearson r of ln w against j - i
  std::size_t points_used = 0;
  std::size_t points_excluded = 0;  // values at or below the floor
  bool decaying = false;
};

/// Points with value <= min_value are dropped and counted. Throws
/// InsufficientData when fewer than 3 remain.
DecayFit fit_exponential_decay(const std::vector<ProfilePoint>& profile, NodeId agent,
                               double min_value = 0.0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;
  bool low_confidence = false;  // fewer than 3 points
};

LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y);

/// Leading run of a profile (ordered by j) whose values stay above floor; the
/// first value at or below it ends the run.
std::vector<ProfilePoint> above_floor_prefix(const std::vector<ProfilePoint>& profile, double floor);

/// Delay-matched profile of agent i on the controlled line of n free agents
/// in the stationary regime, fitted over j in (i, i + 3 l_c] capped at n.
/// The fit stops where the profile first drops to the independence threshold
/// of the ensemble size.
struct DecayMeasurement {
  double epsilon = 0.0;
  std::size_t t = 0;           // measurement start (burn-in)
  NodeId last = 0;             // last agent in the window
  double noise_floor = 0.0;
  std::vector<ProfilePoint> profile;  // the whole window
  std::size_t fitted_points = 0;      // leading points above the floor
  DecayFit fit;
};

DecayMeasurement measure_decay_rate(std::size_t n, double epsilon, NodeId agent,
                                    const EnsembleOptions& options);

struct LambdaPoint {
  double epsilon;
  double inverse_control_length;
  double lambda;
};

/// lambda = slope * (1 / l_c) + intercept.
LinearFit regress_lambda(const std::vector<LambdaPoint>& points);

struct LambdaStudy {
  std::vector<DecayMeasurement> measurements;
  std::vector<LambdaPoint> points;
  LinearFit fit;
};

/// lambda_1 for each noise level via measure_decay_rate, then regress_lambda.
LambdaStudy lambda_vs_control_length(std::size_t n, const std::vector<double>& epsilons,
                                     const EnsembleOptions& options);

/// Controlled line of n free agents: agent 0 forced alone versus agents
/// 0, d, 2d, ... forced. Densities are over agents 1..n.
struct SpacedForcingResult {
  std::size_t spacing = 1;
  std::size_t controlled_agents = 0;  // forced agents among 1..n
  std::size_t horizon = 0;
  std::vector<double> single_density;
  std::vector<double> spaced_density;       // forced agents included
  std::vector<double> spaced_free_density;  // empty when every agent is forced
  double single_steady = 0.0;               // averages over the second half of the horizon
  double spaced_steady = 0.0;
  std::optional<double> spaced_free_steady;
};

/// A spacing beyond n forces agent 0 only. horizon 0 selects twice the
/// mean-field steady-state time of single-agent forcing.
SpacedForcingResult spaced_forcing_experiment(std::size_t n, double epsilon, std::size_t spacing,
                                              std::size_t horizon, const EnsembleOptions& options);

/// max(1, floor(1 / lambda)).
std::size_t spacing_from_lambda(double lambda);

}  // namespace voter
