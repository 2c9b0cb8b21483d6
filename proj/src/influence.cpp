#include "voter/influence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "voter/ensemble.hpp"
#include "voter/errors.hpp"
#include "voter/meanfield.hpp"

namespace voter {

namespace {

EnsembleSpec base_spec(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing,
                       const EnsembleOptions& options) {
  EnsembleSpec spec;
  spec.graph = graph;
  spec.noise = noise;
  spec.forcing = forcing;
  spec.runs = options.runs;
  spec.base_seed = options.seed;
  spec.alpha = options.alpha;
  spec.workers = options.workers;
  return spec;
}

std::size_t burn_in_for(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing,
                        const EnsembleOptions& options) {
  return options.burn_in ? *options.burn_in : auto_burn_in(graph, noise, forcing).steps;
}

}  // namespace

InfluenceScore influence_by_forcing(const Graph& graph, const NoiseResponse& noise, NodeId agent,
                                    InfluenceMode mode, std::size_t t_measure,
                                    const EnsembleOptions& options, bool forced_value) {
  if (agent >= graph.node_count()) throw InvalidArgument("agent index out of range");
  const ForcingPlan forcing = ForcingPlan::single(agent, forced_value);
  EnsembleSpec spec = base_spec(graph, noise, forcing, options);
  spec.horizon = t_measure;
  if (mode == InfluenceMode::Steady) spec.horizon += burn_in_for(graph, noise, forcing, options);
  const EnsembleResult r = run_ensemble(spec);
  InfluenceScore s;
  s.agent = agent;
  s.forced_value = forced_value;
  s.mean_density = r.summary.mean_density(spec.horizon, true);
  s.runs = options.runs;
  s.t_measure = spec.horizon;
  return s;
}

std::vector<double> influence_scores(const Graph& graph, const NoiseResponse& noise, InfluenceMode mode,
                                     std::size_t t_measure, const EnsembleOptions& options) {
  EnsembleSpec spec = base_spec(graph, noise, ForcingPlan{}, options);
  spec.horizon = t_measure;
  if (mode == InfluenceMode::Steady) spec.horizon += burn_in_for(graph, noise, ForcingPlan{}, options);
  const double baseline = run_ensemble(spec).summary.mean_density(spec.horizon);
  std::vector<double> scores(graph.node_count());
  for (NodeId i = 0; i < graph.node_count(); ++i)
    scores[i] = influence_by_forcing(graph, noise, i, mode, t_measure, options).mean_density - baseline;
  return scores;
}

std::vector<double> multi_information_scores(const Graph& graph, const NoiseResponse& noise,
                                             InfluenceMode mode, std::size_t t, std::size_t tau,
                                             const EnsembleOptions& options) {
  EnsembleSpec spec = base_spec(graph, noise, ForcingPlan{}, options);
  std::size_t start = t;
  if (mode == InfluenceMode::Steady) start += burn_in_for(graph, noise, ForcingPlan{}, options);
  spec.horizon = start + tau;
  spec.retain_times = {start, start + tau};
  spec.record_marginals = false;
  const EnsembleResult r = run_ensemble(spec);
  std::vector<double> scores(graph.node_count());
  for (NodeId i = 0; i < graph.node_count(); ++i)
    scores[i] = delayed_multi_information(r.samples, i, start, tau).value_bits;
  return scores;
}

std::vector<NodeId> rank_agents(const std::vector<double>& values) {
  std::vector<NodeId> order(values.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId a, NodeId b) { return values[a] > values[b]; });
  return order;
}

LinearFit linear_regression(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("regression inputs differ in length");
  if (x.size() < 2) throw InsufficientData("regression needs at least 2 points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw InsufficientData("regression abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.correlation = syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
  f.low_confidence = x.size() < 3;
  return f;
}

DecayFit fit_exponential_decay(const std::vector<ProfilePoint>& profile, NodeId agent, double min_value) {
  std::vector<double> x, y;
  DecayFit fit;
  fit.agent = agent;
  for (const auto& p : profile) {
    if (p.j <= agent) continue;
    if (!(p.value_bits > min_value) || !(p.value_bits > 0.0)) {
      ++fit.points_excluded;
      continue;
    }
    x.push_back(static_cast<double>(p.j - agent));
    y.push_back(std::log(p.value_bits));
  }
  if (x.size() < 3) throw InsufficientData("decay fit needs at least 3 positive points");
  const LinearFit lf = linear_regression(x, y);
  fit.points_used = x.size();
  fit.alpha = std::exp(lf.intercept);
  fit.lambda = lf.slope == 0.0 ? 0.0 : -lf.slope;
  fit.correlation = lf.correlation;
  fit.decaying = lf.slope < 0.0;
  return fit;
}

std::vector<ProfilePoint> above_floor_prefix(const std::vector<ProfilePoint>& profile, double floor) {
  std::vector<ProfilePoint> out;
  for (const auto& p : profile) {
    if (!(p.value_bits > floor)) break;
    out.push_back(p);
  }
  return out;
}

DecayMeasurement measure_decay_rate(std::size_t n, double epsilon, NodeId agent,
                                    const EnsembleOptions& options) {
  if (agent == 0 || agent >= n) throw InvalidArgument("agent must lie in 1..n-1");
  const LimitValue lc = control_length(epsilon);
  const Graph graph = make_line(n);
  const NoiseResponse noise(epsilon);
  const ForcingPlan forcing = ForcingPlan::single(0, true);

  DecayMeasurement m;
  m.epsilon = epsilon;
  m.t = burn_in_for(graph, noise, forcing, options);
  const double reach = std::isfinite(lc.value) ? std::floor(3.0 * lc.value) : static_cast<double>(n);
  m.last = static_cast<NodeId>(std::min<double>(static_cast<double>(n), agent + reach));
  if (m.last <= agent) throw InsufficientData("fit window is empty");

  EnsembleSpec spec = base_spec(graph, noise, forcing, options);
  spec.horizon = m.t + (m.last - agent);
  for (std::size_t t = m.t; t <= spec.horizon; ++t) spec.retain_times.push_back(t);
  spec.record_marginals = false;
  const EnsembleResult r = run_ensemble(spec);

  m.profile = delay_matched_profile(r.samples, agent, m.t, m.last);
  m.noise_floor = independence_threshold_bits(options.runs);
  const auto usable = above_floor_prefix(m.profile, m.noise_floor);
  m.fitted_points = usable.size();
  m.fit = fit_exponential_decay(usable, agent, m.noise_floor);
  m.fit.points_excluded = m.profile.size() - usable.size();
  return m;
}

LinearFit regress_lambda(const std::vector<LambdaPoint>& points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.inverse_control_length);
    y.push_back(p.lambda);
  }
  return linear_regression(x, y);
}

LambdaStudy lambda_vs_control_length(std::size_t n, const std::vector<double>& epsilons,
                                     const EnsembleOptions& options) {
  LambdaStudy study;
  for (double eps : epsilons) {
    study.measurements.push_back(measure_decay_rate(n, eps, 1, options));
    study.points.push_back({eps, 1.0 / control_length(eps).value, study.measurements.back().fit.lambda});
  }
  study.fit = regress_lambda(study.points);
  return study;
}

std::size_t spacing_from_lambda(double lambda) {
  if (!(lambda > 0.0)) throw DomainError("decay rate must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(1.0 / lambda)));
}

SpacedForcingResult spaced_forcing_experiment(std::size_t n, double epsilon, std::size_t spacing,
                                              std::size_t horizon, const EnsembleOptions& options) {
  if (spacing == 0) throw InvalidArgument("spacing must be at least 1");
  const Graph graph = make_line(n);
  const NoiseResponse noise(epsilon);
  if (horizon == 0) {
    const MeanFieldSystem mf(n, epsilon);
    horizon = 2 * steady_state_time(mf, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 0.5));
    horizon = std::max<std::size_t>(horizon, 2);
  }
  const ForcingPlan single = ForcingPlan::single(0, true);
  const ForcingPlan spaced = ForcingPlan::spaced(n + 1, spacing, true);

  SpacedForcingResult res;
  res.spacing = spacing;
  res.controlled_agents = spaced.size() - 1;
  res.horizon = horizon;

  auto curves = [&](const ForcingPlan& plan, std::vector<double>& all, std::vector<double>* free) {
    EnsembleSpec spec = base_spec(graph, noise, plan, options);
    spec.horizon = horizon;
    const EnsembleSummary s = run_ensemble(spec).summary;
    const std::size_t free_count = n - (plan.size() - 1);
    for (std::size_t t = 0; t <= horizon; ++t) {
      std::uint64_t ones = 0, free_ones = 0;
      for (NodeId i = 1; i <= n; ++i) {
        ones += s.ones(i, t);
        if (!plan.is_forced(i)) free_ones += s.ones(i, t);
      }
      const double runs = static_cast<double>(s.runs);
      all.push_back(static_cast<double>(ones) / (static_cast<double>(n) * runs));
      if (free && free_count > 0)
        free->push_back(static_cast<double>(free_ones) / (static_cast<double>(free_count) * runs));
    }
  };
  curves(single, res.single_density, nullptr);
  curves(spaced, res.spaced_density, &res.spaced_free_density);

  auto tail_mean = [&](const std::vector<double>& v) {
    const std::size_t from = horizon / 2;
    double sum = 0.0;
    for (std::size_t t = from; t <= horizon; ++t) sum += v[t];
    return sum / static_cast<double>(horizon - from + 1);
  };
  res.single_steady = tail_mean(res.single_density);
  res.spaced_steady = tail_mean(res.spaced_density);
  if (!res.spaced_free_density.empty()) res.spaced_free_steady = tail_mean(res.spaced_free_density);
  return res;
}

}  // namespace voter
