#include "voter/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "voter/errors.hpp"
#include "voter/meanfield.hpp"

namespace voter {

SampleSet::SampleSet(std::size_t node_count, std::size_t runs, std::vector<std::size_t> times)
    : node_count_(node_count), runs_(runs), words_((node_count + 63) / 64), times_(std::move(times)) {
  std::sort(times_.begin(), times_.end());
  times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
  data_.assign(times_.size() * runs_ * words_, 0);
}

bool SampleSet::has_time(std::size_t t) const {
  return std::binary_search(times_.begin(), times_.end(), t);
}

std::size_t SampleSet::slot(std::size_t t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t)
    throw InvalidArgument("time " + std::to_string(t) + " was not retained by the ensemble");
  return static_cast<std::size_t>(it - times_.begin());
}

void SampleSet::store(std::size_t run, std::size_t slot, const BitState& s) {
  auto w = s.words();
  std::copy(w.begin(), w.end(), data_.begin() + static_cast<std::ptrdiff_t>(offset(run, slot)));
}

std::size_t SampleSet::bytes_needed(std::size_t node_count, std::size_t runs, std::size_t times) {
  return times * runs * ((node_count + 63) / 64) * sizeof(std::uint64_t);
}

double EnsembleSummary::p_one(NodeId i, std::size_t t) const {
  if (t > horizon || i >= node_count) throw InvalidArgument("marginal index out of range");
  return static_cast<double>(ones(i, t)) / static_cast<double>(runs);
}

std::vector<double> EnsembleSummary::marginals(std::size_t t) const {
  std::vector<double> out(node_count);
  for (NodeId i = 0; i < node_count; ++i) out[i] = p_one(i, t);
  return out;
}

double EnsembleSummary::mean_density(std::size_t t, bool free_only) const {
  if (t > horizon) throw InvalidArgument("time beyond ensemble horizon");
  if (one_counts.empty()) throw InvalidArgument("ensemble did not record marginals");
  std::uint64_t total = 0;
  std::size_t agents = 0;
  for (NodeId i = 0; i < node_count; ++i) {
    if (free_only && forcing.is_forced(i)) continue;
    total += ones(i, t);
    ++agents;
  }
  if (agents == 0) throw InvalidArgument("no free agents to average over");
  return static_cast<double>(total) / (static_cast<double>(agents) * static_cast<double>(runs));
}

std::size_t estimate_memory(const EnsembleSpec& spec) {
  const std::size_t n = spec.graph.node_count();
  const std::size_t workers = std::max(1U, spec.workers);
  std::size_t bytes = SampleSet::bytes_needed(n, spec.runs, spec.retain_times.size());
  if (spec.record_marginals) bytes += (workers + 1) * (spec.horizon + 1) * n * sizeof(std::uint64_t);
  return bytes;
}

namespace {

void simulate_range(const EnsembleSpec& spec, const Stepper& stepper, std::size_t first,
                    std::size_t last, std::vector<std::uint64_t>& counts, SampleSet& samples) {
  const std::size_t n = spec.graph.node_count();
  BitState current(n), next(n);
  auto record = [&](std::size_t run, std::size_t t, const BitState& s) {
    if (spec.record_marginals) {
      std::uint64_t* row = counts.data() + t * n;
      auto words = s.words();
      for (std::size_t k = 0; k < words.size(); ++k) {
        std::uint64_t w = words[k];
        while (w) {
          row[k * 64 + static_cast<std::size_t>(std::countr_zero(w))] += 1;
          w &= w - 1;
        }
      }
    }
    if (samples.has_time(t)) samples.store(run, samples.slot(t), s);
  };

  for (std::size_t run = first; run < last; ++run) {
    Engine rng = make_stream(spec.base_seed + run);
    if (spec.initial) {
      current = *spec.initial;
      stepper.apply_forcing(current);
    } else {
      current = stepper.random_initial(rng);
    }
    record(run, 0, current);
    for (std::size_t t = 1; t <= spec.horizon; ++t) {
      stepper.advance(current, next, rng);
      std::swap(current, next);
      record(run, t, current);
    }
  }
}

}  // namespace

EnsembleResult run_ensemble(const EnsembleSpec& spec) {
  const std::size_t n = spec.graph.node_count();
  if (spec.runs == 0) throw InvalidArgument("ensemble needs at least one run");
  if (n == 0) throw InvalidArgument("ensemble graph is empty");
  if (spec.initial && spec.initial->size() != n)
    throw DimensionError("initial state length does not match graph");
  for (std::size_t t : spec.retain_times)
    if (t > spec.horizon) throw InvalidArgument("retained time beyond horizon");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  const std::size_t need = estimate_memory(spec);
  if (need > spec.memory_budget_bytes)
    throw BudgetExceeded("ensemble needs " + std::to_string(need) + " bytes, budget is " +
                         std::to_string(spec.memory_budget_bytes));

  Stepper stepper(spec.graph, spec.noise, spec.forcing);
  EnsembleResult result;
  result.samples = SampleSet(n, spec.runs, spec.retain_times);

  const std::size_t workers =
      std::min<std::size_t>(std::max(1U, spec.workers), spec.runs);
  const std::size_t cells = spec.record_marginals ? (spec.horizon + 1) * n : 0;
  std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(cells, 0));

  auto bounds = [&](std::size_t w) { return spec.runs * w / workers; };
  if (workers == 1) {
    simulate_range(spec, stepper, 0, spec.runs, partial[0], result.samples);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        simulate_range(spec, stepper, bounds(w), bounds(w + 1), partial[w], result.samples);
      });
    for (auto& th : pool) th.join();
  }

  EnsembleSummary& summary = result.summary;
  summary.node_count = n;
  summary.horizon = spec.horizon;
  summary.runs = spec.runs;
  summary.forcing = spec.forcing;
  summary.alpha = spec.alpha;
  summary.precision_bound = precision(spec.runs, spec.alpha);
  summary.one_counts = std::move(partial[0]);
  for (std::size_t w = 1; w < workers; ++w)
    for (std::size_t k = 0; k < cells; ++k) summary.one_counts[k] += partial[w][k];
  return result;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley step against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double precision(std::size_t runs, double alpha) {
  if (runs == 0) throw InvalidArgument("precision needs at least one sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  return normal_quantile(1.0 - alpha / 2.0) / (2.0 * std::sqrt(static_cast<double>(runs)));
}

BurnIn auto_burn_in(const Graph& graph, const NoiseResponse& noise, const ForcingPlan& forcing) {
  const std::size_t n = graph.node_count();
  const bool controlled = forcing.size() == 1 && forcing.value(0) == std::optional<bool>(true);
  if (is_controlled_line(graph) && controlled) {
    MeanFieldSystem sys(n - 1, noise.epsilon());
    Eigen::VectorXd p0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n - 1), 0.5);
    return {steady_state_time(sys, p0), true};
  }
  return {10 * n, false};
}

}  // namespace voter
