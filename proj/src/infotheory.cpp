#include "voter/infotheory.hpp"

#include <bit>
#include <cmath>

#include "voter/errors.hpp"

namespace voter {

PairCounts& PairCounts::operator+=(const PairCounts& o) {
  n00 += o.n00;
  n01 += o.n01;
  n10 += o.n10;
  n11 += o.n11;
  return *this;
}

std::uint64_t AggregateCounts::total() const {
  std::uint64_t s = 0;
  for (auto v : zero) s += v;
  for (auto v : one) s += v;
  return s;
}

double plugin_entropy(const std::vector<std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

double plugin_mutual_information(const std::vector<std::uint64_t>& row0,
                                 const std::vector<std::uint64_t>& row1, bool* deterministic) {
  if (row0.size() != row1.size()) throw DimensionError("contingency rows differ in length");
  std::uint64_t r0 = 0, r1 = 0;
  std::vector<std::uint64_t> col(row0.size(), 0);
  for (std::size_t k = 0; k < row0.size(); ++k) {
    r0 += row0[k];
    r1 += row1[k];
    col[k] = row0[k] + row1[k];
  }
  const std::uint64_t total = r0 + r1;
  if (total == 0) throw InsufficientData("no samples to estimate mutual information");
  std::size_t occupied = 0;
  for (auto c : col) occupied += c != 0;
  const bool degenerate = r0 == 0 || r1 == 0 || occupied <= 1;
  if (deterministic) *deterministic = degenerate;
  if (degenerate) return 0.0;

  // sum_xy p_xy log2(p_xy / (p_x p_y)) = sum_xy (n_xy / N) log2(n_xy N / (n_x n_y))
  const double n = static_cast<double>(total);
  double mi = 0.0;
  auto term = [&](std::uint64_t nxy, std::uint64_t nx, std::uint64_t ny) {
    if (nxy == 0) return;
    const double v = static_cast<double>(nxy);
    mi += (v / n) * std::log2(v * n / (static_cast<double>(nx) * static_cast<double>(ny)));
  };
  for (std::size_t k = 0; k < col.size(); ++k) {
    term(row0[k], r0, col[k]);
    term(row1[k], r1, col[k]);
  }
  return mi < 0.0 ? 0.0 : mi;
}

double plugin_mutual_information(const PairCounts& c, bool* deterministic) {
  return plugin_mutual_information({c.n00, c.n01}, {c.n10, c.n11}, deterministic);
}

double plugin_mutual_information(const AggregateCounts& c, bool* deterministic) {
  return plugin_mutual_information(c.zero, c.one, deterministic);
}

namespace {

void check_cell(const SampleSet& samples, NodeId i, std::size_t t, std::size_t tau) {
  if (i >= samples.node_count()) throw InvalidArgument("agent index out of range");
  if (samples.runs() == 0) throw InsufficientData("empty sample set");
  samples.slot(t);
  samples.slot(t + tau);
}

}  // namespace

PairCounts count_pairs(const SampleSet& samples, NodeId i, NodeId j, std::size_t t, std::size_t tau) {
  check_cell(samples, i, t, tau);
  if (j >= samples.node_count()) throw InvalidArgument("agent index out of range");
  const std::size_t a = samples.slot(t), b = samples.slot(t + tau);
  PairCounts c;
  for (std::size_t r = 0; r < samples.runs(); ++r) {
    const bool x = samples.bit(r, a, i);
    const bool y = samples.bit(r, b, j);
    if (x) (y ? c.n11 : c.n10) += 1;
    else (y ? c.n01 : c.n00) += 1;
  }
  return c;
}

AggregateCounts count_aggregate(const SampleSet& samples, NodeId i, std::size_t t, std::size_t tau) {
  check_cell(samples, i, t, tau);
  const std::size_t a = samples.slot(t), b = samples.slot(t + tau);
  const std::size_t n = samples.node_count();
  // Y ranges over 0 .. n-1 (agent i excluded).
  AggregateCounts c(n);
  for (std::size_t r = 0; r < samples.runs(); ++r) {
    std::size_t ones = 0;
    for (auto w : samples.row(r, b)) ones += static_cast<std::size_t>(std::popcount(w));
    const bool yi = samples.bit(r, b, i);
    const std::size_t y = ones - (yi ? 1 : 0);
    if (samples.bit(r, a, i)) c.one[y] += 1; else c.zero[y] += 1;
  }
  return c;
}

DelayedInfoResult delayed_mutual_information(const SampleSet& samples, NodeId i, NodeId j,
                                             std::size_t t, std::size_t tau) {
  DelayedInfoResult res;
  res.value_bits = plugin_mutual_information(count_pairs(samples, i, j, t, tau), &res.deterministic);
  res.i = i;
  res.j = j;
  res.t = t;
  res.tau = tau;
  res.runs = samples.runs();
  return res;
}

DelayedInfoResult delayed_multi_information(const SampleSet& samples, NodeId i, std::size_t t,
                                            std::size_t tau) {
  DelayedInfoResult res;
  res.value_bits = plugin_mutual_information(count_aggregate(samples, i, t, tau), &res.deterministic);
  res.i = i;
  res.t = t;
  res.tau = tau;
  res.runs = samples.runs();
  return res;
}

std::vector<ProfilePoint> mutual_information_profile(const SampleSet& samples, NodeId i,
                                                     std::size_t t, std::size_t tau) {
  std::vector<ProfilePoint> out;
  for (NodeId j = 0; j < samples.node_count(); ++j) {
    if (j == i) continue;
    out.push_back({j, tau, delayed_mutual_information(samples, i, j, t, tau).value_bits});
  }
  return out;
}

std::vector<ProfilePoint> delay_matched_profile(const SampleSet& samples, NodeId i, std::size_t t,
                                                NodeId last) {
  if (last >= samples.node_count()) throw InvalidArgument("agent index out of range");
  std::vector<ProfilePoint> out;
  for (NodeId j = i + 1; j <= last; ++j) {
    const std::size_t tau = j - i;
    out.push_back({j, tau, delayed_mutual_information(samples, i, j, t, tau).value_bits});
  }
  return out;
}

double independence_threshold_bits(std::size_t runs) {
  if (runs == 0) throw InvalidArgument("threshold needs at least one sample");
  constexpr double chi2_1_95 = 3.841458820694124;
  return chi2_1_95 / (2.0 * static_cast<double>(runs) * std::log(2.0));
}

}  // namespace voter
