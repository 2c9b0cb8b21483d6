#pragma once

#include <cstddef>

namespace voter {

/// The m-agent relay i -> i+m on the line seen as a binary symmetric channel.
struct ChannelSpec {
  double epsilon;  // per-hop noise in [0, 1/2]
  std::size_t m;   // channel length, m >= 1
};

/// H2(p) in bits with H2(0) = H2(1) = 0.
double binary_entropy(double p);

/// eps_m = (1 - (1 - 2 eps)^m) / 2.
double error_probability(const ChannelSpec& spec);

/// C_m = 1 - H2(eps_m).
double capacity(const ChannelSpec& spec);

}  // namespace voter
