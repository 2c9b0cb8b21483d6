#include "voter/channel.hpp"

#include <cmath>

#include "voter/errors.hpp"

namespace voter {

namespace {

void validate(const ChannelSpec& spec) {
  if (!(spec.epsilon >= 0.0 && spec.epsilon <= 0.5)) throw DomainError("noise must lie in [0, 1/2]");
  if (spec.m == 0) throw InvalidArgument("channel length must be at least 1");
}

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double error_probability(const ChannelSpec& spec) {
  validate(spec);
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * spec.epsilon, static_cast<double>(spec.m)));
}

double capacity(const ChannelSpec& spec) {
  return 1.0 - binary_entropy(error_probability(spec));
}

}  // namespace voter
