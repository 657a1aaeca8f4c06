#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trajsyn/errors.hpp"
#include "trajsyn/rng.hpp"

namespace trajsyn {

// Budget for a single report.
struct PrivacyParams {
  double epsilon = 1.0;
};

// Fixed-length bit vector, one bit per transition-domain index.
using BitReport = std::vector<std::uint8_t>;

// Raw unbiased frequency estimates. Values can be negative before clipping;
// clipping happens where normalization semantics require non-negativity, not
// here, so the oracle stays unbiased and testable as such.
struct FrequencyEstimate {
  std::vector<double> values;
  std::size_t n = 0;  // number of contributing reports
  double epsilon_used = 0.0;

  bool usable() const { return n > 0; }
};

// Probability of reporting 1 for a 0-bit: q = 1 / (e^eps + 1).
double false_bit_prob(PrivacyParams eps);

// One-hot vector of the given length. Throws IndexOutOfDomain.
BitReport encode(std::size_t index, std::size_t size);

// Unary-encoding perturbation: 1-bits are kept with probability 1/2, 0-bits
// are set with probability q. Deterministic given the generator state.
BitReport perturb(const BitReport& v, PrivacyParams eps, Rng& rng);

// Debiases per-index counts into frequency estimates:
//   f_hat(x) = (count(x)/n - q) / (1/2 - q).
// Empty input yields n = 0 and an all-zero, unusable estimate of
// `domain_size` entries; population division can legitimately sample zero
// users in a tick, so that is not an error. Throws MixedLengths when report
// lengths disagree.
FrequencyEstimate aggregate(std::span<const BitReport> reports, PrivacyParams eps,
                            std::size_t domain_size = 0);

// Estimator variance: 4 e^eps / (n (e^eps - 1)^2).
double oue_variance(PrivacyParams eps, std::size_t n);

}  // namespace trajsyn
