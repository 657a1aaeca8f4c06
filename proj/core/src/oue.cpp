#include "trajsyn/oue.hpp"

#include <cmath>
#include <string>

namespace trajsyn {

double false_bit_prob(PrivacyParams eps) { return 1.0 / (std::exp(eps.epsilon) + 1.0); }

BitReport encode(std::size_t index, std::size_t size) {
  if (index >= size) {
    throw IndexOutOfDomain("encode: index " + std::to_string(index) + " >= domain size " +
                           std::to_string(size));
  }
  BitReport v(size, 0);
  v[index] = 1;
  return v;
}

BitReport perturb(const BitReport& v, PrivacyParams eps, Rng& rng) {
  if (eps.epsilon <= 0.0) {
    throw Error("perturb: privacy budget must be positive");
  }
  const double q = false_bit_prob(eps);
  BitReport out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = v[i] ? 0.5 : q;
    out[i] = rng.bernoulli(p) ? 1 : 0;
  }
  return out;
}

FrequencyEstimate aggregate(std::span<const BitReport> reports, PrivacyParams eps,
                            std::size_t domain_size) {
  FrequencyEstimate est;
  est.epsilon_used = eps.epsilon;
  est.n = reports.size();
  if (reports.empty()) {
    est.values.assign(domain_size, 0.0);
    return est;
  }
  if (eps.epsilon <= 0.0) {
    throw Error("aggregate: privacy budget must be positive");
  }
  const std::size_t len = reports.front().size();
  std::vector<std::size_t> counts(len, 0);
  for (const BitReport& r : reports) {
    if (r.size() != len) {
      throw MixedLengths("aggregate: reports of length " + std::to_string(r.size()) + " and " +
                         std::to_string(len));
    }
    for (std::size_t i = 0; i < len; ++i) counts[i] += r[i];
  }
  const double q = false_bit_prob(eps);
  const double n = static_cast<double>(est.n);
  est.values.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    est.values[i] = (static_cast<double>(counts[i]) / n - q) / (0.5 - q);
  }
  return est;
}

double oue_variance(PrivacyParams eps, std::size_t n) {
  const double e = std::exp(eps.epsilon);
  return 4.0 * e / (static_cast<double>(n) * (e - 1.0) * (e - 1.0));
}

}  // namespace trajsyn
