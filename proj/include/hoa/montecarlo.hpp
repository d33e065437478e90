#pragma once

// Idealized photon counting: unit-efficiency detection draws photon numbers
// straight from the distribution. Plug-in factorial moments of the counts
// estimate d(l); a multinomial bootstrap over the histogram gives its
// standard error.
//
// Generator: std::mt19937_64. Uniform variates are (x >> 11) * 2^-53.
// Independent streams derived from one master seed use
//   stream_seed(master, k) = splitmix64(master + (k + 1) * 0x9E3779B97F4A7C15)
// and the bootstrap of an estimate seeded with s runs on stream_seed(s, 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/numerics.hpp"
#include "hoa/states.hpp"

namespace hoa::mc {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL);
}

[[nodiscard]] inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Photon-number counts over n_min .. n_min + counts.size() - 1.
struct Histogram {
  std::size_t n_min = 0;
  std::vector<std::uint64_t> counts;

  [[nodiscard]] std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
  [[nodiscard]] std::uint64_t at(std::size_t n) const {
    if (n < n_min || n >= n_min + counts.size()) return 0;
    return counts[n - n_min];
  }
};

/// Inverse-CDF sampling of n_samples photon numbers. The CDF is normalized by
/// the stored total so truncated distributions never run off the support.
[[nodiscard]] inline Histogram sample_pnd(const PND& pnd, std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DomainError("sample_pnd: n_samples must be >= 1");
  const auto probs = pnd.probs();
  std::vector<double> cdf(probs.size());
  numerics::CompensatedSum<double> acc;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc.value();
  }
  const double total = cdf.back();
  for (double& c : cdf) c /= total;
  cdf.back() = 1.0;

  Histogram h{pnd.n_min(), std::vector<std::uint64_t>(probs.size(), 0)};
  std::mt19937_64 rng(seed);
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const double u = uniform01(rng);
    // first index with cdf > u; zero-probability bins are never selected
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    ++h.counts[idx];
  }
  return h;
}

struct MCEstimate {
  std::uint32_t l = 1;
  double d_hat = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::uint32_t bootstrap_resamples = 200;
  bool degenerate = false;  // every sample had the same photon number
};

inline constexpr std::uint32_t kDefaultResamples = 200;

namespace detail {
/// Plug-in d(l) = m_(l+1) - m_1^(l+1) from integer counts.
inline double plugin_d(std::size_t n_min, const std::vector<std::uint64_t>& counts, std::uint64_t total,
                       std::uint32_t l) {
  numerics::CompensatedSum<double> m1, mlp1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    const double n = static_cast<double>(n_min + i);
    const double c = static_cast<double>(counts[i]);
    m1 += c * n;
    mlp1 += c * numerics::falling_factorial(n, l + 1);
  }
  const double t = static_cast<double>(total);
  return mlp1.value() / t - std::pow(m1.value() / t, static_cast<double>(l) + 1.0);
}
}  // namespace detail

/// Plug-in estimate of d(l) with a nonparametric bootstrap standard error.
/// Each bootstrap replicate redraws the histogram from Multinomial(n, counts/n)
/// through sequential conditional binomial draws.
[[nodiscard]] inline MCEstimate estimate_d(const Histogram& h, std::uint32_t l,
                                           std::uint32_t bootstrap_resamples = kDefaultResamples,
                                           std::uint64_t seed = 0) {
  if (l < 1) throw ConstraintError("estimate_d: l must be >= 1");
  if (bootstrap_resamples < 1) throw DomainError("estimate_d: bootstrap_resamples must be >= 1");
  const std::uint64_t total = h.total();
  if (total == 0) throw DomainError("estimate_d: empty histogram");

  MCEstimate est;
  est.l = l;
  est.n_samples = total;
  est.seed = seed;
  est.bootstrap_resamples = bootstrap_resamples;
  est.d_hat = detail::plugin_d(h.n_min, h.counts, total, l);
  est.degenerate = std::count_if(h.counts.begin(), h.counts.end(), [](auto c) { return c > 0; }) <= 1;
  if (est.degenerate) {
    est.std_error = 0.0;
    return est;
  }

  std::mt19937_64 rng(stream_seed(seed, 0));
  std::vector<std::uint64_t> resampled(h.counts.size());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint32_t b = 0; b < bootstrap_resamples; ++b) {
    std::uint64_t remaining = total;
    std::uint64_t remaining_weight = total;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
      if (remaining == 0 || h.counts[i] == 0) {
        resampled[i] = 0;
        continue;
      }
      if (h.counts[i] == remaining_weight) {
        resampled[i] = remaining;
      } else {
        const double p = static_cast<double>(h.counts[i]) / static_cast<double>(remaining_weight);
        std::binomial_distribution<std::uint64_t> draw(remaining, p);
        resampled[i] = draw(rng);
      }
      remaining -= resampled[i];
      remaining_weight -= h.counts[i];
    }
    const double d = detail::plugin_d(h.n_min, resampled, total, l);
    // Welford
    const double delta = d - mean;
    mean += delta / static_cast<double>(b + 1);
    m2 += delta * (d - mean);
  }
  est.std_error = bootstrap_resamples > 1 ? std::sqrt(m2 / static_cast<double>(bootstrap_resamples - 1)) : 0.0;
  return est;
}

}  // namespace hoa::mc
