#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/numerics.hpp"
#include "hoa/states.hpp"

namespace hoa {

/// Normal-ordered factorial moments <N^(l)> = <a^dag^l a^l> and
/// antinormal-ordered moments <a^l a^dag^l> for l = 0..max_order.
struct MomentVector {
  std::uint32_t max_order = 0;
  std::vector<double> normal;
  std::vector<double> antinormal;
  bool truncation_warning = false;
};

/// True when a truncated distribution may have dropped a non-negligible part
/// of an order-l moment: tail_bound * n_max^l > 1e-9 * value.
[[nodiscard]] inline bool truncation_warning(const PND& pnd, std::uint32_t l, double value) {
  if (!pnd.truncated()) return false;
  const double reach = std::pow(static_cast<double>(pnd.n_max()), static_cast<double>(l));
  return pnd.tail_bound() * reach > 1e-9 * std::abs(value);
}

/// <N(N-1)...(N-l+1)> = sum_n P(n) n(n-1)...(n-l+1).
[[nodiscard]] inline double factorial_moment(const PND& pnd, std::uint32_t l) {
  numerics::CompensatedSum<double> acc;
  const auto probs = pnd.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const std::size_t n = pnd.n_min() + i;
    if (n < l || probs[i] == 0.0) continue;
    acc += probs[i] * numerics::falling_factorial(static_cast<double>(n), l);
  }
  return acc.value();
}

/// <a^l a^dag^l> = sum_n P(n) (n+1)(n+2)...(n+l).
[[nodiscard]] inline double antinormal_moment(const PND& pnd, std::uint32_t l) {
  numerics::CompensatedSum<double> acc;
  const auto probs = pnd.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] == 0.0) continue;
    const double n = static_cast<double>(pnd.n_min() + i);
    acc += probs[i] * numerics::pochhammer(n + 1.0, l);
  }
  return acc.value();
}

[[nodiscard]] inline double mean_photon_number(const PND& pnd) { return factorial_moment(pnd, 1); }

/// Both moment families up to max_order in one pass over the distribution.
[[nodiscard]] inline MomentVector moment_vector(const PND& pnd, std::uint32_t max_order) {
  if (max_order < 1) throw DomainError("moment_vector: max_order must be >= 1");
  const std::size_t width = static_cast<std::size_t>(max_order) + 1;
  std::vector<numerics::CompensatedSum<double>> normal(width), anti(width);
  const auto probs = pnd.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs[i];
    if (p == 0.0) continue;
    const double n = static_cast<double>(pnd.n_min() + i);
    double falling = 1.0;
    double rising = 1.0;
    normal[0] += p;
    anti[0] += p;
    for (std::size_t k = 1; k < width; ++k) {
      falling *= n - static_cast<double>(k - 1);
      rising *= n + static_cast<double>(k);
      normal[k] += p * falling;
      anti[k] += p * rising;
    }
  }
  MomentVector mv;
  mv.max_order = max_order;
  mv.normal.reserve(width);
  mv.antinormal.reserve(width);
  for (std::size_t k = 0; k < width; ++k) {
    mv.normal.push_back(normal[k].value());
    mv.antinormal.push_back(anti[k].value());
    const auto order = static_cast<std::uint32_t>(k);
    mv.truncation_warning = mv.truncation_warning || truncation_warning(pnd, order, mv.normal.back()) ||
                            truncation_warning(pnd, order, mv.antinormal.back());
  }
  return mv;
}

}  // namespace hoa
