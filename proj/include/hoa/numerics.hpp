#pragma once

// Scalar special-function kernels shared by the state builders and the
// closed-form expressions: compensated summation, log-gamma, rising and
// falling factorials, generalized binomial coefficients, a sign/log-magnitude
// real, and the generalized hypergeometric series pFq.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hoa/errors.hpp"

namespace hoa::numerics {

/// Neumaier's variant of Kahan summation. Keeps a running correction term so
/// that alternating sums with large cancellation keep their low-order digits.
template <std::floating_point T = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(T init) : sum_(init) {}

  constexpr CompensatedSum& operator+=(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }
  constexpr CompensatedSum& operator-=(T x) { return *this += -x; }

  [[nodiscard]] constexpr T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

template <std::floating_point T = double>
[[nodiscard]] T compensated_sum(std::span<const T> xs) {
  CompensatedSum<T> acc;
  for (T x : xs) acc += x;
  return acc.value();
}

/// ln Gamma(x) for x > 0.
[[nodiscard]] inline double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("log_gamma: argument must be finite and > 0, got " + std::to_string(x));
  }
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/// Rising factorial (a)_n = a(a+1)...(a+n-1), with (a)_0 = 1.
[[nodiscard]] inline double pochhammer(double a, std::uint64_t n) {
  double p = 1.0;
  for (std::uint64_t j = 0; j < n; ++j) p *= a + static_cast<double>(j);
  return p;
}

/// Falling factorial a(a-1)...(a-n+1), with an empty product of 1.
[[nodiscard]] inline double falling_factorial(double a, std::uint64_t n) {
  double p = 1.0;
  for (std::uint64_t j = 0; j < n; ++j) p *= a - static_cast<double>(j);
  return p;
}

/// Binomial coefficient with a real upper argument: a(a-1)...(a-n+1)/n!.
/// Numerator and denominator factors are interleaved so intermediate values
/// stay near the magnitude of the result.
[[nodiscard]] inline double gen_binomial(double a, std::uint64_t n) {
  double c = 1.0;
  for (std::uint64_t j = 0; j < n; ++j) {
    c *= (a - static_cast<double>(j)) / static_cast<double>(j + 1);
  }
  return c;
}

/// A real number stored as sign and natural log of its magnitude. Products and
/// quotients are exact in log space; sums go through log-sum-exp.
struct LogReal {
  int sign = 0;               // -1, 0 or +1
  double log_magnitude = 0.0;  // ignored when sign == 0

  [[nodiscard]] static constexpr LogReal zero() { return {}; }
  [[nodiscard]] static constexpr LogReal from_log(double log_mag, int s = 1) {
    return s == 0 ? LogReal{} : LogReal{s > 0 ? 1 : -1, log_mag};
  }
  [[nodiscard]] static LogReal from_double(double x) {
    if (x == 0.0) return {};
    return {x > 0.0 ? 1 : -1, std::log(std::abs(x))};
  }

  [[nodiscard]] bool is_zero() const { return sign == 0; }
  [[nodiscard]] double to_double() const {
    return sign == 0 ? 0.0 : static_cast<double>(sign) * std::exp(log_magnitude);
  }

  friend LogReal operator*(LogReal a, LogReal b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.sign * b.sign, a.log_magnitude + b.log_magnitude};
  }
  friend LogReal operator/(LogReal a, LogReal b) {
    if (b.sign == 0) throw DomainError("LogReal: division by zero");
    if (a.sign == 0) return {};
    return {a.sign * b.sign, a.log_magnitude - b.log_magnitude};
  }
  friend LogReal operator-(LogReal a) { return {-a.sign, a.log_magnitude}; }
  friend LogReal operator+(LogReal a, LogReal b) {
    if (a.sign == 0) return b;
    if (b.sign == 0) return a;
    if (a.log_magnitude < b.log_magnitude) std::swap(a, b);
    const double r = std::exp(b.log_magnitude - a.log_magnitude);  // <= 1
    if (a.sign == b.sign) return {a.sign, a.log_magnitude + std::log1p(r)};
    if (r == 1.0) return {};
    return {a.sign, a.log_magnitude + std::log1p(-r)};
  }
  friend LogReal operator-(LogReal a, LogReal b) { return a + (-b); }

  [[nodiscard]] LogReal pow(double k) const {
    if (sign == 0) return {};
    if (sign < 0 && std::floor(k) != k) throw DomainError("LogReal: fractional power of a negative value");
    const bool odd = sign < 0 && std::fmod(std::abs(k), 2.0) == 1.0;
    return {odd ? -1 : 1, log_magnitude * k};
  }
};

/// ln of the falling factorial a(a-1)...(a-n+1) for a - n + 1 > 0. Factors
/// are multiplied directly in chunks and only the chunk products are logged.
[[nodiscard]] inline double log_falling_factorial(double a, std::uint64_t n) {
  if (n > 0 && !(a - static_cast<double>(n - 1) > 0.0)) {
    throw DomainError("log_falling_factorial: factors must be positive");
  }
  CompensatedSum<double> acc;
  double chunk = 1.0;
  for (std::uint64_t j = 0; j < n; ++j) {
    chunk *= a - static_cast<double>(j);
    if (chunk > 1e250 || chunk < 1e-250) {
      acc += std::log(chunk);
      chunk = 1.0;
    }
  }
  acc += std::log(chunk);
  return acc.value();
}

/// Outcome of summing a generalized hypergeometric series.
struct HypSeriesResult {
  double value = 0.0;
  std::size_t terms_used = 0;
  bool terminated = false;  // stopped because a numerator parameter is a non-positive integer
  bool converged = false;
  double residual_estimate = 0.0;
};

namespace detail {
inline bool is_nonpositive_integer(double x) { return x <= 0.0 && std::floor(x) == x; }
}  // namespace detail

inline constexpr std::size_t kHypSeriesMaxTerms = 1'000'000;

/// Sum_k [prod_i (num_i)_k / prod_j (den_j)_k] z^k / k!.
///
/// Terms are generated by the ratio recursion and accumulated with
/// compensated summation. The series terminates exactly as soon as a numerator
/// factor (num_i + k) vanishes; otherwise it stops after three consecutive
/// terms below 1e-16 of the partial sum, or at `max_terms` (converged=false).
/// A vanishing denominator factor reached before termination throws
/// DegenerateParameterError.
[[nodiscard]] inline HypSeriesResult hyp_series(std::span<const double> numerators,
                                                std::span<const double> denominators, double z,
                                                std::size_t max_terms = kHypSeriesMaxTerms) {
  HypSeriesResult r;
  CompensatedSum<double> sum;
  double term = 1.0;
  sum += term;
  r.terms_used = 1;
  int small_run = 0;

  for (std::size_t k = 0;; ++k) {
    const double kd = static_cast<double>(k);
    bool hit_zero = false;
    for (double a : numerators) {
      if (a + kd == 0.0) hit_zero = true;
    }
    if (hit_zero) {
      r.terminated = true;
      r.converged = true;
      r.residual_estimate = 0.0;
      break;
    }
    for (double b : denominators) {
      if (b + kd == 0.0) {
        throw DegenerateParameterError("hyp_series: denominator parameter " + std::to_string(b) +
                                       " reached zero at k=" + std::to_string(k + 1) +
                                       " before the series terminated");
      }
    }
    if (r.terms_used >= max_terms) {
      r.converged = false;
      r.residual_estimate = std::abs(term);
      break;
    }
    double ratio = z / (kd + 1.0);
    for (double a : numerators) ratio *= a + kd;
    for (double b : denominators) ratio /= b + kd;
    term *= ratio;
    sum += term;
    ++r.terms_used;

    const double partial = sum.value();
    if (std::abs(term) < 1e-16 * std::abs(partial) || term == 0.0) {
      if (++small_run >= 3) {
        r.converged = true;
        r.residual_estimate = std::abs(term);
        break;
      }
    } else {
      small_run = 0;
    }
    if (!std::isfinite(partial)) {
      throw NumericalError("hyp_series: partial sum overflowed");
    }
  }
  r.value = sum.value();
  return r;
}

[[nodiscard]] inline HypSeriesResult hyp_series(std::initializer_list<double> numerators,
                                                std::initializer_list<double> denominators, double z,
                                                std::size_t max_terms = kHypSeriesMaxTerms) {
  return hyp_series(std::span<const double>(numerators.begin(), numerators.size()),
                    std::span<const double>(denominators.begin(), denominators.size()), z, max_terms);
}

/// Value of a series that must have converged; throws NumericalError otherwise.
[[nodiscard]] inline double hyp_value(std::initializer_list<double> numerators,
                                      std::initializer_list<double> denominators, double z,
                                      std::size_t max_terms = kHypSeriesMaxTerms) {
  const HypSeriesResult r = hyp_series(numerators, denominators, z, max_terms);
  if (!r.converged) {
    throw NumericalError("hypergeometric series did not converge within the term cap");
  }
  return r.value;
}

/// Laguerre polynomial L_m(x) = 1F1(-m; 1; x).
[[nodiscard]] inline double laguerre(std::uint64_t m, double x) {
  return hyp_series({-static_cast<double>(m)}, {1.0}, x).value;
}

}  // namespace hoa::numerics
