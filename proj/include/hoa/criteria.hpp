#pragma once

// Higher-order antibunching criteria over factorial moments:
//   d(l)   = <N^(l+1)> - <N>^(l+1)
//   A_l    = <N^(l+1)> / (<N^(l)> <N>) - 1
//   R(l,m) = <N^(l+1)> <N^(m-1)> / (<N^(l)> <N^(m)>) - 1,  1 <= m <= l
// Negative values signal l-th order antibunching; d(l) = 0 is higher-order
// coherence and d(l) > 0 higher-order bunching.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/moments.hpp"
#include "hoa/states.hpp"

namespace hoa {

enum class Classification { antibunched, coherent, bunched };

[[nodiscard]] constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::antibunched: return "antibunched";
    case Classification::coherent: return "coherent";
    case Classification::bunched: return "bunched";
  }
  return "?";
}

/// Relative zero tolerance 1e-10 * max(1, <N>^(l+1)); d(l) scales like <N>^(l+1).
[[nodiscard]] inline double default_zero_tol(double mean, std::uint32_t l) {
  return 1e-10 * std::max(1.0, std::pow(std::abs(mean), static_cast<double>(l) + 1.0));
}

[[nodiscard]] constexpr Classification classify(double d_value, double zero_tol) {
  if (d_value < -zero_tol) return Classification::antibunched;
  if (d_value > zero_tol) return Classification::bunched;
  return Classification::coherent;
}

namespace detail {
inline void require_order(std::uint32_t l) {
  if (l < 1) throw ConstraintError("criterion order l must be >= 1");
}
// Shared by A_l and R(l,m) so that R(l,1) and A_l are bitwise identical.
inline double lee_ratio(double n_lp1, double n_m_minus_1, double n_l, double n_m) {
  const double denom = n_l * n_m;
  if (denom == 0.0) throw UndefinedCriterionError("criterion undefined: a factorial moment in the denominator is zero");
  return n_lp1 * n_m_minus_1 / denom - 1.0;
}
inline double factorial_moment_or_one(const PND& pnd, std::uint32_t k) {
  return k == 0 ? 1.0 : factorial_moment(pnd, k);
}
}  // namespace detail

[[nodiscard]] inline double d_criterion(const PND& pnd, std::uint32_t l) {
  detail::require_order(l);
  const double mean = factorial_moment(pnd, 1);
  return factorial_moment(pnd, l + 1) - std::pow(mean, static_cast<double>(l) + 1.0);
}

[[nodiscard]] inline double ba_an_A(const PND& pnd, std::uint32_t l) {
  detail::require_order(l);
  const double n1 = factorial_moment(pnd, 1);
  return detail::lee_ratio(factorial_moment(pnd, l + 1), 1.0, factorial_moment(pnd, l), n1);
}

[[nodiscard]] inline double lee_R(const PND& pnd, std::uint32_t l, std::uint32_t m) {
  detail::require_order(l);
  if (m < 1 || m > l) {
    throw ConstraintError("lee_R: requires 1 <= m <= l, got l=" + std::to_string(l) + ", m=" + std::to_string(m));
  }
  return detail::lee_ratio(factorial_moment(pnd, l + 1), detail::factorial_moment_or_one(pnd, m - 1),
                           factorial_moment(pnd, l), factorial_moment(pnd, m));
}

/// One link of <N^(k+1)><N>^(l-k) < <N^(k)><N>^(l-k+1).
struct HierarchyLink {
  std::uint32_t k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;     // strict inequality beyond the relative tolerance
  bool equality = false;  // |rhs - lhs| within the relative tolerance
};

struct HierarchyReport {
  std::vector<HierarchyLink> links;  // k = l down to 1
  bool full_chain = false;
};

/// Evaluates every link of the moment inequality chain from order l down to 1.
/// Links within `rel_tol` of equality (including 0 = 0) count as equalities,
/// not as strict inequalities.
[[nodiscard]] inline HierarchyReport hierarchy_check(const PND& pnd, std::uint32_t l, double rel_tol = 1e-10) {
  detail::require_order(l);
  const MomentVector mv = moment_vector(pnd, l + 1);
  const double mean = mv.normal[1];
  HierarchyReport rep;
  rep.full_chain = true;
  for (std::uint32_t k = l; k >= 1; --k) {
    HierarchyLink link;
    link.k = k;
    link.lhs = mv.normal[k + 1] * std::pow(mean, static_cast<double>(l - k));
    link.rhs = mv.normal[k] * std::pow(mean, static_cast<double>(l - k + 1));
    const double scale = std::max(std::abs(link.lhs), std::abs(link.rhs));
    link.equality = std::abs(link.rhs - link.lhs) <= rel_tol * scale;
    link.holds = !link.equality && link.lhs < link.rhs;
    rep.full_chain = rep.full_chain && link.holds;
    rep.links.push_back(link);
  }
  return rep;
}

struct CriterionResult {
  std::uint32_t l = 1;
  double d = 0.0;
  std::optional<double> A;  // empty when <N^(l)> <N> = 0
  std::optional<double> R;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> lm;
  Classification classification = Classification::coherent;
  double zero_tol = 0.0;
  bool truncation_warning = false;
  /// Whether d and A classify alike under the same relative tolerance; empty
  /// when A is undefined.
  std::optional<bool> signs_agree;
};

/// d, A and optionally R(l, lee_m) with classification of d. The zero
/// tolerance defaults to default_zero_tol(<N>, l).
[[nodiscard]] inline CriterionResult evaluate_criteria(const PND& pnd, std::uint32_t l,
                                                       std::optional<std::uint32_t> lee_m = std::nullopt,
                                                       std::optional<double> zero_tol = std::nullopt) {
  detail::require_order(l);
  const MomentVector mv = moment_vector(pnd, l + 1);
  const double mean = mv.normal[1];
  CriterionResult r;
  r.l = l;
  r.d = mv.normal[l + 1] - std::pow(mean, static_cast<double>(l) + 1.0);
  r.zero_tol = zero_tol.value_or(default_zero_tol(mean, l));
  if (r.zero_tol < 0.0) throw DomainError("zero_tol must be >= 0");
  r.classification = classify(r.d, r.zero_tol);
  r.truncation_warning = mv.truncation_warning;
  try {
    r.A = ba_an_A(pnd, l);
    // A is dimensionless, so it gets a plain 1e-10 threshold.
    const Classification ca = classify(*r.A, 1e-10);
    r.signs_agree = ca == r.classification;
  } catch (const UndefinedCriterionError&) {
    r.A.reset();
  }
  if (lee_m) {
    r.lm = std::make_pair(l, *lee_m);
    try {
      r.R = lee_R(pnd, l, *lee_m);
    } catch (const UndefinedCriterionError&) {
      r.R.reset();
    }
  }
  return r;
}

}  // namespace hoa
