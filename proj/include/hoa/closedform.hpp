#pragma once

// Analytic d(l) expressions for each intermediate state, evaluated as
// printed, plus the cross-check that compares each one against the
// normal-ordered summation over the state's photon-number distribution.
//
// Binomial, generalized binomial and hypergeometric forms are products of
// falling/rising factorials divided by <N>^(l+1); they are evaluated as
// <N>^(l+1) * expm1(sum_j log1p(...)) so the bracket keeps full relative
// precision even when d(l) is a small difference of large moments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hoa/criteria.hpp"
#include "hoa/errors.hpp"
#include "hoa/moments.hpp"
#include "hoa/numerics.hpp"
#include "hoa/states.hpp"

namespace hoa {

namespace detail {
inline void require_closed_order(std::uint32_t l) {
  if (l < 1) throw ConstraintError("closed form: order l must be >= 1");
}
}  // namespace detail

/// d(l) = M!/(M-l-1)! p^(l+1) - (Mp)^(l+1), requires M >= l+1.
[[nodiscard]] inline double d_bs_closed(double p, std::uint32_t M, std::uint32_t l) {
  detail::require_closed_order(l);
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("d_bs_closed: p must lie in [0,1]");
  if (M <= l) throw ConstraintError("d_bs_closed: requires M > l (M=" + std::to_string(M) + ", l=" + std::to_string(l) + ")");
  const double Md = M;
  numerics::CompensatedSum<double> log_ratio;
  for (std::uint32_t j = 1; j <= l; ++j) log_ratio += std::log1p(-static_cast<double>(j) / Md);
  return std::pow(Md * p, static_cast<double>(l) + 1.0) * std::expm1(log_ratio.value());
}

/// Generalized binomial, product form:
/// [N(N-1)..(N-l)][(a+1)..(a+l+1)] / [(a+b+2)..(a+b+l+2)] - {N(a+1)/(a+b+2)}^(l+1).
[[nodiscard]] inline double d_gbs_closed(std::uint32_t N, double alpha, double beta, std::uint32_t l) {
  detail::require_closed_order(l);
  if (!(alpha > -1.0) || !(beta > -1.0)) throw DomainError("d_gbs_closed: alpha and beta must be > -1");
  if (N < l + 1) throw ConstraintError("d_gbs_closed: requires N >= l+1 (N=" + std::to_string(N) + ", l=" + std::to_string(l) + ")");
  const double Nd = N;
  const double a1 = alpha + 1.0;
  const double ab2 = alpha + beta + 2.0;
  numerics::CompensatedSum<double> log_ratio;
  for (std::uint32_t j = 1; j <= l; ++j) {
    const double jd = j;
    log_ratio += std::log1p(-jd / Nd);
    log_ratio += std::log1p(jd / a1);
    log_ratio -= std::log1p(jd / ab2);
  }
  const double mean = Nd * a1 / ab2;
  return std::pow(mean, static_cast<double>(l) + 1.0) * std::expm1(log_ratio.value());
}

/// Reciprocal binomial, finite alternating sum:
/// sum_{i=0}^{l+1} (-1)^i [(l+1)!]^2 / ([(l+1-i)!]^2 i!) (N+l+1-i)!/N!  -  N^(l+1).
/// The trailing N is the photon cap.
[[nodiscard]] inline double d_rbs_closed(std::uint32_t N, std::uint32_t l) {
  detail::require_closed_order(l);
  const double Nd = N;
  numerics::CompensatedSum<double> acc;
  double inv_ifact = 1.0;
  for (std::uint32_t i = 0; i <= l + 1; ++i) {
    if (i > 0) inv_ifact /= static_cast<double>(i);
    const double outer = numerics::falling_factorial(static_cast<double>(l) + 1.0, i);
    const double rising = numerics::pochhammer(Nd + 1.0, l + 1 - i);
    const double term = outer * outer * inv_ifact * rising;
    if (i % 2 == 0) acc += term;
    else acc -= term;
  }
  acc -= std::pow(Nd, static_cast<double>(l) + 1.0);
  return acc.value();
}

/// Negative binomial:
/// eta^(-l) [ (l+M+1)!/M! 2F1(-l-1, -l-1; -l-M-1; eta) - (M+1)^(l+1)/eta ].
/// The 2F1 terminates after l+2 terms through its numerator parameters,
/// before the denominator parameter can reach zero.
[[nodiscard]] inline double d_nbs_closed(double eta, std::uint32_t M, std::uint32_t l) {
  detail::require_closed_order(l);
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("d_nbs_closed: eta must lie in (0,1]");
  const double ld = l;
  const double Md = M;
  const auto f = numerics::hyp_series({-ld - 1.0, -ld - 1.0}, {-ld - Md - 1.0}, eta);
  const double ratio = numerics::pochhammer(Md + 1.0, l + 1);  // (l+M+1)!/M!
  const double bracket = ratio * f.value - std::pow(Md + 1.0, ld + 1.0) / eta;
  return std::pow(eta, -ld) * bracket;
}

/// Geometric: (1/eta^(l+1)) ((1-eta)^(l+1) eta (l+1)! - 1). Singular at eta = 0.
[[nodiscard]] inline double d_gs_closed(double eta, std::uint32_t l) {
  detail::require_closed_order(l);
  if (eta == 0.0) throw DomainError("d_gs_closed: singularity at eta = 0");
  if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("d_gs_closed: eta must lie in (0,1]");
  const double lp1 = static_cast<double>(l) + 1.0;
  const double fact = numerics::pochhammer(1.0, l + 1);  // (l+1)!
  return (std::pow(1.0 - eta, lp1) * eta * fact - 1.0) / std::pow(eta, lp1);
}

/// Photon-added coherent state, real alpha, a = alpha^2:
///   exp(-a) a^(l+1) [(l+m+1)!]^2 3F3({1,2+l+m,2+l+m};{2+l,2+l,m+1};a) / ([m!(l+1)!]^2 1F1(-m;1;-a))
/// - ( exp(-a) (-m + m 1F1(1+m;1;a) + (1+m) a 1F1(2+m;2;a)) / 1F1(-m;1;-a) )^(l+1)
[[nodiscard]] inline double d_pacs_closed(double alpha, std::uint32_t m, std::uint32_t l) {
  detail::require_closed_order(l);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("d_pacs_closed: alpha must be finite and >= 0");
  const double a = alpha * alpha;
  const double ld = l;
  const double md = m;
  using numerics::hyp_value;
  using numerics::LogReal;

  const double norm = hyp_value({-md}, {1.0}, -a);  // L_m(-a) > 0
  const double f33 = hyp_value({1.0, 2.0 + ld + md, 2.0 + ld + md}, {2.0 + ld, 2.0 + ld, md + 1.0}, a);
  const double binom = numerics::gen_binomial(ld + md + 1.0, m);  // (l+m+1)!/(m!(l+1)!)

  LogReal first = LogReal::from_log(-a) * LogReal::from_double(a).pow(ld + 1.0) *
                  LogReal::from_double(binom).pow(2.0) * LogReal::from_double(f33) / LogReal::from_double(norm);

  const double inner = -md + md * hyp_value({1.0 + md}, {1.0}, a) + (1.0 + md) * a * hyp_value({2.0 + md}, {2.0}, a);
  const double bracket = std::exp(-a) * inner / norm;
  return first.to_double() - std::pow(bracket, ld + 1.0);
}

/// Hypergeometric:
/// -(M eta)^(l+1) + (L-l-1)! M! (L eta)! / (L! (M-l-1)! (L eta - 1 - l)!)
/// with real-argument factorial ratios read as falling products,
/// (L eta)!/(L eta - l - 1)! = prod_{j=0}^{l} (L eta - j).
[[nodiscard]] inline double d_hs_closed(double L, std::uint32_t M, double eta, std::uint32_t l) {
  detail::require_closed_order(l);
  validate(Hypergeometric{L, M, eta});
  if (M <= l) throw ConstraintError("d_hs_closed: requires M > l (M=" + std::to_string(M) + ", l=" + std::to_string(l) + ")");
  const double Md = M;
  const double Le = L * eta;
  numerics::CompensatedSum<double> log_ratio;
  for (std::uint32_t j = 1; j <= l; ++j) {
    const double jd = j;
    log_ratio += std::log1p(-jd / Md);
    log_ratio += std::log1p(-jd / Le);
    log_ratio -= std::log1p(-jd / L);
  }
  return std::pow(Md * eta, static_cast<double>(l) + 1.0) * std::expm1(log_ratio.value());
}

/// Highest order l for which the closed form of this state is defined, or
/// empty when every l >= 1 is allowed.
[[nodiscard]] inline std::optional<std::uint32_t> max_closed_order(const StateSpec& spec) {
  if (const auto* s = std::get_if<Binomial>(&spec)) return s->M == 0 ? 0u : s->M - 1;
  if (const auto* s = std::get_if<GeneralizedBinomial>(&spec)) return s->N == 0 ? 0u : s->N - 1;
  if (const auto* s = std::get_if<Hypergeometric>(&spec)) return s->M == 0 ? 0u : s->M - 1;
  return std::nullopt;
}

/// Closed-form d(l) of any state.
[[nodiscard]] inline double d_closed(const StateSpec& spec, std::uint32_t l) {
  struct V {
    std::uint32_t l;
    double operator()(const Binomial& s) const { return d_bs_closed(s.p, s.M, l); }
    double operator()(const GeneralizedBinomial& s) const { return d_gbs_closed(s.N, s.alpha, s.beta, l); }
    double operator()(const ReciprocalBinomial& s) const { return d_rbs_closed(s.N, l); }
    double operator()(const NegativeBinomial& s) const { return d_nbs_closed(s.eta, s.M, l); }
    double operator()(const Geometric& s) const { return d_gs_closed(s.eta, l); }
    double operator()(const PhotonAddedCoherent& s) const { return d_pacs_closed(s.alpha, s.m, l); }
    double operator()(const Hypergeometric& s) const { return d_hs_closed(s.L, s.M, s.eta, l); }
  };
  return std::visit(V{l}, spec);
}

// --------------------------------------------------------------------------
// Cross-check

/// Tail tolerance used whenever a truncated distribution feeds high-order
/// moments: the omitted tail is amplified by roughly n_max^(l+1).
inline constexpr double kOracleTailTol = 1e-30;

inline constexpr double kDefaultCrosscheckTol = 1e-9;

struct DiscrepancyRow {
  StateSpec state;
  std::uint32_t l = 1;
  double d_oracle = 0.0;
  double d_closed = 0.0;
  double abs_dev = 0.0;
  double rel_dev = 0.0;
  double tol = kDefaultCrosscheckTol;
  double zero_tol = 0.0;
  bool agree = false;
  std::string note;
};

struct DiscrepancyReport {
  std::vector<DiscrepancyRow> rows;

  [[nodiscard]] std::size_t agree_count() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.agree; }));
  }
  [[nodiscard]] std::size_t disagree_count() const { return rows.size() - agree_count(); }
  void append(const DiscrepancyReport& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }
};

namespace detail {
inline std::string disagreement_note(const StateSpec& spec) {
  struct V {
    std::string operator()(const Binomial&) const { return "unexpected disagreement for a normal-ordered closed form"; }
    std::string operator()(const GeneralizedBinomial&) const { return "unexpected disagreement for a normal-ordered closed form"; }
    std::string operator()(const Hypergeometric&) const { return "unexpected disagreement for a normal-ordered closed form"; }
    std::string operator()(const ReciprocalBinomial&) const {
      return "closed form was derived with antinormal ordering; operator-ordering ambiguity";
    }
    std::string operator()(const NegativeBinomial&) const {
      return "operator ordering of the closed form is unstated; its (M+1)^(l+1)/eta term matches <a a^dag>^(l+1)";
    }
    std::string operator()(const Geometric&) const {
      return "operator-ordering ambiguity: closed form reproduces neither normal- nor antinormal-ordered direct sums";
    }
    std::string operator()(const PhotonAddedCoherent&) const {
      return "closed form omits moment terms below order l+1 and its mean bracket vanishes at alpha=0 instead of m";
    }
  };
  return std::visit(V{}, spec);
}
}  // namespace detail

/// Builds the state's distribution and compares d(l) from the normal-ordered
/// moment sums with the closed form for l = 1..l_max. A row agrees when
/// rel_dev <= tol, or when abs_dev is within the criterion zero tolerance
/// (both values classify as coherent-scale zero). Throws ConstraintError when
/// l_max exceeds the order range of the closed form.
[[nodiscard]] inline DiscrepancyReport crosscheck(const StateSpec& spec, std::uint32_t l_max,
                                                  double tol = kDefaultCrosscheckTol,
                                                  double tail_tol = kOracleTailTol) {
  if (l_max < 1) throw ConstraintError("crosscheck: l_max must be >= 1");
  validate(spec);
  if (auto cap = max_closed_order(spec); cap && l_max > *cap) {
    throw ConstraintError("crosscheck: closed form of " + std::string(family_name(spec)) +
                          " is defined only up to l = " + std::to_string(*cap));
  }
  const PND pnd = build(spec, tail_tol);
  const MomentVector mv = moment_vector(pnd, l_max + 1);
  const double mean = mv.normal[1];

  DiscrepancyReport rep;
  for (std::uint32_t l = 1; l <= l_max; ++l) {
    DiscrepancyRow row;
    row.state = spec;
    row.l = l;
    row.d_oracle = mv.normal[l + 1] - std::pow(mean, static_cast<double>(l) + 1.0);
    row.d_closed = d_closed(spec, l);
    row.abs_dev = std::abs(row.d_oracle - row.d_closed);
    if (row.abs_dev == 0.0) row.rel_dev = 0.0;
    else if (row.d_oracle == 0.0) row.rel_dev = std::numeric_limits<double>::infinity();
    else row.rel_dev = row.abs_dev / std::abs(row.d_oracle);
    row.tol = tol;
    row.zero_tol = default_zero_tol(mean, l);
    row.agree = std::isfinite(row.d_closed) && (row.rel_dev <= tol || row.abs_dev <= row.zero_tol);
    row.note = "normal-ordered oracle";
    if (!row.agree) row.note += "; |rel_dev| > tol; " + detail::disagreement_note(spec);
    if (mv.truncation_warning) row.note += "; truncation warning";
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace hoa
