#pragma once

// Photon-number distributions of the intermediate states: binomial,
// generalized binomial (Roy-Roy), reciprocal binomial, negative binomial,
// geometric, photon-added coherent and hypergeometric.
//
// Every builder evaluates the ratio P(n+1)/P(n) in direct space and carries
// the running value as a mantissa plus an exact power-of-two exponent, so
// neither the huge binomial coefficients of large-L hypergeometric states nor
// the tiny anchors of dilute negative binomial states over- or underflow.
// Finite-support states are normalized by a compensated sum of the weights;
// infinite-support states are anchored at their first photon number with the
// analytic normalization and truncated once a geometric tail bound drops
// below the requested tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/numerics.hpp"

namespace hoa {

struct Binomial {
  double p = 0.5;
  std::uint32_t M = 1;
};
struct GeneralizedBinomial {
  std::uint32_t N = 1;
  double alpha = 0.0;
  double beta = 0.0;
};
/// theta only sets the phases of the amplitudes and cancels in every
/// photon-number statistic; it is kept so the spec round-trips.
struct ReciprocalBinomial {
  std::uint32_t N = 1;
  double theta = 0.0;
};
struct NegativeBinomial {
  double eta = 0.5;
  std::uint32_t M = 0;
};
struct Geometric {
  double eta = 0.5;
};
struct PhotonAddedCoherent {
  double alpha = 1.0;
  std::uint32_t m = 0;
};
struct Hypergeometric {
  double L = 4.0;
  std::uint32_t M = 2;
  double eta = 0.5;
};

using StateSpec = std::variant<Binomial, GeneralizedBinomial, ReciprocalBinomial, NegativeBinomial,
                               Geometric, PhotonAddedCoherent, Hypergeometric>;

inline constexpr double kDefaultTailTol = 1e-12;

// --------------------------------------------------------------------------
// Family names and named parameter access (used by the CLI and sweeps).

[[nodiscard]] inline std::string_view family_name(const StateSpec& s) {
  struct V {
    std::string_view operator()(const Binomial&) const { return "binomial"; }
    std::string_view operator()(const GeneralizedBinomial&) const { return "gbs"; }
    std::string_view operator()(const ReciprocalBinomial&) const { return "rbs"; }
    std::string_view operator()(const NegativeBinomial&) const { return "nbs"; }
    std::string_view operator()(const Geometric&) const { return "geometric"; }
    std::string_view operator()(const PhotonAddedCoherent&) const { return "pacs"; }
    std::string_view operator()(const Hypergeometric&) const { return "hs"; }
  };
  return std::visit(V{}, s);
}

[[nodiscard]] inline std::vector<std::string_view> family_names() {
  return {"binomial", "gbs", "rbs", "nbs", "geometric", "pacs", "hs"};
}

/// Default-constructed spec of the named family; throws DomainError on an
/// unknown name. Accepts a few long-form aliases.
[[nodiscard]] inline StateSpec make_family(std::string_view name) {
  if (name == "binomial" || name == "bs") return Binomial{};
  if (name == "gbs" || name == "generalized_binomial") return GeneralizedBinomial{};
  if (name == "rbs" || name == "reciprocal_binomial") return ReciprocalBinomial{};
  if (name == "nbs" || name == "negative_binomial") return NegativeBinomial{};
  if (name == "geometric" || name == "gs") return Geometric{};
  if (name == "pacs" || name == "photon_added_coherent") return PhotonAddedCoherent{};
  if (name == "hs" || name == "hypergeometric") return Hypergeometric{};
  throw DomainError("unknown state family '" + std::string(name) + "'");
}

struct ParamInfo {
  std::string_view name;
  bool integer;
};

[[nodiscard]] inline std::vector<ParamInfo> param_info(const StateSpec& s) {
  struct V {
    std::vector<ParamInfo> operator()(const Binomial&) const { return {{"p", false}, {"M", true}}; }
    std::vector<ParamInfo> operator()(const GeneralizedBinomial&) const {
      return {{"N", true}, {"alpha", false}, {"beta", false}};
    }
    std::vector<ParamInfo> operator()(const ReciprocalBinomial&) const { return {{"N", true}, {"theta", false}}; }
    std::vector<ParamInfo> operator()(const NegativeBinomial&) const { return {{"eta", false}, {"M", true}}; }
    std::vector<ParamInfo> operator()(const Geometric&) const { return {{"eta", false}}; }
    std::vector<ParamInfo> operator()(const PhotonAddedCoherent&) const { return {{"alpha", false}, {"m", true}}; }
    std::vector<ParamInfo> operator()(const Hypergeometric&) const {
      return {{"L", false}, {"M", true}, {"eta", false}};
    }
  };
  return std::visit(V{}, s);
}

[[nodiscard]] inline bool has_param(const StateSpec& s, std::string_view name) {
  for (const auto& p : param_info(s)) {
    if (p.name == name) return true;
  }
  return false;
}

namespace detail {
inline std::uint32_t to_count(std::string_view name, double v) {
  if (!(v >= 0.0) || std::floor(v) != v || v > 4.0e9) {
    throw DomainError("parameter " + std::string(name) + " must be a non-negative integer, got " + std::to_string(v));
  }
  return static_cast<std::uint32_t>(v);
}
}  // namespace detail

/// Sets a named parameter. Integer parameters reject non-integral values.
inline void set_param(StateSpec& s, std::string_view name, double v) {
  auto bad = [&] { throw DomainError("state " + std::string(family_name(s)) + " has no parameter '" + std::string(name) + "'"); };
  std::visit(
      [&](auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, Binomial>) {
          if (name == "p") st.p = v;
          else if (name == "M") st.M = detail::to_count(name, v);
          else bad();
        } else if constexpr (std::is_same_v<T, GeneralizedBinomial>) {
          if (name == "N") st.N = detail::to_count(name, v);
          else if (name == "alpha") st.alpha = v;
          else if (name == "beta") st.beta = v;
          else bad();
        } else if constexpr (std::is_same_v<T, ReciprocalBinomial>) {
          if (name == "N") st.N = detail::to_count(name, v);
          else if (name == "theta") st.theta = v;
          else bad();
        } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
          if (name == "eta") st.eta = v;
          else if (name == "M") st.M = detail::to_count(name, v);
          else bad();
        } else if constexpr (std::is_same_v<T, Geometric>) {
          if (name == "eta") st.eta = v;
          else bad();
        } else if constexpr (std::is_same_v<T, PhotonAddedCoherent>) {
          if (name == "alpha") st.alpha = v;
          else if (name == "m") st.m = detail::to_count(name, v);
          else bad();
        } else if constexpr (std::is_same_v<T, Hypergeometric>) {
          if (name == "L") st.L = v;
          else if (name == "M") st.M = detail::to_count(name, v);
          else if (name == "eta") st.eta = v;
          else bad();
        }
      },
      s);
}

[[nodiscard]] inline double get_param(const StateSpec& s, std::string_view name) {
  double out = 0.0;
  bool found = false;
  std::visit(
      [&](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        auto take = [&](std::string_view n, double v) {
          if (n == name) {
            out = v;
            found = true;
          }
        };
        if constexpr (std::is_same_v<T, Binomial>) {
          take("p", st.p);
          take("M", st.M);
        } else if constexpr (std::is_same_v<T, GeneralizedBinomial>) {
          take("N", st.N);
          take("alpha", st.alpha);
          take("beta", st.beta);
        } else if constexpr (std::is_same_v<T, ReciprocalBinomial>) {
          take("N", st.N);
          take("theta", st.theta);
        } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
          take("eta", st.eta);
          take("M", st.M);
        } else if constexpr (std::is_same_v<T, Geometric>) {
          take("eta", st.eta);
        } else if constexpr (std::is_same_v<T, PhotonAddedCoherent>) {
          take("alpha", st.alpha);
          take("m", st.m);
        } else if constexpr (std::is_same_v<T, Hypergeometric>) {
          take("L", st.L);
          take("M", st.M);
          take("eta", st.eta);
        }
      },
      s);
  if (!found) throw DomainError("state " + std::string(family_name(s)) + " has no parameter '" + std::string(name) + "'");
  return out;
}

/// Smallest L allowed for a hypergeometric state: max{M/eta, M/(1-eta)}.
[[nodiscard]] inline double hs_minimal_L(std::uint32_t M, double eta) {
  return std::max(static_cast<double>(M) / eta, static_cast<double>(M) / (1.0 - eta));
}

/// Throws DomainError / ConstraintError when the parameters are not a valid state.
inline void validate(const StateSpec& s) {
  std::visit(
      [](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, Binomial>) {
          if (!(st.p >= 0.0 && st.p <= 1.0)) throw DomainError("binomial: p must lie in [0,1]");
        } else if constexpr (std::is_same_v<T, GeneralizedBinomial>) {
          if (!(st.alpha > -1.0) || !(st.beta > -1.0) || !std::isfinite(st.alpha) || !std::isfinite(st.beta)) {
            throw DomainError("gbs: alpha and beta must be finite and > -1");
          }
        } else if constexpr (std::is_same_v<T, ReciprocalBinomial>) {
          if (!std::isfinite(st.theta)) throw DomainError("rbs: theta must be finite");
        } else if constexpr (std::is_same_v<T, NegativeBinomial>) {
          if (!(st.eta > 0.0 && st.eta <= 1.0)) {
            throw DomainError("nbs: eta must lie in (0,1]; eta = 0 is not normalizable");
          }
        } else if constexpr (std::is_same_v<T, Geometric>) {
          if (!(st.eta > 0.0 && st.eta <= 1.0)) {
            throw DomainError("geometric: eta must lie in (0,1]; eta = 0 is not normalizable");
          }
        } else if constexpr (std::is_same_v<T, PhotonAddedCoherent>) {
          if (!(st.alpha >= 0.0) || !std::isfinite(st.alpha)) throw DomainError("pacs: alpha must be finite and >= 0");
        } else if constexpr (std::is_same_v<T, Hypergeometric>) {
          if (!(st.eta > 0.0 && st.eta < 1.0)) throw DomainError("hs: eta must lie in (0,1)");
          if (!std::isfinite(st.L)) throw DomainError("hs: L must be finite");
          const double lmin = hs_minimal_L(st.M, st.eta);
          if (!(st.L > 0.0) || st.L < lmin * (1.0 - 1e-12)) {
            throw ConstraintError("hs: L = " + std::to_string(st.L) + " violates L >= max{M/eta, M/(1-eta)} = " +
                                  std::to_string(lmin));
          }
        }
      },
      s);
}

// --------------------------------------------------------------------------

/// Normalized photon-number probabilities over the contiguous support
/// n_min .. n_min + size - 1. Immutable after construction.
class PhotonNumberDistribution {
 public:
  PhotonNumberDistribution(StateSpec source, std::size_t n_min, std::vector<double> probs, bool truncated,
                           double tail_bound)
      : source_(std::move(source)),
        n_min_(n_min),
        probs_(std::move(probs)),
        truncated_(truncated),
        tail_bound_(tail_bound) {
    if (probs_.empty()) throw DomainError("PhotonNumberDistribution: empty support");
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("PhotonNumberDistribution: probabilities must be finite and >= 0");
    }
    if (!(tail_bound_ >= 0.0)) throw DomainError("PhotonNumberDistribution: tail bound must be >= 0");
  }

  [[nodiscard]] const StateSpec& source() const { return source_; }
  [[nodiscard]] std::size_t n_min() const { return n_min_; }
  [[nodiscard]] std::size_t n_max() const { return n_min_ + probs_.size() - 1; }
  [[nodiscard]] std::size_t size() const { return probs_.size(); }
  [[nodiscard]] std::span<const double> probs() const { return probs_; }
  [[nodiscard]] bool truncated() const { return truncated_; }
  [[nodiscard]] double tail_bound() const { return tail_bound_; }

  /// P(n), zero outside the stored support.
  [[nodiscard]] double operator()(std::size_t n) const {
    if (n < n_min_ || n > n_max()) return 0.0;
    return probs_[n - n_min_];
  }

  [[nodiscard]] double total() const { return numerics::compensated_sum<double>(probs_); }

 private:
  StateSpec source_;
  std::size_t n_min_;
  std::vector<double> probs_;
  bool truncated_;
  double tail_bound_;
};

using PND = PhotonNumberDistribution;

namespace detail {

/// Value carried as mantissa * 2^exponent with an exact exponent.
struct Scaled {
  double mant = 1.0;
  long exp = 0;

  static Scaled from_log(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity()) return {0.0, 0};
    const double e = std::floor(log_value / std::numbers::ln2);
    Scaled s{std::exp(log_value - e * std::numbers::ln2), static_cast<long>(e)};
    s.normalize();
    return s;
  }
  void normalize() {
    if (mant == 0.0) return;
    int e = 0;
    mant = std::frexp(mant, &e);
    exp += e;
  }
  void scale(double r) {
    mant *= r;
    normalize();
  }
  [[nodiscard]] double value() const {
    if (mant == 0.0) return 0.0;
    if (exp < -1100) return 0.0;
    if (exp > 1100) return std::numeric_limits<double>::infinity();
    return std::ldexp(mant, static_cast<int>(exp));
  }
};

/// Weights w(0..count-1) with w(0) = 1 and w(k+1) = w(k) * ratio(k),
/// normalized to unit sum.
inline std::vector<double> normalized_by_ratio(std::size_t count, const std::function<double(std::size_t)>& ratio) {
  std::vector<Scaled> w(count);
  Scaled cur;
  cur.normalize();
  long max_exp = std::numeric_limits<long>::min();
  for (std::size_t k = 0; k < count; ++k) {
    if (k > 0) cur.scale(ratio(k - 1));
    w[k] = cur;
    if (cur.mant != 0.0) max_exp = std::max(max_exp, cur.exp);
  }
  std::vector<double> out(count);
  numerics::CompensatedSum<double> total;
  for (std::size_t k = 0; k < count; ++k) {
    const long e = w[k].exp - max_exp;
    out[k] = (w[k].mant == 0.0 || e < -1100) ? 0.0 : std::ldexp(w[k].mant, static_cast<int>(e));
    total += out[k];
  }
  const double t = total.value();
  for (double& x : out) x /= t;
  return out;
}

/// Infinite-support distribution anchored at P(0) = exp(log_anchor) with
/// decreasing-for-large-k ratios. Stops at the first k where ratio(k) < 1 and
/// P(k) ratio(k) / (1 - ratio(k)) <= tail_tol / 2; that quantity bounds the
/// omitted mass because ratio(j) is non-increasing for j >= k.
inline std::pair<std::vector<double>, double> truncated_by_ratio(double log_anchor,
                                                                 const std::function<double(std::size_t)>& ratio,
                                                                 double tail_tol) {
  constexpr std::size_t kMaxSupport = 100'000'000;
  std::vector<double> out;
  Scaled cur = Scaled::from_log(log_anchor);
  for (std::size_t k = 0;; ++k) {
    if (k > 0) cur.scale(ratio(k - 1));
    const double pk = cur.value();
    out.push_back(pk);
    const double r = ratio(k);
    if (r < 1.0) {
      const double bound = pk * r / (1.0 - r);
      // half the tolerance leaves room for rounding drift along long recurrences
      if (bound <= 0.5 * tail_tol) return {std::move(out), bound};
    }
    if (k >= kMaxSupport) throw NumericalError("truncation did not reach the tail tolerance within the support cap");
  }
}

}  // namespace detail

// --------------------------------------------------------------------------
// Builders

/// Binomial state: P(n) = C(M,n) p^n (1-p)^(M-n), n = 0..M.
[[nodiscard]] inline PND build_binomial(double p, std::uint32_t M) {
  const StateSpec spec = Binomial{p, M};
  validate(spec);
  std::vector<double> probs(static_cast<std::size_t>(M) + 1, 0.0);
  if (p == 0.0) {
    probs.front() = 1.0;
  } else if (p == 1.0) {
    probs.back() = 1.0;
  } else {
    const double odds = p / (1.0 - p);
    probs = detail::normalized_by_ratio(probs.size(), [&](std::size_t n) {
      return static_cast<double>(M - n) / static_cast<double>(n + 1) * odds;
    });
  }
  return PND(spec, 0, std::move(probs), false, 0.0);
}

/// Number state |n>: the binomial state with p = 1.
[[nodiscard]] inline PND build_number_state(std::uint32_t n) { return build_binomial(1.0, n); }

/// Roy-Roy generalized binomial state:
/// w(n) = N!/(alpha+beta+2)_N * (alpha+1)_n (beta+1)_(N-n) / (n! (N-n)!).
[[nodiscard]] inline PND build_gbs(std::uint32_t N, double alpha, double beta) {
  const StateSpec spec = GeneralizedBinomial{N, alpha, beta};
  validate(spec);
  auto probs = detail::normalized_by_ratio(static_cast<std::size_t>(N) + 1, [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    const double rest = static_cast<double>(N - n);
    return (alpha + 1.0 + nd) * rest / ((nd + 1.0) * (beta + rest));
  });
  return PND(spec, 0, std::move(probs), false, 0.0);
}

/// Reciprocal binomial state: P(k) proportional to 1/C(N,k). The phase
/// exp(ik(theta - pi/2)) has unit modulus, so theta does not enter.
[[nodiscard]] inline PND build_rbs(std::uint32_t N, double theta) {
  const StateSpec spec = ReciprocalBinomial{N, theta};
  validate(spec);
  auto probs = detail::normalized_by_ratio(static_cast<std::size_t>(N) + 1, [&](std::size_t k) {
    return static_cast<double>(k + 1) / static_cast<double>(N - k);
  });
  return PND(spec, 0, std::move(probs), false, 0.0);
}

/// Negative binomial state: P(n) = C(n,M) eta^(M+1) (1-eta)^(n-M), n >= M.
[[nodiscard]] inline PND build_nbs(double eta, std::uint32_t M, double tail_tol = kDefaultTailTol) {
  const StateSpec spec = NegativeBinomial{eta, M};
  validate(spec);
  if (!(tail_tol > 0.0)) throw DomainError("nbs: tail_tol must be > 0");
  const double q = 1.0 - eta;
  auto [probs, bound] = detail::truncated_by_ratio(
      static_cast<double>(M + 1) * std::log(eta),
      [&](std::size_t k) {
        // n = M + k; P(n+1)/P(n) = (n+1)/(n+1-M) * (1-eta)
        return q * static_cast<double>(M + k + 1) / static_cast<double>(k + 1);
      },
      tail_tol);
  return PND(spec, M, std::move(probs), true, bound);
}

/// Geometric state: the negative binomial state with M = 0.
[[nodiscard]] inline PND build_geometric(double eta, double tail_tol = kDefaultTailTol) {
  PND nbs = build_nbs(eta, 0, tail_tol);
  return PND(Geometric{eta}, nbs.n_min(), std::vector<double>(nbs.probs().begin(), nbs.probs().end()), true,
             nbs.tail_bound());
}

/// Photon-added coherent state, real alpha:
/// P(n+m) = exp(-alpha^2) alpha^(2n) (m+n)! / (n!^2 m! L_m(-alpha^2)).
[[nodiscard]] inline PND build_pacs(double alpha, std::uint32_t m, double tail_tol = kDefaultTailTol) {
  const StateSpec spec = PhotonAddedCoherent{alpha, m};
  validate(spec);
  if (!(tail_tol > 0.0)) throw DomainError("pacs: tail_tol must be > 0");
  const double a2 = alpha * alpha;
  const double lag = numerics::laguerre(m, -a2);
  auto [probs, bound] = detail::truncated_by_ratio(
      -a2 - std::log(lag),
      [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        return a2 * (static_cast<double>(m) + nd + 1.0) / ((nd + 1.0) * (nd + 1.0));
      },
      tail_tol);
  return PND(spec, m, std::move(probs), true, bound);
}

/// Hypergeometric state: P(n) = C(L eta, n) C(L(1-eta), M-n) / C(L, M),
/// n = 0..M, with real-argument binomial coefficients.
[[nodiscard]] inline PND build_hs(double L, std::uint32_t M, double eta) {
  const StateSpec spec = Hypergeometric{L, M, eta};
  validate(spec);
  const double a = L * eta;
  const double b = L * (1.0 - eta);
  auto probs = detail::normalized_by_ratio(static_cast<std::size_t>(M) + 1, [&](std::size_t n) {
    const double nd = static_cast<double>(n);
    return (a - nd) / (nd + 1.0) * static_cast<double>(M - n) / (b - static_cast<double>(M) + nd + 1.0);
  });
  return PND(spec, 0, std::move(probs), false, 0.0);
}

/// Builds the distribution of any state. tail_tol applies to the
/// infinite-support families only.
[[nodiscard]] inline PND build(const StateSpec& spec, double tail_tol = kDefaultTailTol) {
  struct V {
    double tol;
    PND operator()(const Binomial& s) const { return build_binomial(s.p, s.M); }
    PND operator()(const GeneralizedBinomial& s) const { return build_gbs(s.N, s.alpha, s.beta); }
    PND operator()(const ReciprocalBinomial& s) const { return build_rbs(s.N, s.theta); }
    PND operator()(const NegativeBinomial& s) const { return build_nbs(s.eta, s.M, tol); }
    PND operator()(const Geometric& s) const { return build_geometric(s.eta, tol); }
    PND operator()(const PhotonAddedCoherent& s) const { return build_pacs(s.alpha, s.m, tol); }
    PND operator()(const Hypergeometric& s) const { return build_hs(s.L, s.M, s.eta); }
  };
  return std::visit(V{tail_tol}, spec);
}

}  // namespace hoa
