#pragma once

// Parameter sweeps over one or two state parameters. Grid points are
// evaluated concurrently; rows come back in grid order with the first axis
// as the outer loop, then by l.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"

#include "hoa/closedform.hpp"
#include "hoa/criteria.hpp"
#include "hoa/errors.hpp"
#include "hoa/io.hpp"
#include "hoa/moments.hpp"
#include "hoa/states.hpp"

namespace hoa {

enum class AxisScale { linear, log };
enum class Method { oracle, closed, both };

struct Axis {
  std::string name;
  double start = 0.0;
  double stop = 1.0;
  std::size_t count = 2;
  AxisScale scale = AxisScale::linear;
};

struct SweepOutputs {
  bool d = true;
  bool A = false;
  std::vector<std::uint32_t> R_m;  // R(l, m) for each listed m
  bool classification = true;
};

struct SweepConfig {
  StateSpec state = Binomial{};
  bool hs_minimal_L = false;  // "L": "min" -- recompute L at every point
  std::vector<Axis> axes;
  std::vector<std::uint32_t> l_values{1};
  SweepOutputs outputs;
  Method method = Method::oracle;
  std::string output_format = "csv";
  double tail_tol = kOracleTailTol;
  std::optional<double> zero_tol;  // absolute; empty = relative default
  double tol = kDefaultCrosscheckTol;
};

[[nodiscard]] inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::closed: return "closed";
    case Method::both: return "both";
  }
  return "?";
}

[[nodiscard]] inline Method parse_method(std::string_view s) {
  if (s == "oracle") return Method::oracle;
  if (s == "closed") return Method::closed;
  if (s == "both") return Method::both;
  throw DomainError("method must be oracle, closed or both, got '" + std::string(s) + "'");
}

[[nodiscard]] inline std::vector<double> axis_values(const Axis& a) {
  if (a.count < 2) throw DomainError("axis '" + a.name + "': count must be >= 2");
  if (!std::isfinite(a.start) || !std::isfinite(a.stop)) throw DomainError("axis '" + a.name + "': bounds must be finite");
  std::vector<double> v(a.count);
  const double last = static_cast<double>(a.count - 1);
  if (a.scale == AxisScale::log) {
    if (!(a.start > 0.0 && a.stop > 0.0)) throw DomainError("axis '" + a.name + "': log scale needs positive bounds");
    const double l0 = std::log(a.start);
    const double l1 = std::log(a.stop);
    for (std::size_t i = 0; i < a.count; ++i) v[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / last);
  } else {
    for (std::size_t i = 0; i < a.count; ++i) v[i] = a.start + (a.stop - a.start) * static_cast<double>(i) / last;
  }
  v.front() = a.start;
  v.back() = a.stop;
  return v;
}

inline void validate(const SweepConfig& c) {
  if (c.axes.size() > 2) throw DomainError("sweep: at most 2 axes");
  for (const auto& a : c.axes) {
    if (!has_param(c.state, a.name)) {
      throw DomainError("sweep: state " + std::string(family_name(c.state)) + " has no parameter '" + a.name + "'");
    }
    if (c.hs_minimal_L && a.name == "L") throw DomainError("sweep: L cannot be swept when fixed to its minimum");
    (void)axis_values(a);
  }
  if (c.axes.size() == 2 && c.axes[0].name == c.axes[1].name) throw DomainError("sweep: axes must differ");
  if (c.l_values.empty()) throw DomainError("sweep: l_values is empty");
  for (auto l : c.l_values) {
    if (l < 1) throw ConstraintError("sweep: l values must be >= 1");
  }
  for (auto m : c.outputs.R_m) {
    if (m < 1) throw ConstraintError("sweep: R(l,m) needs m >= 1");
  }
  if (c.hs_minimal_L && !std::holds_alternative<Hypergeometric>(c.state)) throw DomainError("sweep: \"L\": \"min\" needs the hs state");
  if (!(c.tail_tol > 0.0)) throw DomainError("sweep: tail_tol must be > 0");
  if (c.zero_tol && !(*c.zero_tol >= 0.0)) throw DomainError("sweep: zero_tol must be >= 0");
  if (c.output_format != "csv" && c.output_format != "json") throw DomainError("sweep: output_format must be csv or json");
}

/// One (grid point, l) result. Values are empty where not requested or where
/// evaluation failed; `status` is "ok" or the collected error messages.
struct SweepRow {
  std::vector<double> axis_values;
  std::uint32_t l = 1;
  std::optional<double> d_oracle;
  std::optional<double> d_closed;
  std::optional<double> abs_dev;
  std::optional<double> rel_dev;
  std::optional<bool> agree;
  std::optional<double> A;
  std::vector<std::optional<double>> R;
  std::optional<Classification> classification;
  std::string status = "ok";
};

namespace detail {

inline std::string error_status(const std::exception& e) {
  if (dynamic_cast<const ConstraintError*>(&e)) return std::string("constraint: ") + e.what();
  if (dynamic_cast<const DomainError*>(&e)) return std::string("domain: ") + e.what();
  if (dynamic_cast<const UndefinedCriterionError*>(&e)) return std::string("undefined: ") + e.what();
  if (dynamic_cast<const NumericalError*>(&e)) return std::string("numerical: ") + e.what();
  return std::string("error: ") + e.what();
}

inline void add_status(std::string& status, const std::string& msg) {
  if (status == "ok") status = msg;
  else status += "; " + msg;
}

template <class F>
void parallel_for(std::size_t n, F&& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline StateSpec point_spec(const SweepConfig& c, const std::vector<double>& values) {
  StateSpec s = c.state;
  for (std::size_t a = 0; a < c.axes.size(); ++a) {
    double v = values[a];
    for (const auto& p : param_info(s)) {
      if (p.name == c.axes[a].name && p.integer) v = std::round(v);
    }
    set_param(s, c.axes[a].name, v);
  }
  if (c.hs_minimal_L) {
    auto& hs = std::get<Hypergeometric>(s);
    hs.L = hs_minimal_L(hs.M, hs.eta);
  }
  return s;
}

inline std::vector<SweepRow> evaluate_point(const SweepConfig& c, const std::vector<double>& values) {
  std::vector<SweepRow> rows(c.l_values.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].axis_values = values;
    rows[i].l = c.l_values[i];
    rows[i].R.assign(c.outputs.R_m.size(), std::nullopt);
  }
  std::optional<StateSpec> spec;
  try {
    spec = point_spec(c, values);
    validate(*spec);
  } catch (const std::exception& e) {
    for (auto& r : rows) add_status(r.status, error_status(e));
    return rows;
  }

  const std::uint32_t l_top = *std::max_element(c.l_values.begin(), c.l_values.end());
  const bool want_oracle = c.method != Method::closed || c.outputs.A || !c.outputs.R_m.empty();
  const bool want_mean = c.outputs.classification && !c.zero_tol;
  std::optional<PND> pnd;
  std::optional<MomentVector> mv;
  if (want_oracle || want_mean) {
    try {
      pnd = build(*spec, want_oracle ? c.tail_tol : kDefaultTailTol);
      mv = moment_vector(*pnd, want_oracle ? l_top + 1 : 1);
    } catch (const std::exception& e) {
      for (auto& r : rows) add_status(r.status, error_status(e));
    }
  }

  for (auto& r : rows) {
    const std::uint32_t l = r.l;
    const double lp1 = static_cast<double>(l) + 1.0;
    if (mv && want_oracle) {
      const double mean = mv->normal[1];
      if (c.method != Method::closed) r.d_oracle = mv->normal[l + 1] - std::pow(mean, lp1);
      if (c.outputs.A) {
        const double den = mv->normal[l] * mean;
        if (den != 0.0) r.A = mv->normal[l + 1] / den - 1.0;
        else add_status(r.status, "undefined: A has a zero denominator");
      }
      for (std::size_t k = 0; k < c.outputs.R_m.size(); ++k) {
        const std::uint32_t m = c.outputs.R_m[k];
        if (m > l) {
          add_status(r.status, "constraint: R(l,m) needs m <= l");
          continue;
        }
        const double den = mv->normal[l] * mv->normal[m];
        if (den != 0.0) r.R[k] = mv->normal[l + 1] * mv->normal[m - 1] / den - 1.0;
        else add_status(r.status, "undefined: R has a zero denominator");
      }
    }
    if (c.method != Method::oracle) {
      try {
        r.d_closed = d_closed(*spec, l);
      } catch (const std::exception& e) {
        add_status(r.status, error_status(e));
      }
    }
    if (r.d_oracle && r.d_closed) {
      r.abs_dev = std::abs(*r.d_oracle - *r.d_closed);
      r.rel_dev = *r.abs_dev == 0.0 ? 0.0 : *r.abs_dev / std::abs(*r.d_oracle);
      const double zt = mv ? default_zero_tol(mv->normal[1], l) : 0.0;
      r.agree = std::isfinite(*r.d_closed) && (*r.rel_dev <= c.tol || *r.abs_dev <= zt);
    }
    const std::optional<double> d = r.d_oracle ? r.d_oracle : r.d_closed;
    if (c.outputs.classification && d) {
      if (c.zero_tol) r.classification = classify(*d, *c.zero_tol);
      else if (mv) r.classification = classify(*d, default_zero_tol(mv->normal[1], l));
    }
  }
  return rows;
}

}  // namespace detail

/// Evaluates every grid point; per-point failures land in the status column.
[[nodiscard]] inline std::vector<SweepRow> run_sweep(const SweepConfig& c) {
  validate(c);
  std::vector<std::vector<double>> points;
  if (c.axes.empty()) {
    points.emplace_back();
  } else if (c.axes.size() == 1) {
    for (double v : axis_values(c.axes[0])) points.push_back({v});
  } else {
    const auto outer = axis_values(c.axes[0]);
    const auto inner = axis_values(c.axes[1]);
    for (double a : outer) {
      for (double b : inner) points.push_back({a, b});
    }
  }
  std::vector<std::vector<SweepRow>> per_point(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) { per_point[i] = detail::evaluate_point(c, points[i]); });
  std::vector<SweepRow> rows;
  rows.reserve(points.size() * c.l_values.size());
  for (auto& pr : per_point) {
    for (auto& r : pr) rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {
inline io::json opt_json(const std::optional<double>& v) { return io::number_or_null(v); }
}  // namespace detail

/// Long-format table: one row per grid point and l.
[[nodiscard]] inline io::Table sweep_table(const SweepConfig& c, const std::vector<SweepRow>& rows) {
  io::Table t;
  for (const auto& a : c.axes) t.columns.push_back(a.name);
  t.columns.push_back("l");
  const bool oracle = c.outputs.d && c.method != Method::closed;
  const bool closed = c.outputs.d && c.method != Method::oracle;
  const bool both = oracle && closed;
  if (oracle) t.columns.push_back("d_oracle");
  if (closed) t.columns.push_back("d_closed");
  if (both) {
    for (const char* n : {"abs_dev", "rel_dev", "agree"}) t.columns.push_back(n);
  }
  if (c.outputs.A) t.columns.push_back("A");
  for (auto m : c.outputs.R_m) t.columns.push_back("R_m" + std::to_string(m));
  if (c.outputs.classification) t.columns.push_back("classification");
  t.columns.push_back("status");

  for (const auto& r : rows) {
    std::vector<io::json> cells;
    for (std::size_t a = 0; a < c.axes.size(); ++a) cells.push_back(r.axis_values[a]);
    cells.push_back(r.l);
    if (oracle) cells.push_back(detail::opt_json(r.d_oracle));
    if (closed) cells.push_back(detail::opt_json(r.d_closed));
    if (both) {
      cells.push_back(detail::opt_json(r.abs_dev));
      cells.push_back(detail::opt_json(r.rel_dev));
      cells.push_back(r.agree ? io::json(*r.agree) : io::json(nullptr));
    }
    if (c.outputs.A) cells.push_back(detail::opt_json(r.A));
    for (const auto& v : r.R) cells.push_back(detail::opt_json(v));
    if (c.outputs.classification) {
      cells.push_back(r.classification ? io::json(std::string(to_string(*r.classification))) : io::json(nullptr));
    }
    cells.push_back(r.status);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// --------------------------------------------------------------------------
// JSON config

[[nodiscard]] inline Axis axis_from_json(const io::json& j) {
  Axis a;
  a.name = j.at("name").get<std::string>();
  a.start = j.at("start").get<double>();
  a.stop = j.at("stop").get<double>();
  a.count = j.at("count").get<std::size_t>();
  const std::string scale = j.value("scale", "linear");
  if (scale == "linear") a.scale = AxisScale::linear;
  else if (scale == "log") a.scale = AxisScale::log;
  else throw DomainError("axis scale must be linear or log");
  return a;
}

/// {"state": "hs", "params": {"M": 10, "eta": 0.5, "L": "min"},
///  "axes": [{"name": "eta", "start": 0.1, "stop": 0.9, "count": 9}],
///  "l_values": [1, 2], "outputs": {"d": true, "A": false, "R": [1], "classification": true},
///  "method": "both", "output_format": "csv", "tail_tol": 1e-30, "zero_tol": "relative", "tol": 1e-9}
[[nodiscard]] inline SweepConfig sweep_config_from_json(const io::json& j) {
  static constexpr std::array<std::string_view, 10> kKeys = {"state", "params", "axes", "l_values", "outputs",
                                                              "method", "output_format", "tail_tol", "tol", "zero_tol"};
  if (!j.is_object()) throw DomainError("sweep config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) throw DomainError("unknown sweep config key '" + key + "'");
  }
  SweepConfig c;
  io::json state = io::json{{"state", j.at("state")}};
  if (j.contains("params")) {
    io::json params = j.at("params");
    if (params.contains("L") && params.at("L").is_string()) {
      if (params.at("L").get<std::string>() != "min") throw DomainError("params.L must be a number or \"min\"");
      c.hs_minimal_L = true;
      params.erase("L");
    }
    state["params"] = params;
  }
  c.state = io::state_from_json(state);
  if (c.hs_minimal_L && std::holds_alternative<Hypergeometric>(c.state)) {
    auto& hs = std::get<Hypergeometric>(c.state);
    hs.L = hs_minimal_L(hs.M, hs.eta);
  }
  if (j.contains("axes")) {
    for (const auto& a : j.at("axes")) c.axes.push_back(axis_from_json(a));
  }
  if (j.contains("l_values")) c.l_values = j.at("l_values").get<std::vector<std::uint32_t>>();
  if (j.contains("outputs")) {
    const auto& o = j.at("outputs");
    if (!o.is_object()) throw DomainError("outputs must be an object with keys d, A, R, classification");
    c.outputs.d = o.value("d", true);
    c.outputs.A = o.value("A", false);
    if (o.contains("R")) c.outputs.R_m = o.at("R").get<std::vector<std::uint32_t>>();
    c.outputs.classification = o.value("classification", true);
  }
  if (j.contains("method")) c.method = parse_method(j.at("method").get<std::string>());
  c.output_format = j.value("output_format", "csv");
  c.tail_tol = j.value("tail_tol", kOracleTailTol);
  c.tol = j.value("tol", kDefaultCrosscheckTol);
  if (j.contains("zero_tol")) {
    const auto& z = j.at("zero_tol");
    if (z.is_number()) c.zero_tol = z.get<double>();
    else if (!(z.is_string() && z.get<std::string>() == "relative")) throw DomainError("zero_tol must be a number or \"relative\"");
  }
  validate(c);
  return c;
}

}  // namespace hoa
