#pragma once

// Text and JSON encodings for states, distributions, criterion results,
// discrepancy reports and Monte Carlo estimates. Floats are written with 17
// significant digits so every double round-trips exactly; CSV follows
// RFC 4180 quoting with LF line endings.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hoa/closedform.hpp"
#include "hoa/criteria.hpp"
#include "hoa/errors.hpp"
#include "hoa/montecarlo.hpp"
#include "hoa/states.hpp"

namespace hoa::io {

using json = nlohmann::json;

[[nodiscard]] inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[nodiscard]] inline double parse_double(std::string_view s) {
  const std::string str(s);
  if (str == "nan") return std::nan("");
  if (str == "inf") return INFINITY;
  if (str == "-inf") return -INFINITY;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &pos);
  } catch (const std::exception&) {
    throw DomainError("not a number: '" + str + "'");
  }
  if (pos != str.size()) throw DomainError("not a number: '" + str + "'");
  return v;
}

[[nodiscard]] inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

/// Non-finite values are written as JSON null.
[[nodiscard]] inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

[[nodiscard]] inline json number_or_null(const std::optional<double>& x) {
  return x ? number_or_null(*x) : json(nullptr);
}

// --------------------------------------------------------------------------
// StateSpec

[[nodiscard]] inline json params_json(const StateSpec& s) {
  json j = json::object();
  for (const auto& p : param_info(s)) {
    const double v = get_param(s, p.name);
    if (p.integer) j[std::string(p.name)] = static_cast<std::uint64_t>(v);
    else j[std::string(p.name)] = v;
  }
  return j;
}

/// "p=0.5;M=10" -- compact parameter list used inside CSV rows.
[[nodiscard]] inline std::string params_string(const StateSpec& s) {
  std::string out;
  for (const auto& p : param_info(s)) {
    if (!out.empty()) out += ';';
    out += std::string(p.name) + '=' + format_double(get_param(s, p.name));
  }
  return out;
}

[[nodiscard]] inline json to_json(const StateSpec& s) {
  return json{{"state", std::string(family_name(s))}, {"params", params_json(s)}};
}

/// Reads {"state": "<family>", "params": {...}}; missing parameters keep
/// their family defaults.
[[nodiscard]] inline StateSpec state_from_json(const json& j) {
  if (!j.is_object() || !j.contains("state")) throw DomainError("state JSON needs a 'state' field");
  StateSpec s = make_family(j.at("state").get<std::string>());
  if (j.contains("params")) {
    for (const auto& [key, val] : j.at("params").items()) {
      if (!val.is_number()) throw DomainError("parameter '" + key + "' must be numeric");
      set_param(s, key, val.get<double>());
    }
  }
  return s;
}

// --------------------------------------------------------------------------
// PhotonNumberDistribution

[[nodiscard]] inline json to_json(const PND& pnd) {
  json j = to_json(pnd.source());
  j["n_min"] = pnd.n_min();
  j["probs"] = std::vector<double>(pnd.probs().begin(), pnd.probs().end());
  j["truncated"] = pnd.truncated();
  j["tail_bound"] = pnd.tail_bound();
  return j;
}

[[nodiscard]] inline PND pnd_from_json(const json& j) {
  StateSpec s = state_from_json(j);
  return PND(std::move(s), j.at("n_min").get<std::size_t>(), j.at("probs").get<std::vector<double>>(),
             j.at("truncated").get<bool>(), j.at("tail_bound").get<double>());
}

[[nodiscard]] inline std::string to_csv(const PND& pnd) {
  std::string out = "n,probability\n";
  const auto probs = pnd.probs();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    out += std::to_string(pnd.n_min() + i) + ',' + format_double(probs[i]) + '\n';
  }
  return out;
}

/// Parses the `n,probability` table. The CSV form carries no state metadata,
/// so the caller supplies the source spec and truncation fields.
[[nodiscard]] inline PND pnd_from_csv(std::string_view text, StateSpec source, bool truncated = false,
                                      double tail_bound = 0.0) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "n,probability") throw DomainError("PND CSV: missing 'n,probability' header");
  std::vector<double> probs;
  std::size_t n_min = 0;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw DomainError("PND CSV: malformed row '" + line + "'");
    const auto n = static_cast<std::size_t>(std::stoull(line.substr(0, comma)));
    if (first) {
      n_min = n;
      first = false;
    } else if (n != n_min + probs.size()) {
      throw DomainError("PND CSV: photon numbers must be contiguous");
    }
    probs.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  return PND(std::move(source), n_min, std::move(probs), truncated, tail_bound);
}

// --------------------------------------------------------------------------
// Criteria, moments

[[nodiscard]] inline json to_json(const CriterionResult& r) {
  json j{{"l", r.l},
         {"d", number_or_null(r.d)},
         {"A", number_or_null(r.A)},
         {"R", number_or_null(r.R)},
         {"lm", r.lm ? json::array({r.lm->first, r.lm->second}) : json(nullptr)},
         {"classification", std::string(to_string(r.classification))},
         {"zero_tol", r.zero_tol}};
  j["truncation_warning"] = r.truncation_warning;
  j["signs_agree"] = r.signs_agree ? json(*r.signs_agree) : json(nullptr);
  return j;
}

[[nodiscard]] inline json to_json(const MomentVector& mv) {
  return json{{"max_order", mv.max_order},
              {"normal", mv.normal},
              {"antinormal", mv.antinormal},
              {"truncation_warning", mv.truncation_warning}};
}

// --------------------------------------------------------------------------
// Discrepancy reports

inline constexpr std::string_view kDiscrepancyHeader = "state,params,l,d_oracle,d_closed,abs_dev,rel_dev,agree,note";

[[nodiscard]] inline std::string to_csv(const DiscrepancyReport& rep) {
  std::string out(kDiscrepancyHeader);
  out += '\n';
  for (const auto& r : rep.rows) {
    out += csv_field(family_name(r.state)) + ',' + csv_field(params_string(r.state)) + ',' + std::to_string(r.l) +
           ',' + format_double(r.d_oracle) + ',' + format_double(r.d_closed) + ',' + format_double(r.abs_dev) + ',' +
           format_double(r.rel_dev) + ',' + (r.agree ? "true" : "false") + ',' + csv_field(r.note) + '\n';
  }
  return out;
}

[[nodiscard]] inline json to_json(const DiscrepancyRow& r) {
  json j = to_json(r.state);
  j["l"] = r.l;
  j["d_oracle"] = number_or_null(r.d_oracle);
  j["d_closed"] = number_or_null(r.d_closed);
  j["abs_dev"] = number_or_null(r.abs_dev);
  j["rel_dev"] = number_or_null(r.rel_dev);
  j["tol"] = r.tol;
  j["zero_tol"] = r.zero_tol;
  j["agree"] = r.agree;
  j["note"] = r.note;
  return j;
}

[[nodiscard]] inline json to_json(const DiscrepancyReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back(to_json(r));
  return json{{"rows", rows}, {"agree", rep.agree_count()}, {"disagree", rep.disagree_count()}};
}

// --------------------------------------------------------------------------
// Monte Carlo

[[nodiscard]] inline json to_json(const mc::Histogram& h) {
  return json{{"n_min", h.n_min}, {"counts", h.counts}, {"total", h.total()}};
}

[[nodiscard]] inline json to_json(const mc::MCEstimate& e) {
  return json{{"l", e.l},
              {"d_hat", number_or_null(e.d_hat)},
              {"stderr", number_or_null(e.std_error)},
              {"n_samples", e.n_samples},
              {"seed", e.seed},
              {"bootstrap_resamples", e.bootstrap_resamples},
              {"degenerate", e.degenerate}};
}

// --------------------------------------------------------------------------
// Generic tables (sweeps, figure datasets)

/// Column-labelled rows of JSON scalars: numbers, strings, booleans or null.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

[[nodiscard]] inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_string()) return csv_field(v.get<std::string>());
  return csv_field(v.dump());
}

[[nodiscard]] inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += csv_field(t.columns[c]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += csv_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

[[nodiscard]] inline json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < row.size() && c < t.columns.size(); ++c) obj[t.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  return json{{"columns", t.columns}, {"rows", rows}};
}

}  // namespace hoa::io
