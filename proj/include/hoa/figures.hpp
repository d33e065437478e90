#pragma once

// Preset sweeps that regenerate the datasets behind figures fig1..fig10.
// Axis ranges are reconstructions; every axis can be overridden.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hoa/errors.hpp"
#include "hoa/io.hpp"
#include "hoa/states.hpp"
#include "hoa/sweep.hpp"

namespace hoa {

/// One output column of a wide figure table: scale * d(l).
struct FigureSeries {
  std::uint32_t l = 1;
  double scale = 1.0;
  std::string label;
};

struct FigurePreset {
  std::string id;
  std::string title;
  SweepConfig sweep;
  std::vector<FigureSeries> series;
};

namespace detail {
inline Axis linear_axis(std::string name, double start, double stop, std::size_t count) {
  return Axis{std::move(name), start, stop, count, AxisScale::linear};
}
inline FigureSeries plain_series(std::uint32_t l) { return {l, 1.0, "d_" + std::to_string(l)}; }

inline FigurePreset make_preset(std::string id, std::string title, StateSpec state, std::vector<Axis> axes,
                                std::vector<FigureSeries> series) {
  FigurePreset f;
  f.id = std::move(id);
  f.title = std::move(title);
  f.sweep.state = std::move(state);
  f.sweep.axes = std::move(axes);
  f.sweep.method = Method::closed;
  f.sweep.outputs.classification = false;
  for (const auto& s : series) f.sweep.l_values.push_back(s.l);
  f.sweep.l_values.erase(f.sweep.l_values.begin());  // drop the default l = 1
  f.series = std::move(series);
  return f;
}
}  // namespace detail

[[nodiscard]] inline std::vector<std::string_view> figure_ids() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
}

[[nodiscard]] inline FigurePreset figure_preset(std::string_view id) {
  using detail::linear_axis;
  using detail::make_preset;
  using detail::plain_series;
  if (id == "fig1") {
    return make_preset("fig1", "d_GBS(8), d_GBS(9) vs N at alpha=2, beta=1", GeneralizedBinomial{10, 2.0, 1.0},
                       {linear_axis("N", 10, 100, 91)}, {plain_series(8), plain_series(9)});
  }
  if (id == "fig2") {
    return make_preset("fig2", "d_GBS(2) vs alpha and N at beta=1", GeneralizedBinomial{3, 0.0, 1.0},
                       {linear_axis("alpha", 0, 20, 41), linear_axis("N", 3, 60, 58)}, {plain_series(2)});
  }
  if (id == "fig3") {
    return make_preset("fig3", "d_GBS(2) vs beta and N at alpha=10", GeneralizedBinomial{3, 10.0, 0.0},
                       {linear_axis("beta", 0, 20, 41), linear_axis("N", 3, 60, 58)}, {plain_series(2)});
  }
  if (id == "fig4") {
    return make_preset("fig4", "d_RBS(8), d_RBS(9) vs N", ReciprocalBinomial{10, 0.0}, {linear_axis("N", 10, 100, 91)},
                       {plain_series(8), plain_series(9)});
  }
  if (id == "fig5") {
    return make_preset("fig5", "d_NBS(8) vs eta and M", NegativeBinomial{0.5, 9},
                       {linear_axis("eta", 0.05, 1.0, 20), linear_axis("M", 9, 30, 22)}, {plain_series(8)});
  }
  if (id == "fig6") {
    return make_preset("fig6", "d_NBS(8) vs eta at M=10", NegativeBinomial{0.5, 10}, {linear_axis("eta", 0.05, 1.0, 96)},
                       {plain_series(8)});
  }
  if (id == "fig7") {
    return make_preset("fig7", "d_GS(8), d_GS(9), d_GS(10) vs eta", Geometric{0.5}, {linear_axis("eta", 0.05, 0.999, 100)},
                       {plain_series(8), plain_series(9), plain_series(10)});
  }
  if (id == "fig8") {
    return make_preset("fig8", "d_PACS(4) vs alpha and m", PhotonAddedCoherent{1.0, 1},
                       {linear_axis("alpha", 0.1, 3.0, 30), linear_axis("m", 1, 20, 20)}, {plain_series(4)});
  }
  if (id == "fig9") {
    return make_preset("fig9", "10*d_PACS(3) and d_PACS(4) vs alpha at m=15", PhotonAddedCoherent{1.0, 15},
                       {linear_axis("alpha", 0.1, 3.0, 30)}, {{3, 10.0, "10*d_3"}, plain_series(4)});
  }
  if (id == "fig10") {
    auto f = make_preset("fig10", "d_HS(8) vs eta and M at minimal L", Hypergeometric{hs_minimal_L(9, 0.5), 9, 0.5},
                         {linear_axis("eta", 0.1, 0.9, 17), linear_axis("M", 9, 20, 12)}, {plain_series(8)});
    f.sweep.hs_minimal_L = true;
    return f;
  }
  throw DomainError("unknown figure '" + std::string(id) + "' (expected fig1..fig10)");
}

/// Replaces the preset axis of the same name; adds a new axis if there is room.
inline void override_axis(FigurePreset& f, const Axis& a) {
  for (auto& existing : f.sweep.axes) {
    if (existing.name == a.name) {
      existing = a;
      return;
    }
  }
  if (f.sweep.axes.size() >= 2) throw DomainError("figure " + f.id + " has no axis '" + a.name + "' and already sweeps two");
  f.sweep.axes.push_back(a);
}

/// Parses "name=start:stop:count[:log]".
[[nodiscard]] inline Axis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw DomainError("axis must look like name=start:stop:count[:log]");
  Axis a;
  a.name = std::string(text.substr(0, eq));
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text.substr(eq + 1)) {
    if (ch == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  if (parts.size() < 3 || parts.size() > 4) throw DomainError("axis must look like name=start:stop:count[:log]");
  a.start = io::parse_double(parts[0]);
  a.stop = io::parse_double(parts[1]);
  const double count = io::parse_double(parts[2]);
  if (!(count >= 2.0) || count != static_cast<double>(static_cast<std::size_t>(count))) {
    throw DomainError("axis count must be an integer >= 2");
  }
  a.count = static_cast<std::size_t>(count);
  if (parts.size() == 4) {
    if (parts[3] == "log") a.scale = AxisScale::log;
    else if (parts[3] == "linear") a.scale = AxisScale::linear;
    else throw DomainError("axis scale must be linear or log");
  }
  return a;
}

/// Wide table: axis columns, one column per series, then status.
[[nodiscard]] inline io::Table figure_table(const FigurePreset& f) {
  const auto rows = run_sweep(f.sweep);
  const std::size_t per_point = f.sweep.l_values.size();
  io::Table t;
  for (const auto& a : f.sweep.axes) t.columns.push_back(a.name);
  for (const auto& s : f.series) t.columns.push_back(s.label);
  t.columns.push_back("status");
  for (std::size_t i = 0; i < rows.size(); i += per_point) {
    std::vector<io::json> cells;
    for (double v : rows[i].axis_values) cells.push_back(v);
    std::string status = "ok";
    for (std::size_t k = 0; k < per_point; ++k) {
      const auto& r = rows[i + k];
      const auto d = f.sweep.method == Method::closed ? r.d_closed : r.d_oracle;
      cells.push_back(d ? io::number_or_null(f.series[k].scale * *d) : io::json(nullptr));
      if (r.status != "ok") detail::add_status(status, "l=" + std::to_string(r.l) + ": " + r.status);
    }
    cells.push_back(status);
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace hoa
