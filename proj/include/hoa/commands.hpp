#pragma once

// Command-line front end. run_cli() parses argv, runs one subcommand and
// returns the process exit code: 0 success, 1 usage or I/O error,
// 2 constraint or domain error, 3 numerical error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hoa/closedform.hpp"
#include "hoa/criteria.hpp"
#include "hoa/errors.hpp"
#include "hoa/figures.hpp"
#include "hoa/io.hpp"
#include "hoa/montecarlo.hpp"
#include "hoa/states.hpp"
#include "hoa/sweep.hpp"

namespace hoa::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kConstraint = 2, kNumerical = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parameter flags shared by every state-taking subcommand.
struct StateFlags {
  std::string state;
  std::optional<double> p, alpha, beta, theta, eta;
  std::optional<double> M, N, m;
  std::string L;

  void attach(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--state", state, "binomial, gbs, rbs, nbs, geometric, pacs or hs");
    if (required) opt->required();
    app->add_option("--p", p, "binomial success probability");
    app->add_option("--M", M, "photon cap (binomial, hs) or added photons (nbs)");
    app->add_option("--N", N, "photon cap (gbs, rbs)");
    app->add_option("--alpha", alpha, "gbs shape or pacs amplitude");
    app->add_option("--beta", beta, "gbs shape");
    app->add_option("--theta", theta, "rbs phase");
    app->add_option("--eta", eta, "nbs, geometric or hs probability");
    app->add_option("--m", m, "pacs added photons");
    app->add_option("--L", L, "hs population, a number or 'min'");
  }

  [[nodiscard]] bool any_param() const { return p || alpha || beta || theta || eta || M || N || m || !L.empty(); }

  [[nodiscard]] StateSpec spec() const {
    StateSpec s;
    try {
      s = make_family(state);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    auto put = [&](const char* name, const std::optional<double>& v) {
      if (!v) return;
      if (!has_param(s, name)) throw UsageError("state " + std::string(family_name(s)) + " has no parameter '" + name + "'");
      set_param(s, name, *v);
    };
    put("p", p);
    put("M", M);
    put("N", N);
    put("alpha", alpha);
    put("beta", beta);
    put("theta", theta);
    put("eta", eta);
    put("m", m);
    if (!L.empty()) {
      if (!has_param(s, "L")) throw UsageError("state " + std::string(family_name(s)) + " has no parameter 'L'");
      auto& hs = std::get<Hypergeometric>(s);
      if (L == "min") hs.L = hs_minimal_L(hs.M, hs.eta);
      else set_param(s, "L", io::parse_double(L));
    }
    return s;
  }
};

inline void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

inline std::string dump(const io::json& j) { return j.dump(2) + "\n"; }

inline void require_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

// --------------------------------------------------------------------------
// Default cross-check grids

[[nodiscard]] inline std::vector<StateSpec> crosscheck_grid(std::string_view family) {
  std::vector<StateSpec> g;
  const StateSpec probe = make_family(family);
  if (std::holds_alternative<Binomial>(probe)) {
    for (double p : {0.1, 0.25, 0.5, 0.75, 0.9}) {
      for (std::uint32_t M : {2u, 5u, 10u, 25u}) g.push_back(Binomial{p, M});
    }
  } else if (std::holds_alternative<GeneralizedBinomial>(probe)) {
    for (std::uint32_t N : {3u, 10u, 25u}) {
      for (double a : {-0.5, 0.0, 1.0, 2.0, 10.0}) {
        for (double b : {-0.5, 0.0, 1.0, 5.0}) g.push_back(GeneralizedBinomial{N, a, b});
      }
    }
  } else if (std::holds_alternative<ReciprocalBinomial>(probe)) {
    for (std::uint32_t N : {0u, 1u, 2u, 5u, 10u}) g.push_back(ReciprocalBinomial{N, 0.0});
  } else if (std::holds_alternative<NegativeBinomial>(probe)) {
    for (double eta : {0.25, 0.5, 0.75, 1.0}) {
      for (std::uint32_t M : {0u, 1u, 5u}) g.push_back(NegativeBinomial{eta, M});
    }
  } else if (std::holds_alternative<Geometric>(probe)) {
    for (double eta : {0.25, 0.5, 0.75}) g.push_back(Geometric{eta});
  } else if (std::holds_alternative<PhotonAddedCoherent>(probe)) {
    for (double a : {0.5, 1.0, 2.0}) {
      for (std::uint32_t m : {0u, 1u, 5u}) g.push_back(PhotonAddedCoherent{a, m});
    }
  } else {
    for (std::uint32_t M : {2u, 5u, 10u}) {
      for (double eta : {0.2, 0.5, 0.8}) {
        const double lmin = hs_minimal_L(M, eta);
        for (double L : {lmin, 10.0 * lmin}) g.push_back(Hypergeometric{L, M, eta});
      }
    }
  }
  return g;
}

/// Cross-checks every grid spec at l = 1..min(l_max, closed-form cap).
[[nodiscard]] inline DiscrepancyReport crosscheck_family(std::string_view family, std::uint32_t l_max, double tol,
                                                         double tail_tol) {
  const auto grid = crosscheck_grid(family);
  std::vector<DiscrepancyReport> parts(grid.size());
  std::vector<std::string> errors(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    std::uint32_t l = l_max;
    if (auto cap = max_closed_order(grid[i])) l = std::min(l, *cap);
    if (l < 1) return;
    parts[i] = crosscheck(grid[i], l, tol, tail_tol);
  });
  DiscrepancyReport rep;
  for (const auto& p : parts) rep.append(p);
  return rep;
}

// --------------------------------------------------------------------------
// Subcommands

struct Options {
  StateFlags state;
  std::string out;
  std::string format;
  std::uint32_t l = 1;
  std::optional<std::uint32_t> lee_m;
  std::optional<double> tail_tol;
  std::optional<double> zero_tol;
  double tol = kDefaultCrosscheckTol;
  std::uint32_t lmax = 5;
  bool all = false;
  bool oracle = false;
  std::vector<std::string> axes;
  std::string figure;
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t samples = 1'000'000;
  std::uint32_t resamples = mc::kDefaultResamples;
  bool histogram = false;
};

inline int cmd_eval(const Options& o, std::ostream& out) {
  const StateSpec spec = o.state.spec();
  validate(spec);
  if (o.l < 1) throw ConstraintError("--l must be >= 1");
  if (auto cap = max_closed_order(spec); cap && o.l > *cap) {
    throw ConstraintError("order l = " + std::to_string(o.l) + " violates the physical condition of " +
                          std::string(family_name(spec)) + " (l <= " + std::to_string(*cap) + ")");
  }
  const PND pnd = build(spec, o.tail_tol.value_or(kOracleTailTol));
  const CriterionResult r = evaluate_criteria(pnd, o.l, o.lee_m, o.zero_tol);
  io::json j = io::to_json(spec);
  j.update(io::to_json(r));
  j["mean"] = mean_photon_number(pnd);
  j["d_closed"] = io::number_or_null(d_closed(spec, o.l));
  write_output(dump(j), o.out, out);
  return kOk;
}

inline int cmd_pnd(const Options& o, std::ostream& out) {
  const std::string format = o.format.empty() ? "json" : o.format;
  require_format(format);
  const StateSpec spec = o.state.spec();
  const PND pnd = build(spec, o.tail_tol.value_or(kDefaultTailTol));
  write_output(format == "csv" ? io::to_csv(pnd) : dump(io::to_json(pnd)), o.out, out);
  return kOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  std::ifstream f(o.config, std::ios::binary);
  if (!f) throw UsageError("cannot read config '" + o.config + "'");
  io::json j;
  try {
    j = io::json::parse(f);
  } catch (const io::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  SweepConfig c;
  try {
    c = sweep_config_from_json(j);
  } catch (const io::json::exception& e) {
    throw UsageError(std::string("malformed sweep config: ") + e.what());
  }
  if (!o.format.empty()) {
    require_format(o.format);
    c.output_format = o.format;
  }
  if (o.tail_tol) c.tail_tol = *o.tail_tol;
  const io::Table t = sweep_table(c, run_sweep(c));
  write_output(c.output_format == "csv" ? io::to_csv(t) : dump(io::to_json(t)), o.out, out);
  return kOk;
}

inline int cmd_figure(const Options& o, std::ostream& out) {
  const std::string format = o.format.empty() ? "csv" : o.format;
  require_format(format);
  FigurePreset f;
  try {
    f = figure_preset(o.figure);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  if (o.oracle) f.sweep.method = Method::oracle;
  if (o.tail_tol) f.sweep.tail_tol = *o.tail_tol;
  for (const auto& a : o.axes) override_axis(f, parse_axis(a));
  validate(f.sweep);
  const io::Table t = figure_table(f);
  if (format == "csv") {
    write_output(io::to_csv(t), o.out, out);
  } else {
    io::json j = io::to_json(t);
    j["figure"] = f.id;
    j["title"] = f.title;
    j["method"] = std::string(to_string(f.sweep.method));
    write_output(dump(j), o.out, out);
  }
  return kOk;
}

inline int cmd_crosscheck(const Options& o, std::ostream& out, std::ostream& err) {
  const std::string format = o.format.empty() ? "csv" : o.format;
  require_format(format);
  if (o.all == !o.state.state.empty()) throw UsageError("crosscheck needs exactly one of --state or --all");
  if (o.lmax < 1) throw ConstraintError("--lmax must be >= 1");
  const double tail_tol = o.tail_tol.value_or(kOracleTailTol);
  DiscrepancyReport rep;
  if (o.all) {
    for (auto fam : family_names()) rep.append(crosscheck_family(fam, o.lmax, o.tol, tail_tol));
  } else if (o.state.any_param()) {
    rep = crosscheck(o.state.spec(), o.lmax, o.tol, tail_tol);
  } else {
    try {
      (void)make_family(o.state.state);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    rep = crosscheck_family(o.state.state, o.lmax, o.tol, tail_tol);
  }
  write_output(format == "csv" ? io::to_csv(rep) : dump(io::to_json(rep)), o.out, out);
  std::ostream& summary = (o.out.empty() || o.out == "-") ? err : out;
  summary << "crosscheck: " << rep.rows.size() << " rows, " << rep.agree_count() << " agree, " << rep.disagree_count()
          << " disagree\n";
  return kOk;
}

inline int cmd_mc(const Options& o, std::ostream& out) {
  const StateSpec spec = o.state.spec();
  validate(spec);
  if (o.samples < 1) throw DomainError("--samples must be >= 1");
  const PND pnd = build(spec, o.tail_tol.value_or(kOracleTailTol));
  const mc::Histogram h = mc::sample_pnd(pnd, o.samples, o.seed);
  const mc::MCEstimate est = mc::estimate_d(h, o.l, o.resamples, o.seed);
  io::json j = io::to_json(spec);
  j.update(io::to_json(est));
  j["d_exact"] = io::number_or_null(d_criterion(pnd, o.l));
  if (o.histogram) j["histogram"] = io::to_json(h);
  write_output(dump(j), o.out, out);
  return kOk;
}

// --------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Higher-order antibunching criteria for intermediate states"};
  app.require_subcommand(1);
  Options o;

  auto* eval = app.add_subcommand("eval", "evaluate d(l), A_l and optionally R(l,m) for one state");
  o.state.attach(eval);
  eval->add_option("--l", o.l, "criterion order")->required();
  eval->add_option("--lee-m", o.lee_m, "m of R(l,m)");
  eval->add_option("--zero-tol", o.zero_tol, "absolute zero tolerance for the classification");

  auto* pnd = app.add_subcommand("pnd", "dump a photon-number distribution");
  o.state.attach(pnd);

  auto* sweep = app.add_subcommand("sweep", "run a JSON-configured parameter sweep");
  sweep->add_option("config", o.config, "sweep config file")->required();

  auto* figure = app.add_subcommand("figure", "write a figure dataset (fig1..fig10)");
  figure->add_option("figure", o.figure, "figure id")->required();
  figure->add_flag("--oracle", o.oracle, "use moment sums instead of closed forms");
  figure->add_option("--axis", o.axes, "override an axis: name=start:stop:count[:log]");

  auto* cross = app.add_subcommand("crosscheck", "compare closed forms with moment sums over default grids");
  o.state.attach(cross, false);
  cross->add_flag("--all", o.all, "every state family");
  cross->add_option("--lmax", o.lmax, "highest order");
  cross->add_option("--tol", o.tol, "relative agreement tolerance");

  auto* mcs = app.add_subcommand("mc", "Monte Carlo photon-counting estimate of d(l)");
  o.state.attach(mcs);
  mcs->add_option("--l", o.l, "criterion order")->required();
  mcs->add_option("--samples", o.samples, "number of photon counts");
  mcs->add_option("--seed", o.seed, "64-bit seed");
  mcs->add_option("--resamples", o.resamples, "bootstrap resamples");
  mcs->add_flag("--histogram", o.histogram, "include the sampled histogram");

  for (auto* sub : {eval, pnd, sweep, figure, cross, mcs}) {
    sub->add_option("--out", o.out, "output path (default stdout)");
    sub->add_option("--tail-tol", o.tail_tol, "tail tolerance for truncated distributions");
    if (sub != eval && sub != mcs) sub->add_option("--format", o.format, "csv or json");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*eval) return cmd_eval(o, out);
    if (*pnd) return cmd_pnd(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*figure) return cmd_figure(o, out);
    if (*cross) return cmd_crosscheck(o, out, err);
    if (*mcs) return cmd_mc(o, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const UndefinedCriterionError& e) {
    err << "undefined criterion: " << e.what() << "\n";
    return kNumerical;
  } catch (const ConstraintError& e) {
    err << "constraint error: " << e.what() << "\n";
    return kConstraint;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kConstraint;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hoa::cli
