#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gexp/coupling.hpp"
#include "gexp/harnack.hpp"
#include "gexp/kernels.hpp"
#include "gexp/simulate.hpp"

namespace gexp::cli {

namespace {

double parse_real(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw std::invalid_argument("cannot parse " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

Grid1D GridOptions::grid() const {
  if (dt) return Grid1D(xmin, xmax, nx, FixedDt{*dt});
  return Grid1D(xmin, xmax, nx, AutoCfl{safety});
}

McConfig McOptions::config(std::uint64_t seed) const {
  McConfig mc;
  mc.n_paths = paths;
  mc.n_steps = steps;
  mc.seed = seed;
  mc.validate();
  return mc;
}

VolatilityBand parse_band(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) {
    double v = parse_real(s, "band");
    return VolatilityBand(v, v);
  }
  return VolatilityBand(parse_real(s.substr(0, comma), "band"),
                        parse_real(s.substr(comma + 1), "band"));
}

GsdeKind parse_kind(const std::string& s) {
  if (s == "qv") return GsdeKind::QvDriven;
  if (s == "time") return GsdeKind::TimeDriven;
  throw std::invalid_argument("unknown SDE kind '" + s + "' (qv | time)");
}

GsdeSpec parse_drift(const std::string& id, GsdeKind kind, std::optional<double> k) {
  auto spec = [&]() -> GsdeSpec {
    if (id == "zero") return GsdeSpec::zero(kind);
    if (id == "ou") return GsdeSpec::ou(kind);
    if (id.rfind("const:", 0) == 0) return GsdeSpec::constant(parse_real(id.substr(6), "drift"), kind);
    if (id.rfind("tanh:", 0) == 0) return GsdeSpec::tanh(parse_real(id.substr(5), "drift"), kind);
    throw std::invalid_argument("unknown drift '" + id + "' (zero | const:c | ou | tanh:K)");
  }();
  return k ? spec.with_lipschitz(*k) : spec;
}

std::vector<TestFunction> parse_payoffs(const std::vector<std::string>& ids) {
  std::vector<TestFunction> out;
  for (const auto& id : ids) {
    if (id == "all") {
      for (auto& f : catalog::all()) out.push_back(std::move(f));
    } else {
      out.push_back(catalog::by_id(id));
    }
  }
  if (out.empty()) throw std::invalid_argument("no payoff given");
  return out;
}

Outcome run_gheat(const GheatOptions& o, const CommonOptions&) {
  const VolatilityBand band = parse_band(o.model.band);
  const Equation eq = o.model.kind == "gheat"
                          ? Equation::g_heat()
                          : Equation::of(parse_drift(o.model.drift, parse_kind(o.model.kind),
                                                     o.model.k));
  PdeSolution sol = solve(eq, catalog::by_id(o.payoff), band, o.horizon, o.grid.grid());
  Interval safe = padded_interval(sol.grid, band, o.horizon);
  Outcome out;
  out.report = {{"equation", eq.name()},
                {"payoff", o.payoff},
                {"reliable_interval", {safe.lo, safe.hi}},
                {"solution", to_json(sol)}};
  out.csv = [sol](std::ostream& os) { sol.write_csv(os); };
  return out;
}

Outcome run_pbar(const PbarOptions& o, const CommonOptions& c) {
  const VolatilityBand band = parse_band(o.model.band);
  const GsdeSpec spec = parse_drift(o.model.drift, parse_kind(o.model.kind), o.model.k);
  const TestFunction payoff = catalog::by_id(o.payoff);
  if (o.method != "pde" && o.method != "mc" && o.method != "both") {
    throw std::invalid_argument("unknown method '" + o.method + "' (pde | mc | both)");
  }
  Outcome out;
  out.report = {{"drift", spec.name()}, {"kind", to_string(spec.kind())}, {"payoff", payoff.id()}};
  std::optional<double> pde;
  std::optional<PbarEstimate> mc;
  if (o.method != "mc") {
    const Grid1D grid = o.grid.grid();
    pde = pbar_pde(spec, payoff, o.x, o.horizon, band, grid);
    out.report["pde"] = {{"value", *pde},
                         {"tolerance", kPdeRelTolerance},
                         {"truncation_change",
                          truncation_change(spec, payoff, o.x, o.horizon, band, grid)}};
  }
  if (o.method != "pde") {
    auto scenarios = make_scenario_lattice(band, o.horizon, o.mc.pieces, o.mc.levels);
    mc = pbar_mc(spec, payoff, o.x, o.horizon, scenarios, o.mc.config(c.seed), c.exec());
    out.report["mc"] = to_json(*mc);
  }
  if (pde && mc) {
    // The lattice value is a lower estimate of the sup; equality is expected
    // only when the band is degenerate.
    const double budget =
        kPdeRelTolerance * std::max(1.0, std::abs(*pde)) + 3.0 * mc->argmax_std_error();
    const double diff = mc->value - *pde;
    const bool upper_ok = diff <= budget;
    const bool lower_ok = !band.degenerate() || -diff <= budget;
    out.pass = upper_ok && lower_ok;
    out.report["cross_check"] = {{"mc_minus_pde", diff},
                                 {"budget", budget},
                                 {"two_sided", band.degenerate()},
                                 {"pass", out.pass}};
  }
  auto report = out.report;
  out.csv = [report, pde, mc](std::ostream& os) {
    os << "method,value,std_error,detail\n";
    if (pde) os << "pde," << csv_real(*pde) << ",0," << report["drift"].get<std::string>() << '\n';
    if (mc) {
      os << "mc," << csv_real(mc->value) << ',' << csv_real(mc->argmax_std_error()) << ','
         << mc->argmax_scenario << '\n';
    }
  };
  return out;
}

Outcome run_harnack(const HarnackOptions& o, const CommonOptions& c, bool shift) {
  const VolatilityBand band = parse_band(o.model.band);
  const GsdeSpec spec = parse_drift(o.model.drift, shift ? GsdeKind::TimeDriven : GsdeKind::QvDriven,
                                    o.model.k);
  BackendConfig cfg;
  if (o.method == "pde") {
    cfg.method = Backend::Pde;
  } else if (o.method == "mc") {
    cfg.method = Backend::Mc;
  } else {
    throw std::invalid_argument("unknown method '" + o.method + "' (pde | mc)");
  }
  cfg.grid = o.grid.grid();
  cfg.mc = o.mc.config(c.seed);
  cfg.pieces = o.mc.pieces;
  cfg.levels = o.mc.levels;
  cfg.exponent_form = exponent_form_from_string(o.exponent);
  cfg.exec = c.exec();

  CertificateSweep sweep;
  sweep.payoffs = parse_payoffs(o.payoffs);
  sweep.ps = o.ps;
  sweep.horizons = o.horizons;
  sweep.x = o.x;
  if (o.sweep > 0) {
    sweep.offsets = linspace(0.0, 1.0, o.sweep);
    sweep.include_swapped = !shift;
  } else {
    for (double t : o.targets) sweep.offsets.push_back(shift ? t : t - o.x);
    sweep.include_swapped = false;
  }
  auto certs = shift ? shift_harnack_grid(spec, band, sweep, cfg)
                     : harnack_grid(spec, band, sweep, cfg);
  Outcome out;
  out.pass = count_failures(certs) == 0;
  Json arr = Json::array();
  for (const auto& cert : certs) arr.push_back(to_json(cert));
  out.report = {{"certificates", std::move(arr)},
                {"count", certs.size()},
                {"failures", count_failures(certs)},
                {"authoritative", cfg.method == Backend::Pde}};
  out.csv = [certs](std::ostream& os) { write_certificates_csv(os, certs); };
  return out;
}

Outcome run_coupling_cmd(const CouplingCliOptions& o, const CommonOptions& c) {
  const VolatilityBand band = parse_band(o.model.band);
  const GsdeSpec spec = parse_drift(o.model.drift, GsdeKind::QvDriven, o.model.k);
  const TestFunction payoff = catalog::by_id(o.payoff);
  const McConfig mc = o.mc.config(c.seed);
  auto scenarios = make_scenario_lattice(band, o.horizon, o.mc.pieces, o.mc.levels);
  CouplingOptions copt;
  copt.keep_paths = !o.paths_csv.empty();

  auto reps = run_coupling_lattice(spec, o.x, o.y, o.horizon, scenarios, mc, o.p, payoff,
                                   c.exec(), copt);
  if (!o.paths_csv.empty()) {
    std::ofstream f(o.paths_csv);
    if (!f) throw std::runtime_error("cannot open " + o.paths_csv);
    f << "scenario,path,x_T,y_T,tau,log_density,novikov\n";
    for (const auto& r : reps) {
      for (const auto& p : r.paths) {
        f << r.scenario_id << ',' << p.path << ',' << csv_real(p.x_terminal) << ','
          << csv_real(p.y_terminal) << ',' << csv_real(p.tau) << ',' << csv_real(p.log_density)
          << ',' << csv_real(p.novikov) << '\n';
      }
    }
  }
  Outcome out;
  Json arr = Json::array();
  for (const auto& r : reps) {
    arr.push_back(to_json(r));
    out.pass = out.pass && r.coupling_ok() && r.novikov_ok() && r.girsanov_ok() &&
               r.unit_mean_ok() && mt_moment_check(r).pass;
  }
  out.report = {{"drift", spec.name()}, {"payoff", payoff.id()}, {"scenarios", std::move(arr)}};
  out.csv = [reps](std::ostream& os) { write_coupling_csv(os, reps); };
  return out;
}

Outcome run_kernels(const KernelsOptions& o, const CommonOptions&) {
  KernelSuiteOptions opt;
  opt.mean_mode = mean_mode_from_string(o.mean_mode);
  opt.alpha = o.alpha;
  opt.truncation = o.truncation;
  opt.ex38_nx = o.ex38_nx;
  opt.ex38_ny = o.ex38_ny;
  KernelReport rep = run_kernel_suite(opt);
  Outcome out;
  out.report = {{"kernels", to_json(rep)}};
  out.pass = rep.pass();
  if (o.stationarity) {
    const VolatilityBand band(0.5, 1.0);
    const Grid1D grid(-12.0, 12.0, 481);
    std::vector<double> times;
    for (int t = 1; t <= 8; ++t) times.push_back(t);
    Json st = Json::array();
    for (const auto& f : catalog::all()) {
      auto res = gou_stationarity(f, band, times, grid);
      out.pass = out.pass && res.decreasing && res.flat;
      st.push_back(to_json(res));
    }
    out.report["stationarity"] = {{"band", to_json(band)}, {"results", std::move(st)}};
  }
  Ex38Report ex38 = rep.ex38;
  out.csv = [ex38](std::ostream& os) { write_ex38_csv(os, ex38); };
  return out;
}

Outcome run_axioms(const AxiomsOptions& o, const CommonOptions& c) {
  const VolatilityBand band = parse_band(o.model.band);
  const auto payoffs = parse_payoffs(o.payoffs);
  if (o.backend != "pde" && o.backend != "mc" && o.backend != "both") {
    throw std::invalid_argument("unknown backend '" + o.backend + "' (pde | mc | both)");
  }
  const bool gheat = o.model.kind == "gheat";
  const GsdeSpec spec =
      parse_drift(gheat ? "zero" : o.model.drift, gheat ? GsdeKind::QvDriven : parse_kind(o.model.kind),
                  o.model.k);
  std::vector<AxiomCheck> checks;
  if (o.backend != "mc") {
    const Equation eq = gheat ? Equation::g_heat() : Equation::of(spec);
    auto pde = check_axioms_pde(eq, band, o.horizon, o.grid.grid(), payoffs);
    checks.insert(checks.end(), pde.begin(), pde.end());
  }
  if (o.backend != "pde") {
    auto scenarios = make_scenario_lattice(band, o.horizon, o.mc.pieces, o.mc.levels);
    auto mc = check_axioms_mc(spec, o.x, o.horizon, scenarios, o.mc.config(c.seed), payoffs,
                              c.exec());
    checks.insert(checks.end(), mc.begin(), mc.end());
  }
  Outcome out;
  Json arr = Json::array();
  std::size_t failures = 0;
  for (const auto& ch : checks) {
    arr.push_back(to_json(ch));
    if (!ch.pass) ++failures;
  }
  out.pass = failures == 0;
  out.report = {{"checks", std::move(arr)}, {"count", checks.size()}, {"failures", failures}};
  out.csv = [checks](std::ostream& os) { write_axioms_csv(os, checks); };
  return out;
}

}  // namespace gexp::cli
