#include "report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "gexp/cli.hpp"

namespace gexp::cli {

Json to_json(const VolatilityBand& band) { return Json::array({band.sigma_lo(), band.sigma_hi()}); }

Json to_json(const SchemeMeta& meta) {
  return {{"dt", meta.dt},
          {"steps", meta.steps},
          {"boundary", meta.boundary},
          {"upwind_nodes", meta.upwind_nodes}};
}

Json to_json(const PdeSolution& sol) {
  Json x = Json::array();
  for (int j = 0; j < sol.grid.nx(); ++j) x.push_back(sol.grid.x(j));
  return {{"horizon", sol.horizon},
          {"grid", {{"x_min", sol.grid.x_min()}, {"x_max", sol.grid.x_max()}, {"nx", sol.grid.nx()}}},
          {"scheme", to_json(sol.meta)},
          {"x", std::move(x)},
          {"u", sol.values}};
}

Json to_json(const PbarEstimate& est) {
  Json per = Json::array();
  for (const auto& s : est.per_scenario) {
    per.push_back({{"scenario", s.scenario_id}, {"mean", s.mean}, {"std_error", s.std_error}});
  }
  return {{"value", est.value},
          {"std_error", est.argmax_std_error()},
          {"argmax_scenario", est.argmax_scenario},
          {"n_paths", est.n_paths},
          {"n_steps", est.n_steps},
          {"seed", est.seed},
          {"per_scenario", std::move(per)}};
}

Json to_json(const AxiomCheck& c) {
  return {{"axiom", c.axiom},
          {"backend", c.backend},
          {"detail", c.detail},
          {"worst_violation", c.worst_violation},
          {"tolerance", c.tolerance},
          {"pass", c.pass}};
}

Json to_json(const HarnackCertificate& c) {
  Json j = {{"kind", to_string(c.kind)},
            {"drift", c.drift},
            {"band", to_json(c.band)},
            {"p", c.p},
            {"horizon", c.horizon},
            {"x", c.x}};
  if (c.kind == HarnackKind::Harnack) {
    j["y"] = c.y;
  } else {
    j["v"] = c.shift;
  }
  j["payoff"] = c.payoff_id;
  j["method"] = to_string(c.method);
  j["lhs"] = c.lhs;
  j["rhs"] = c.rhs;
  j["exponent"] = c.exponent;
  if (c.kind == HarnackKind::Harnack) j["exponent_form"] = to_string(c.exponent_form);
  j["tolerance_budget"] = c.tolerance_budget;
  j["margin"] = c.margin();
  j["pass"] = c.pass;
  return j;
}

Json to_json(const MomentCheck& m) {
  return {{"sample_mean", m.sample_mean}, {"std_error", m.std_error}, {"bound", m.bound},
          {"pass", m.pass}};
}

Json to_json(const CouplingReport& r) {
  return {{"scenario", r.scenario_id},
          {"x", r.x},
          {"y", r.y},
          {"p", r.p},
          {"K", r.k},
          {"horizon", r.horizon},
          {"band", to_json(r.band)},
          {"n_paths", r.n_paths},
          {"n_steps", r.n_steps},
          {"seed", r.seed},
          {"coupling_gap", r.coupling_gap},
          {"coupled_fraction", r.coupled_fraction},
          {"mean_tau", r.mean_tau},
          {"eta_defect", r.eta_defect},
          {"novikov_pathwise_max", r.novikov_pathwise_max},
          {"novikov_bound", r.novikov_bound},
          {"novikov_violations", r.novikov_violations},
          {"weighted_mean", r.weighted_mean},
          {"weighted_std_error", r.weighted_se},
          {"direct_mean", r.direct_mean},
          {"direct_std_error", r.direct_se},
          {"girsanov_identity_gap", r.girsanov_identity_gap},
          {"girsanov_combined_std_error", r.girsanov_combined_se},
          {"mt_mean", r.mt_mean},
          {"mt_mean_std_error", r.mt_mean_se},
          {"mt_moment", r.mt_moment},
          {"mt_moment_std_error", r.mt_moment_se},
          {"mt_moment_bound", r.mt_moment_bound},
          {"checks",
           {{"coupling", r.coupling_ok()},
            {"novikov", r.novikov_ok()},
            {"girsanov", r.girsanov_ok()},
            {"unit_mean", r.unit_mean_ok()},
            {"moment", mt_moment_check(r).pass}}}};
}

Json to_json(const DominanceResult& d) {
  return {{"checked", d.checked},
          {"violations", d.violations},
          {"worst_ratio", d.worst_ratio},
          {"worst_theta", d.worst_theta},
          {"worst_x", d.worst_x},
          {"worst_z", d.worst_z}};
}

Json to_json(const LowerBoundRow& r) {
  return {{"x", r.x},     {"y", r.y},     {"alpha", r.alpha},        {"truncation", r.truncation},
          {"lhs", r.lhs}, {"rhs", r.rhs}, {"margin", r.margin()}};
}

Json to_json(const SupKernelRow& r) {
  return {{"payoff", r.payoff_id},
          {"x", r.x},
          {"sup_value", r.sup_value},
          {"kernel_value", r.kernel_value},
          {"pass", r.pass}};
}

Json to_json(const DualBoundRow& r) {
  return {{"payoff", r.payoff_id}, {"x", r.x},     {"alpha", r.alpha},
          {"lhs", r.lhs},          {"rhs", r.rhs}, {"pass", r.pass}};
}

Json to_json(const Ex38Report& rep) {
  Json rows = Json::array();
  for (const auto& r : rep.rows) {
    rows.push_back(Json::array({r.x, r.y, r.lhs, r.rhs, r.violated}));
  }
  Json j = {{"mean_mode", to_string(rep.mean_mode)},
            {"points", rep.rows.size()},
            {"violations", rep.violations}};
  if (rep.violations > 0) {
    j["violation_box"] = {{"x", {rep.violation_x_min, rep.violation_x_max}},
                          {"y", {rep.violation_y_min, rep.violation_y_max}}};
  }
  j["psum_checked"] = rep.psum_checked;
  j["psum_violations"] = rep.psum_violations;
  j["origin"] = {{"lhs", rep.origin_lhs},
                 {"rhs", rep.origin_rhs},
                 {"lhs_minus_rhs", rep.origin_lhs - rep.origin_rhs}};
  j["columns"] = {"x", "y", "lhs", "rhs", "violated"};
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const StationarityResult& s) {
  return {{"payoff", s.payoff_id},
          {"times", s.times},
          {"sup_differences", s.sup_differences},
          {"final_spread", s.final_spread},
          {"decreasing", s.decreasing},
          {"flat", s.flat}};
}

Json to_json(const KernelReport& rep) {
  Json qi = Json::object(), mi = Json::object();
  for (const auto& [id, gap] : rep.quasi_invariance_gap) qi[id] = gap;
  for (const auto& [id, gap] : rep.member_invariance_gap) mi[id] = gap;
  Json lb = Json::array(), sk = Json::array(), db = Json::array();
  for (const auto& r : rep.lower_bound) lb.push_back(to_json(r));
  for (const auto& r : rep.sup_kernel) sk.push_back(to_json(r));
  for (const auto& r : rep.dual_bound) db.push_back(to_json(r));
  return {{"mean_mode", to_string(rep.mean_mode)},
          {"truncation", rep.truncation},
          {"dominance", to_json(rep.dominance)},
          {"quasi_invariance_gap", {{"tolerance", rep.gap_tol}, {"by_payoff", std::move(qi)}}},
          {"member_invariance_gap",
           {{"tolerance", rep.invariance_tol}, {"by_payoff", std::move(mi)}}},
          {"lower_bound", std::move(lb)},
          {"sup_kernel", std::move(sk)},
          {"dual_bound", std::move(db)},
          {"ex38", to_json(rep.ex38)},
          {"pass", rep.pass()}};
}

std::string csv_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& os, const Json& config) {
  os << "# gexp " << kVersion << " schema=" << kSchemaVersion << " config=" << config.dump()
     << "\n";
}

namespace {

std::string quoted(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_axioms_csv(std::ostream& os, std::span<const AxiomCheck> checks) {
  os << "axiom,backend,detail,worst_violation,tolerance,pass\n";
  for (const auto& c : checks) {
    os << c.axiom << ',' << c.backend << ',' << quoted(c.detail) << ','
       << csv_real(c.worst_violation) << ',' << csv_real(c.tolerance) << ','
       << (c.pass ? 1 : 0) << '\n';
  }
}

void write_certificates_csv(std::ostream& os, std::span<const HarnackCertificate> certs) {
  os << "kind,drift,sigma_lo,sigma_hi,p,T,x,y,v,payoff,method,lhs,rhs,exponent,"
        "tolerance_budget,margin,pass\n";
  for (const auto& c : certs) {
    os << to_string(c.kind) << ',' << quoted(c.drift) << ',' << csv_real(c.band.sigma_lo()) << ','
       << csv_real(c.band.sigma_hi()) << ',' << csv_real(c.p) << ',' << csv_real(c.horizon)
       << ',' << csv_real(c.x) << ',' << csv_real(c.y) << ',' << csv_real(c.shift) << ','
       << quoted(c.payoff_id) << ',' << to_string(c.method) << ',' << csv_real(c.lhs) << ','
       << csv_real(c.rhs) << ',' << csv_real(c.exponent) << ',' << csv_real(c.tolerance_budget)
       << ',' << csv_real(c.margin()) << ',' << (c.pass ? 1 : 0) << '\n';
  }
}

void write_coupling_csv(std::ostream& os, std::span<const CouplingReport> reps) {
  os << "scenario,coupling_gap,coupled_fraction,novikov_max,novikov_bound,novikov_violations,"
        "weighted_mean,direct_mean,girsanov_gap,girsanov_se,mt_mean,mt_mean_se,mt_moment,"
        "mt_moment_se,mt_moment_bound,pass\n";
  for (const auto& r : reps) {
    bool pass = r.coupling_ok() && r.novikov_ok() && r.girsanov_ok() && r.unit_mean_ok() &&
                mt_moment_check(r).pass;
    os << quoted(r.scenario_id) << ',' << csv_real(r.coupling_gap) << ','
       << csv_real(r.coupled_fraction) << ',' << csv_real(r.novikov_pathwise_max) << ','
       << csv_real(r.novikov_bound) << ',' << r.novikov_violations << ','
       << csv_real(r.weighted_mean) << ',' << csv_real(r.direct_mean) << ','
       << csv_real(r.girsanov_identity_gap) << ',' << csv_real(r.girsanov_combined_se) << ','
       << csv_real(r.mt_mean) << ',' << csv_real(r.mt_mean_se) << ',' << csv_real(r.mt_moment)
       << ',' << csv_real(r.mt_moment_se) << ',' << csv_real(r.mt_moment_bound) << ','
       << (pass ? 1 : 0) << '\n';
  }
}

void write_ex38_csv(std::ostream& os, const Ex38Report& rep) {
  os << "x,y,lhs,rhs,violated\n";
  for (const auto& r : rep.rows) {
    os << csv_real(r.x) << ',' << csv_real(r.y) << ',' << csv_real(r.lhs) << ','
       << csv_real(r.rhs) << ',' << (r.violated ? 1 : 0) << '\n';
  }
}

}  // namespace gexp::cli
