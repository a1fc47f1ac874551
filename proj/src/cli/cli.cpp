#include "gexp/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "commands.hpp"

namespace gexp {

namespace {

using cli::Json;

constexpr std::uint64_t kDefaultSeed = 20240601;

// Registers options on a subcommand and remembers how to serialize their
// resolved values, in registration order.
class Recorder {
 public:
  explicit Recorder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* option(const std::string& name, T& value, const std::string& help) {
    fields_.emplace_back(name, [&value] { return Json(value); });
    return app_->add_option("--" + name, value, help)->capture_default_str();
  }

  CLI::Option* option(const std::string& name, std::optional<double>& value,
                      const std::string& help) {
    fields_.emplace_back(name, [&value] { return value ? Json(*value) : Json(nullptr); });
    return app_->add_option("--" + name, value, help);
  }

  template <typename T>
  CLI::Option* list(const std::string& name, std::vector<T>& value, const std::string& help) {
    fields_.emplace_back(name, [&value] { return Json(value); });
    return app_->add_option("--" + name, value, help)->delimiter(',')->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& value, const std::string& help) {
    fields_.emplace_back(name, [&value] { return Json(value); });
    return app_->add_flag("--" + name, value, help);
  }

  Json dump(const std::string& command) const {
    Json flags = Json::object();
    for (const auto& [name, get] : fields_) flags[name] = get();
    return {{"command", command}, {"flags", std::move(flags)}};
  }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<Json()>>> fields_;
};

struct Subcommand {
  CLI::App* app;
  std::unique_ptr<Recorder> rec;
};

void add_common(Recorder& r, CLI::App* app, cli::CommonOptions& c, std::string& config_path) {
  r.option("format", c.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  r.option("seed", c.seed, "Random seed (default from GEXP_SEED)");
  r.option("threads", c.threads, "Worker threads (0 = all available)");
  r.flag("sequential", c.sequential, "Single worker; bit-exact reductions");
  // Destination and config file are not part of the recorded configuration.
  app->add_option("--out", c.out, "Write the report to this path instead of stdout");
  app->add_option("--config", config_path, "key = value configuration file");
}

void add_model(Recorder& r, cli::ModelOptions& m, bool with_kind, bool allow_gheat) {
  if (with_kind) {
    auto* kind = r.option("kind", m.kind, "Equation kind");
    if (allow_gheat) {
      kind->check(CLI::IsMember({"gheat", "qv", "time"}));
    } else {
      kind->check(CLI::IsMember({"qv", "time"}));
    }
  }
  r.option("drift", m.drift, "Drift id: zero | const:c | ou | tanh:K");
  r.option("K", m.k, "Lipschitz constant (default: the drift's own)");
  r.option("band", m.band, "Volatility band lo,hi");
}

void add_grid(Recorder& r, cli::GridOptions& g) {
  r.option("xmin", g.xmin, "Left end of the PDE domain");
  r.option("xmax", g.xmax, "Right end of the PDE domain");
  r.option("nx", g.nx, "PDE grid nodes");
  r.option("safety", g.safety, "CFL safety factor");
  r.option("dt", g.dt, "Fixed time step (default: CFL-limited)");
}

void add_mc(Recorder& r, cli::McOptions& m) {
  r.option("paths", m.paths, "Monte Carlo paths");
  r.option("steps", m.steps, "Time steps per path (power of two)");
  r.option("pieces", m.pieces, "Scenario lattice pieces");
  r.option("levels", m.levels, "Scenario lattice levels per piece");
}

// Appends `--key=value` for every config-file entry whose flag was not given
// on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  auto given = [&](const std::string& key) {
    for (const auto& a : args) {
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    }
    return false;
  };
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int lineno = 0;
  std::vector<std::string> extra;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--config",
                                 path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "config" || key == "out" || given(key)) continue;
    extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("GEXP_SEED");
  if (!env || !*env) return kDefaultSeed;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(env, &used);
    if (used == std::string(env).size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string("GEXP_SEED is not an unsigned integer: ") + env);
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sublinear expectations, nonlinear semigroups and Harnack inequalities", "gexp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("gexp ") + kVersion);

  cli::CommonOptions common;
  std::string config_path;
  cli::GheatOptions gheat;
  cli::PbarOptions pbar;
  cli::HarnackOptions harnack;
  cli::HarnackOptions shift;
  shift.model.kind = "time";
  cli::CouplingCliOptions coupling;
  cli::KernelsOptions kernels;
  cli::AxiomsOptions axioms;

  try {
    common.seed = default_seed();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::map<std::string, Subcommand> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Recorder& {
    CLI::App* sub = app.add_subcommand(name, help);
    auto& s = subs[name];
    s.app = sub;
    s.rec = std::make_unique<Recorder>(sub);
    add_common(*s.rec, sub, common, config_path);
    return *s.rec;
  };

  {
    Recorder& r = make("gheat", "Solve the nonlinear PDE and dump u(T, x)");
    add_model(r, gheat.model, true, true);
    r.option("payoff", gheat.payoff, "Payoff id")->required();
    r.option("T", gheat.horizon, "Horizon");
    add_grid(r, gheat.grid);
  }
  {
    Recorder& r = make("pbar", "Semigroup value by PDE and/or worst-case Monte Carlo");
    add_model(r, pbar.model, true, false);
    r.option("payoff", pbar.payoff, "Payoff id")->required();
    r.option("T", pbar.horizon, "Horizon");
    r.option("x", pbar.x, "Starting point");
    r.option("method", pbar.method, "pde | mc | both");
    add_grid(r, pbar.grid);
    add_mc(r, pbar.mc);
  }
  for (auto* opts : {&harnack, &shift}) {
    const bool is_shift = opts == &shift;
    Recorder& r = make(is_shift ? "shift-harnack" : "harnack",
                       is_shift ? "Shift-Harnack certificates" : "Harnack certificates");
    add_model(r, opts->model, false, false);
    r.list("payoff", opts->payoffs, "Payoff ids (comma list or 'all')");
    r.list("p", opts->ps, "Exponents p > 1");
    r.list("T", opts->horizons, "Horizons");
    r.option("x", opts->x, "Starting point");
    r.list(is_shift ? "v" : "y", opts->targets, is_shift ? "Shifts" : "Second points");
    r.option("sweep", opts->sweep,
             is_shift ? "Use N evenly spaced shifts in [0,1]"
                      : "Use y = x + d for N evenly spaced d in [0,1], and the swapped pairs");
    r.option("method", opts->method, "pde | mc");
    if (!is_shift) r.option("exponent", opts->exponent, "Exponent form: printed | holder");
    add_grid(r, opts->grid);
    add_mc(r, opts->mc);
  }
  {
    Recorder& r = make("coupling", "Coupling by change of measure, per lattice scenario");
    add_model(r, coupling.model, false, false);
    r.option("payoff", coupling.payoff, "Payoff id for the Girsanov identity");
    r.option("x", coupling.x, "Start of X");
    r.option("y", coupling.y, "Start of Y");
    r.option("T", coupling.horizon, "Horizon");
    r.option("p", coupling.p, "Moment exponent p > 1");
    add_mc(r, coupling.mc);
    subs["coupling"].app->add_option("--paths-csv", coupling.paths_csv,
                                     "Write per-path diagnostics to this CSV file");
  }
  {
    Recorder& r = make("kernels", "Sup-kernel checks, quasi-invariance and the density probe");
    r.option("mean-mode", kernels.mean_mode, "ou-consistent | as-printed")
        ->check(CLI::IsMember({"ou-consistent", "as-printed"}));
    r.option("alpha", kernels.alpha, "Harnack exponent alpha > 1");
    r.option("Z", kernels.truncation, "Truncation radius");
    r.option("ex38-nx", kernels.ex38_nx, "Probe grid points in x");
    r.option("ex38-ny", kernels.ex38_ny, "Probe grid points in y");
    r.option("stationarity", kernels.stationarity, "Include the G-OU stationarity fixture");
  }
  {
    Recorder& r = make("axioms", "Sublinear-expectation axioms for both backends");
    add_model(r, axioms.model, true, true);
    r.list("payoff", axioms.payoffs, "Payoff ids (comma list or 'all')");
    r.option("T", axioms.horizon, "Horizon");
    r.option("x", axioms.x, "Starting point for the MC backend");
    r.option("backend", axioms.backend, "pde | mc | both");
    add_grid(r, axioms.grid);
    add_mc(r, axioms.mc);
  }

  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    for (auto* sub : app.get_subcommands()) out << sub->help();
    return kExitPass;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << "\n";
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run 'gexp --help' for usage\n";
    return kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  cli::Outcome outcome;
  try {
    if (name == "gheat") outcome = cli::run_gheat(gheat, common);
    if (name == "pbar") outcome = cli::run_pbar(pbar, common);
    if (name == "harnack") outcome = cli::run_harnack(harnack, common, false);
    if (name == "shift-harnack") outcome = cli::run_harnack(shift, common, true);
    if (name == "coupling") outcome = cli::run_coupling_cmd(coupling, common);
    if (name == "kernels") outcome = cli::run_kernels(kernels, common);
    if (name == "axioms") outcome = cli::run_axioms(axioms, common);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const Json config = subs[name].rec->dump(name);
  std::ostringstream body;
  if (common.format == "csv") {
    cli::write_csv_header(body, config);
    outcome.csv(body);
  } else {
    Json doc = {{"schema", kSchemaVersion},
                {"version", std::string("gexp ") + kVersion},
                {"config", config}};
    for (auto& [key, value] : outcome.report.items()) doc[key] = value;
    doc["pass"] = outcome.pass;
    body << doc.dump(2) << "\n";
  }
  if (common.out.empty()) {
    out << body.str();
  } else {
    std::ofstream f(common.out, std::ios::binary);
    if (!f) {
      err << "error: cannot open " << common.out << "\n";
      return kExitUsage;
    }
    f << body.str();
  }
  if (!outcome.pass) err << name << ": at least one check failed\n";
  return outcome.pass ? kExitPass : kExitCheckFailed;
}

}  // namespace gexp
