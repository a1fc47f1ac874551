// Subcommand options and their implementations.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gexp/execution.hpp"
#include "gexp/gheat.hpp"
#include "report.hpp"

namespace gexp::cli {

struct CommonOptions {
  std::string format = "json";
  std::string out;
  bool sequential = false;
  int threads = 0;
  std::uint64_t seed = 20240601;

  Execution exec() const { return {threads, sequential}; }
};

struct ModelOptions {
  std::string kind = "qv";
  std::string drift = "zero";
  std::optional<double> k;
  std::string band = "1,1";

  static ModelOptions with(std::string kind, std::string drift = "zero") {
    ModelOptions m;
    m.kind = std::move(kind);
    m.drift = std::move(drift);
    return m;
  }
};

struct GridOptions {
  double xmin = -10.0;
  double xmax = 10.0;
  int nx = 401;
  double safety = 0.9;
  std::optional<double> dt;

  Grid1D grid() const;
};

struct McOptions {
  std::size_t paths = 10000;
  std::size_t steps = 256;
  std::size_t pieces = 2;
  std::size_t levels = 3;

  McConfig config(std::uint64_t seed) const;
};

struct GheatOptions {
  ModelOptions model = ModelOptions::with("gheat");
  std::string payoff = "sigmoid";
  double horizon = 1.0;
  GridOptions grid;
};

struct PbarOptions {
  ModelOptions model;
  std::string payoff = "sigmoid";
  double horizon = 1.0;
  double x = 0.0;
  std::string method = "both";
  GridOptions grid;
  McOptions mc;
};

struct HarnackOptions {
  ModelOptions model = ModelOptions::with("qv", "ou");
  std::vector<std::string> payoffs{"sigmoid"};
  std::vector<double> ps{2.0};
  std::vector<double> horizons{1.0};
  double x = 0.0;
  std::vector<double> targets{0.5};  // y for harnack, v for shift-harnack
  std::size_t sweep = 0;             // > 0: targets = sweep points of [0, 1]
  std::string method = "pde";
  std::string exponent = "printed";
  GridOptions grid;
  McOptions mc;
};

struct CouplingCliOptions {
  ModelOptions model = ModelOptions::with("qv", "ou");
  std::string payoff = "sigmoid";
  double x = 0.0;
  double y = 1.0;
  double horizon = 1.0;
  double p = 2.0;
  McOptions mc{10000, 4096, 2, 3};
  std::string paths_csv;
};

struct KernelsOptions {
  std::string mean_mode = "ou-consistent";
  double alpha = 2.0;
  double truncation = 8.0;
  std::size_t ex38_nx = 41;
  std::size_t ex38_ny = 121;
  bool stationarity = true;
};

struct AxiomsOptions {
  ModelOptions model;
  std::vector<std::string> payoffs{"all"};
  double horizon = 1.0;
  double x = 0.0;
  std::string backend = "both";
  GridOptions grid;
  McOptions mc{2000, 256, 2, 3};
};

/// Result of one subcommand: the report body, a CSV writer and the verdict.
struct Outcome {
  Json report;
  std::function<void(std::ostream&)> csv;
  bool pass = true;
};

Outcome run_gheat(const GheatOptions& o, const CommonOptions& c);
Outcome run_pbar(const PbarOptions& o, const CommonOptions& c);
Outcome run_harnack(const HarnackOptions& o, const CommonOptions& c, bool shift);
Outcome run_coupling_cmd(const CouplingCliOptions& o, const CommonOptions& c);
Outcome run_kernels(const KernelsOptions& o, const CommonOptions& c);
Outcome run_axioms(const AxiomsOptions& o, const CommonOptions& c);

/// Parsers for the serializable identifiers; all throw std::invalid_argument.
VolatilityBand parse_band(const std::string& s);
GsdeKind parse_kind(const std::string& s);
GsdeSpec parse_drift(const std::string& id, GsdeKind kind, std::optional<double> k);
std::vector<TestFunction> parse_payoffs(const std::vector<std::string>& ids);

}  // namespace gexp::cli
