#include "gexp/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace gexp {

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// VolatilityBand

VolatilityBand::VolatilityBand(double sigma_lo, double sigma_hi)
    : sigma_lo_(sigma_lo), sigma_hi_(sigma_hi) {
  if (!(sigma_lo > 0.0) || !(sigma_hi >= sigma_lo) || !std::isfinite(sigma_hi)) {
    throw std::invalid_argument("volatility band requires 0 < sigma_lo <= sigma_hi, got (" +
                                format_real(sigma_lo) + ", " + format_real(sigma_hi) + ")");
  }
}

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(std::vector<double> breakpoints, std::vector<double> levels,
                   const VolatilityBand& band)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)), band_(band) {
  if (breakpoints_.size() < 2 || levels_.size() + 1 != breakpoints_.size()) {
    throw std::invalid_argument("scenario needs m levels and m+1 breakpoints");
  }
  if (breakpoints_.front() != 0.0) {
    throw std::invalid_argument("scenario breakpoints must start at 0");
  }
  for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] > breakpoints_[i - 1])) {
      throw std::invalid_argument("scenario breakpoints must be strictly increasing");
    }
  }
  for (double v : levels_) {
    if (!(v >= band_.var_lo() && v <= band_.var_hi())) {
      throw std::invalid_argument("scenario level " + format_real(v) + " outside [" +
                                  format_real(band_.var_lo()) + ", " +
                                  format_real(band_.var_hi()) + "]");
    }
  }
  qv_nodes_.resize(breakpoints_.size());
  qv_nodes_[0] = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    qv_nodes_[i + 1] = qv_nodes_[i] + levels_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
}

Scenario Scenario::constant(double level, double horizon, const VolatilityBand& band) {
  return Scenario({0.0, horizon}, {level}, band);
}

namespace {

// Index of the piece containing t (right-continuous; t = T maps to the last piece).
std::size_t piece_index(std::span<const double> breakpoints, double t) {
  auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end() - 1, t);
  return static_cast<std::size_t>(it - (breakpoints.begin() + 1));
}

}  // namespace

double Scenario::level_at(double t) const {
  if (t < 0.0 || t > horizon()) {
    throw std::out_of_range("time " + format_real(t) + " outside [0, " +
                            format_real(horizon()) + "]");
  }
  return levels_[piece_index(breakpoints_, t)];
}

double Scenario::qv_at(double t) const {
  if (t < 0.0 || t > horizon()) {
    throw std::out_of_range("time " + format_real(t) + " outside [0, " +
                            format_real(horizon()) + "]");
  }
  if (t == horizon()) return qv_nodes_.back();
  std::size_t i = piece_index(breakpoints_, t);
  return qv_nodes_[i] + levels_[i] * (t - breakpoints_[i]);
}

bool Scenario::is_constant() const {
  return std::all_of(levels_.begin(), levels_.end(),
                     [&](double v) { return v == levels_.front(); });
}

std::string Scenario::id() const {
  std::string s = "v[";
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i) s += ',';
    s += format_real(levels_[i]);
  }
  s += ']';
  return s;
}

double qv_at(const Scenario& scenario, double t) { return scenario.qv_at(t); }

std::vector<Scenario> make_scenario_lattice(const VolatilityBand& band, double horizon,
                                            int pieces, int levels, std::size_t cap) {
  if (!(horizon > 0.0)) throw std::invalid_argument("lattice horizon must be positive");
  if (pieces < 1 || levels < 1) {
    throw std::invalid_argument("lattice needs pieces >= 1 and levels >= 1");
  }
  if (band.degenerate()) {
    return {Scenario::constant(band.var_hi(), horizon, band)};
  }
  if (levels < 2) {
    throw std::invalid_argument(
        "a non-degenerate band needs levels >= 2 so both extreme scenarios are present");
  }
  // levels^pieces with overflow-safe cap check
  std::size_t count = 1;
  for (int i = 0; i < pieces; ++i) {
    if (count > cap / static_cast<std::size_t>(levels)) {
      throw std::invalid_argument("scenario lattice exceeds cap of " + std::to_string(cap));
    }
    count *= static_cast<std::size_t>(levels);
  }
  if (count > cap) {
    throw std::invalid_argument("scenario lattice exceeds cap of " + std::to_string(cap));
  }

  std::vector<double> values(levels);
  for (int k = 0; k < levels; ++k) {
    values[k] = band.var_lo() + (band.var_hi() - band.var_lo()) * k / (levels - 1);
  }
  values.back() = band.var_hi();
  std::vector<double> breakpoints(pieces + 1);
  for (int i = 0; i <= pieces; ++i) breakpoints[i] = horizon * i / pieces;
  breakpoints.back() = horizon;

  std::vector<Scenario> out;
  out.reserve(count);
  std::vector<int> digits(pieces, 0);
  for (std::size_t n = 0; n < count; ++n) {
    std::vector<double> lv(pieces);
    for (int i = 0; i < pieces; ++i) lv[i] = values[digits[i]];
    out.emplace_back(breakpoints, std::move(lv), band);
    for (int i = pieces - 1; i >= 0; --i) {
      if (++digits[i] < levels) break;
      digits[i] = 0;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// GsdeSpec

const char* to_string(GsdeKind kind) {
  return kind == GsdeKind::QvDriven ? "qv" : "time";
}

namespace {

void spot_check_lipschitz(const RealFunction& drift, double k, const std::string& name) {
  auto check = [&](double x, double y) {
    double bx = drift(x), by = drift(y);
    if (!std::isfinite(bx) || !std::isfinite(by)) {
      throw std::invalid_argument("drift '" + name + "' is not finite at x=" + format_real(x));
    }
    if (std::abs(bx - by) > k * std::abs(x - y) * (1.0 + 1e-9) + 1e-12) {
      throw std::invalid_argument("drift '" + name + "' violates the declared Lipschitz constant " +
                                  format_real(k) + " between " + format_real(x) + " and " +
                                  format_real(y));
    }
  };
  constexpr int n = 400;
  for (int i = 0; i < n; ++i) {
    double x = -10.0 + 20.0 * i / n;
    double next = -10.0 + 20.0 * (i + 1) / n;
    check(x, next);
    check(x, -x);
    check(x, x + 3.0);
  }
}

}  // namespace

GsdeSpec::GsdeSpec(RealFunction drift, double lipschitz_k, GsdeKind kind, std::string name)
    : drift_(std::move(drift)), lipschitz_k_(lipschitz_k), kind_(kind), name_(std::move(name)) {
  if (!drift_) throw std::invalid_argument("drift handle is empty");
  if (!(lipschitz_k >= 0.0) || !std::isfinite(lipschitz_k)) {
    throw std::invalid_argument("Lipschitz constant must be finite and nonnegative");
  }
  spot_check_lipschitz(drift_, lipschitz_k_, name_);
}

GsdeSpec GsdeSpec::zero(GsdeKind kind) {
  return GsdeSpec([](double) { return 0.0; }, 0.0, kind, "zero");
}

GsdeSpec GsdeSpec::constant(double c, GsdeKind kind) {
  return GsdeSpec([c](double) { return c; }, 0.0, kind, "const:" + format_real(c));
}

GsdeSpec GsdeSpec::ou(GsdeKind kind) {
  return GsdeSpec([](double x) { return -x; }, 1.0, kind, "ou");
}

GsdeSpec GsdeSpec::tanh(double k, GsdeKind kind) {
  return GsdeSpec([k](double x) { return -k * std::tanh(x); }, std::abs(k), kind,
                  "tanh:" + format_real(k));
}

GsdeSpec GsdeSpec::with_kind(GsdeKind kind) const {
  GsdeSpec copy = *this;
  copy.kind_ = kind;
  return copy;
}

GsdeSpec GsdeSpec::with_lipschitz(double k) const {
  return GsdeSpec(drift_, k, kind_, name_);
}

// ---------------------------------------------------------------------------
// TestFunction

TestFunction::TestFunction(std::string id, RealFunction eval, bool positive, Convexity convexity,
                           double bound)
    : id_(std::move(id)),
      eval_(std::move(eval)),
      positive_(positive),
      convexity_(convexity),
      bound_(bound) {
  if (!eval_) throw std::invalid_argument("test function handle is empty");
  if (!(bound >= 0.0) || !std::isfinite(bound)) {
    throw std::invalid_argument("test function '" + id_ + "' needs a finite sup-norm bound");
  }
}

TestFunction TestFunction::power(double p) const {
  if (!positive_) {
    throw std::invalid_argument("power of non-positive test function '" + id_ + "'");
  }
  auto f = eval_;
  Convexity c = (p >= 1.0 && convexity_ == Convexity::Convex) ? Convexity::Convex
                                                              : Convexity::Neither;
  return TestFunction(id_ + "^" + format_real(p), [f, p](double x) { return std::pow(f(x), p); },
                      true, c, std::pow(bound_, p));
}

TestFunction TestFunction::shifted(double shift) const {
  auto f = eval_;
  return TestFunction(id_ + "(" + format_real(shift) + "+.)",
                      [f, shift](double x) { return f(shift + x); }, positive_, convexity_,
                      bound_);
}

TestFunction TestFunction::scaled(double factor) const {
  auto f = eval_;
  Convexity c = convexity_;
  if (factor < 0.0) {
    c = convexity_ == Convexity::Convex    ? Convexity::Concave
        : convexity_ == Convexity::Concave ? Convexity::Convex
                                           : Convexity::Neither;
  }
  return TestFunction(format_real(factor) + "*" + id_,
                      [f, factor](double x) { return factor * f(x); },
                      positive_ && factor >= 0.0, c, std::abs(factor) * bound_);
}

TestFunction TestFunction::negated() const {
  TestFunction out = scaled(-1.0);
  out.id_ = "-" + id_;
  return out;
}

TestFunction TestFunction::plus_constant(double c) const {
  auto f = eval_;
  return TestFunction(id_ + "+" + format_real(c), [f, c](double x) { return f(x) + c; },
                      positive_ && c >= 0.0, convexity_, bound_ + std::abs(c));
}

TestFunction TestFunction::sum(const TestFunction& a, const TestFunction& b) {
  auto f = a.eval_;
  auto g = b.eval_;
  Convexity c = a.convexity_ == b.convexity_ ? a.convexity_ : Convexity::Neither;
  return TestFunction(a.id_ + "+" + b.id_, [f, g](double x) { return f(x) + g(x); },
                      a.positive_ && b.positive_, c, a.bound_ + b.bound_);
}

namespace catalog {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

TestFunction constant(double c) {
  std::string id = c == 1.0 ? "one" : "const:" + format_real(c);
  return TestFunction(id, [c](double) { return c; }, c >= 0.0, Convexity::Convex, std::abs(c));
}

TestFunction sigmoid() {
  return TestFunction("sigmoid", logistic, true, Convexity::Neither, 1.0);
}

TestFunction lorentzian() {
  return TestFunction("lorentzian", [](double x) { return 1.0 / (1.0 + x * x); }, true,
                      Convexity::Neither, 1.0);
}

TestFunction smoothed_indicator(double a, double b, double width) {
  if (!(b > a) || !(width > 0.0)) {
    throw std::invalid_argument("smoothed indicator needs a < b and width > 0");
  }
  std::string id = (a == -1.0 && b == 1.0 && width == 0.25)
                       ? "smooth-indicator"
                       : "smooth-indicator:" + format_real(a) + "," + format_real(b) + "," +
                             format_real(width);
  return TestFunction(
      id, [a, b, width](double x) { return logistic((x - a) / width) - logistic((x - b) / width); },
      true, Convexity::Neither, 1.0);
}

TestFunction clipped_square(double cap) {
  if (!(cap > 0.0)) throw std::invalid_argument("clipped square needs cap > 0");
  std::string id = cap == 400.0 ? "clipped-x2" : "clipped-x2:" + format_real(cap);
  return TestFunction(id, [cap](double x) { return std::min(x * x, cap); }, true,
                      Convexity::Neither, cap);
}

std::vector<TestFunction> all() {
  return {constant(1.0), sigmoid(), lorentzian(), smoothed_indicator(), clipped_square()};
}

std::vector<std::string> ids() {
  return {"one", "sigmoid", "lorentzian", "smooth-indicator", "clipped-x2"};
}

TestFunction by_id(const std::string& id) {
  auto param = [&](const std::string& prefix) -> std::string {
    return id.substr(prefix.size());
  };
  try {
    if (id == "one") return constant(1.0);
    if (id == "sigmoid") return sigmoid();
    if (id == "lorentzian") return lorentzian();
    if (id == "smooth-indicator") return smoothed_indicator();
    if (id == "clipped-x2") return clipped_square();
    if (id.rfind("const:", 0) == 0) return constant(std::stod(param("const:")));
    if (id.rfind("clipped-x2:", 0) == 0) return clipped_square(std::stod(param("clipped-x2:")));
  } catch (const std::logic_error&) {
    // fall through to the uniform error below (covers stod failures)
  }
  throw std::invalid_argument("unknown payoff id '" + id + "'");
}

}  // namespace catalog

void McConfig::validate() const {
  if (n_paths == 0) throw std::invalid_argument("n_paths must be positive");
  if (n_steps == 0 || (n_steps & (n_steps - 1)) != 0) {
    throw std::invalid_argument("n_steps must be a power of two, got " + std::to_string(n_steps));
  }
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("epsilon0 must be positive");
}

}  // namespace gexp
