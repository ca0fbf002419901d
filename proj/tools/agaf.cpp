// agaf: CSV/JSON front end for densities, G_vee, the critical curve,
// the identity suite and Monte Carlo checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agaf/gaf.hpp"
#include "agaf/identity_suite.hpp"
#include "agaf/pointprocess.hpp"
#include "json.hpp"

#ifndef AGAF_VERSION
#define AGAF_VERSION "dev"
#endif

using namespace agaf;
using json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

// small-q curvature of r0, used only for the overlay column
constexpr double kParabolaB = 8.515307593;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void usage_check(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

struct Options {
  std::vector<double> q;
  std::vector<double> r;
  std::uint64_t seed = 42;
  int samples = 0;
  int grid = 0;
  std::string out = "-";
  std::string format = "csv";
  double margin = 0.0;
  int modes = 0;
  bool flip = false;
  bool pair = false;
  bool covariance = false;
  std::string command_line;
};

double one_q(const Options& o, double fallback) {
  usage_check(o.q.size() <= 1, "--q takes a single value for this command");
  const double q = o.q.empty() ? fallback : o.q.front();
  usage_check(q >= 0.0 && q < 1.0, "--q must lie in [0, 1)");
  return q;
}

double one_r(const Options& o, double fallback) {
  usage_check(o.r.size() <= 1, "--r takes a single value for this command");
  const double r = o.r.empty() ? fallback : o.r.front();
  usage_check(r > 0.0 && std::isfinite(r), "--r must be positive");
  return r;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// writes to --out, or stdout for "-"
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path != "-") {
      file_.open(path, std::ios::binary);
      usage_check(file_.good(), "cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(std::vector<double> v) { rows_.push_back(std::move(v)); }

  void write(const Options& o, const json& extra = json::object()) const {
    Sink sink(o.out);
    auto& os = sink.os();
    if (o.format == "json") {
      json j = {{"version", AGAF_VERSION}, {"command", o.command_line}, {"seed", o.seed}};
      j.update(extra);
      json rows = json::array();
      for (const auto& r : rows_) {
        json obj;
        for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = r[i];
        rows.push_back(obj);
      }
      j["rows"] = rows;
      os << j.dump(2) << '\n';
      return;
    }
    os << "# agaf " << AGAF_VERSION << " command=" << o.command_line << " seed=" << o.seed << '\n';
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << num(r[i]);
      os << '\n';
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

int cmd_density(const Options& o) {
  const double q = one_q(o, 0.3);
  const double r = one_r(o, 0.3);
  const int n = o.grid > 0 ? o.grid : 100;
  Table t({"abs_z", "rho1"});
  if (q == 0.0) {
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(i) / n;
      t.row({a, density_disk(a, r)});
    }
  } else {
    const Nome nm(q);
    for (int i = 0; i < n; ++i) {
      const double a = q + (1.0 - q) * (i + 1) / (n + 1);
      t.row({a, density_annulus(a, r, nm)});
    }
  }
  t.write(o);
  return kPass;
}

int cmd_gvee(const Options& o) {
  const double q = one_q(o, 0.1);
  usage_check(q > 0.0, "gvee needs q > 0");
  std::vector<double> rs = o.r.empty() ? std::vector<double>{0.2, 0.6} : o.r;
  for (double r : rs) usage_check(r > 0.0 && std::isfinite(r), "--r values must be positive");
  std::sort(rs.begin(), rs.end());
  const int n = o.grid > 0 ? o.grid : 200;
  const Nome nm(q);
  Table t({"x", "r", "G_vee"});
  for (double r : rs)
    for (int i = 0; i < n; ++i) {
      const double x = q + (1.0 - q) * (i + 1) / (n + 1);
      t.row({x, r, G_vee(x, r, nm)});
    }
  t.write(o);
  return kPass;
}

int cmd_r0_curve(const Options& o) {
  std::vector<double> qs = o.q;
  if (qs.empty()) {
    const int n = o.grid > 0 ? o.grid : 95;
    for (int i = 1; i <= n; ++i) qs.push_back(0.95 * (static_cast<double>(i) / n));
  }
  for (double q : qs) usage_check(q > 0.0 && q <= 0.95, "r0-curve needs q in (0, 0.95]");
  std::sort(qs.begin(), qs.end());
  const double rc = r_critical();
  Table t({"q", "r0", "rc_parabola", "one_minus_half"});
  bool ok = true;
  for (double q : qs) {
    const double v = r0(q).r0;
    ok = ok && q < v && v < 1.0;
    t.row({q, v, rc + kParabolaB * q * q, 1.0 - (1.0 - q) / 2});
  }
  t.write(o);
  return ok ? kPass : kFail;
}

int cmd_identity_suite(const Options& o) {
  SuiteOptions s;
  if (!o.q.empty()) s.qs = o.q;
  if (!o.r.empty()) s.rs = o.r;
  for (double q : s.qs) usage_check(q > 0.0 && q < 1.0, "--q values must lie in (0, 1)");
  for (double r : s.rs) usage_check(r > 0.0, "--r values must be positive");
  s.seed = o.seed;
  if (o.samples > 0) s.instances = o.samples;
  s.flip_mccullough_sign = o.flip;
  const auto results = run_identity_suite(s);

  std::string first_failure;
  for (const auto& r : results)
    if (!r.pass() && first_failure.empty()) first_failure = r.name;

  if (o.format == "csv") {
    Sink sink(o.out);
    auto& os = sink.os();
    os << "# agaf " << AGAF_VERSION << " command=" << o.command_line << " seed=" << o.seed << '\n';
    os << "identity,instances,max_residual,threshold,pass\n";
    for (const auto& r : results)
      os << r.name << ',' << r.instances << ',' << num(r.max_residual) << ',' << num(r.threshold) << ','
         << (r.pass() ? 1 : 0) << '\n';
  } else {
    json list = json::array();
    for (const auto& r : results)
      list.push_back({{"identity", r.name},
                      {"instances", r.instances},
                      {"max_residual", r.max_residual},
                      {"threshold", r.threshold},
                      {"pass", r.pass()}});
    json j = {{"version", AGAF_VERSION}, {"command", o.command_line}, {"seed", o.seed},
              {"pass", first_failure.empty()}, {"identities", list}};
    if (!first_failure.empty()) j["first_failure"] = first_failure;
    Sink sink(o.out);
    sink.os() << j.dump(2) << '\n';
  }
  if (!first_failure.empty()) {
    std::cerr << "identity failed: " << first_failure << '\n';
    return kFail;
  }
  return kPass;
}

int cmd_mc_verify(const Options& o) {
  McConfig cfg;
  cfg.q = one_q(o, 0.3);
  cfg.r = one_r(o, 0.3);
  cfg.seed = o.seed;
  cfg.n_samples = o.samples > 0 ? o.samples : 1000;
  usage_check(o.margin >= 0.0 && o.margin < 0.5 * (1.0 - cfg.q), "--margin out of range");
  usage_check(o.modes >= 0, "--modes must be non-negative");
  cfg.delta = o.margin;
  cfg.modes = o.modes;
  const int bins = o.grid > 0 ? o.grid : 8;
  constexpr double limit = 5.0;

  const auto density = mc_density(cfg, bins);
  Table t({"lo", "hi", "estimate", "std_error", "analytic", "z_score"});
  double worst = 0.0;
  for (const auto& b : density) {
    t.row({b.lo, b.hi, b.estimate.value, b.estimate.std_error, b.analytic, b.z_score});
    worst = std::max(worst, std::abs(b.z_score));
  }
  bool ok = worst < limit;

  json summary = {{"version", AGAF_VERSION}, {"command", o.command_line}, {"seed", o.seed},
                  {"q", cfg.q}, {"r", cfg.r}, {"samples", cfg.n_samples}, {"density_max_abs_z", worst}};
  if (cfg.q == 0.0) {
    const auto& b = density.front();
    summary["origin_bin"] = {{"estimate", b.estimate.value}, {"std_error", b.estimate.std_error},
                             {"expected", 1.0 + cfg.r}};
  }
  if (o.pair) {
    usage_check(cfg.q > 0.0, "--pair needs q > 0");
    const PairEstimate p = mc_pair_statistic(cfg, PairGeometry{});
    const double z = (p.estimate.value - p.analytic) / p.estimate.std_error;
    ok = ok && std::abs(z) < limit;
    summary["pair"] = {{"estimate", p.estimate.value}, {"std_error", p.estimate.std_error},
                       {"analytic", p.analytic}, {"joint_events", p.joint_events}, {"z_score", z}};
  }
  if (o.covariance) {
    usage_check(cfg.q > 0.0, "--covariance needs q > 0");
    const double mid = 0.5 * (cfg.q + 1.0);
    const std::vector<cplx> anchors{cplx(mid, 0.0)};
    const std::vector<cplx> probes{std::polar(mid, 2.0), std::polar(mid, -2.2), std::polar(0.5 * (mid + 1.0), 1.0)};
    const CovarianceCheck c = conditional_covariance_check(cfg, anchors, probes);
    ok = ok && c.max_residual < limit && c.anchors_vanish;
    summary["covariance"] = {{"max_residual", c.max_residual}, {"anchors_vanish", c.anchors_vanish}};
  }
  summary["pass"] = ok;

  t.write(o);
  if (o.out == "-") {
    std::cerr << summary.dump(2) << '\n';
  } else {
    std::ofstream js(o.out + ".summary.json", std::ios::binary);
    js << summary.dump(2) << '\n';
  }
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeros of Gaussian analytic functions on an annulus"};
  app.set_version_flag("--version", AGAF_VERSION);
  app.require_subcommand(1);

  Options o;
  std::ostringstream cl;
  for (int i = 1; i < argc; ++i) cl << (i > 1 ? " " : "") << argv[i];
  o.command_line = cl.str();

  auto common = [&](CLI::App* sub) {
    sub->add_option("--q", o.q, "nome q (a list where the command accepts one)");
    sub->add_option("--r", o.r, "weight parameter r (a list where the command accepts one)");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--samples", o.samples, "Monte Carlo samples, or identity instances");
    sub->add_option("--grid", o.grid, "grid size or number of bins");
    sub->add_option("--out", o.out, "output path, - for stdout");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* density = app.add_subcommand("density", "first intensity on a radial grid");
  auto* gvee = app.add_subcommand("gvee", "G_vee(x; r) on a grid in x");
  auto* curve = app.add_subcommand("r0-curve", "critical curve r0(q) with its overlays");
  auto* suite = app.add_subcommand("identity-suite", "randomized identity checks");
  auto* mc = app.add_subcommand("mc-verify", "sampled zero statistics against closed forms");
  for (auto* s : {density, gvee, curve, suite, mc}) common(s);
  suite->add_flag("--flip-sign", o.flip, "perturb one identity on purpose (negative control)");
  mc->add_option("--margin", o.margin, "distance kept from each boundary circle");
  mc->add_option("--modes", o.modes, "Laurent truncation");
  mc->add_flag("--pair", o.pair, "also run the antipodal pair statistic");
  mc->add_flag("--covariance", o.covariance, "also run the one-anchor conditional covariance check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  try {
    if (*density) return cmd_density(o);
    if (*gvee) return cmd_gvee(o);
    if (*curve) return cmd_r0_curve(o);
    if (*suite) {
      if (o.format == "csv" && suite->count("--format") == 0) o.format = "json";
      return cmd_identity_suite(o);
    }
    if (*mc) return cmd_mc_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
