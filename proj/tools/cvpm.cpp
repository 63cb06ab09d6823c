// Copyright 2026 The cv-phase-metrology Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cvpm: command-line front end for the phase-estimation toolkit.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 file I/O, 4 oracle
// certification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cvpm/certify.hpp"
#include "cvpm/mle.hpp"
#include "cvpm/sweeps.hpp"

namespace {

using namespace cvpm;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitCertification = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbeFlags {
  double n0 = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  std::optional<double> eta;
  std::optional<double> delta;

  void add_to(CLI::App* app, bool with_probe_shape = true) {
    app->add_option("--n0", n0, "mean photon number of the probe")->required();
    if (with_probe_shape) {
      app->add_option("--beta", beta, "squeezing fraction in [0, 1]")->capture_default_str();
      app->add_option("--theta", theta, "squeezing angle (rad)")->capture_default_str();
    }
    app->add_option("--phi", phi, "phase working point (rad)")->capture_default_str();
    auto* e = app->add_option("--eta", eta, "unitary disturbance strength");
    auto* d = app->add_option("--delta", delta, "random disturbance standard deviation");
    e->excludes(d);
  }

  ChannelModel model() const {
    if (eta.has_value() == delta.has_value()) throw UsageError("give exactly one of --eta or --delta");
    if (eta) return UnitaryDisturbance{*eta};
    return RandomDisturbance{*delta};
  }

  ProbeSpec probe() const { return {n0, beta, theta}; }
};

struct OmegaFlags {
  std::optional<double> omega;
  bool optimize = false;

  void add_to(CLI::App* app) {
    auto* w = app->add_option("--omega", omega, "homodyne angle (rad)");
    auto* o = app->add_flag("--optimize-omega", optimize, "use the best homodyne angle");
    w->excludes(o);
  }
};

std::string num(double x) { return format_number(x); }

void print_pairs(const std::vector<std::pair<std::string, double>>& kv) {
  for (std::size_t i = 0; i < kv.size(); ++i) std::cout << (i ? " " : "") << kv[i].first << '=' << num(kv[i].second);
  std::cout << '\n';
}

void write_table(const Table& t, const std::string& path, bool gnuplot) {
  if (path.empty() || path == "-") {
    write_csv(std::cout, t);
    if (gnuplot) throw UsageError("--gnuplot needs --out <file>");
    return;
  }
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_csv(os, t);
    if (!os.flush()) throw IoError("write to '" + path + "' failed");
  }
  std::cout << path << '\n';
  if (gnuplot) {
    const std::string script = path + ".gp";
    std::ofstream gp(script, std::ios::binary);
    if (!gp) throw IoError("cannot open '" + script + "' for writing");
    gp << gnuplot_script(t, std::filesystem::path(path).filename().string());
    if (!gp.flush()) throw IoError("write to '" + script + "' failed");
    std::cout << script << '\n';
  }
}

// Options read from --config become ordinary flags, placed ahead of the real
// command line so explicit flags are seen last and win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  std::set<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file path");
      path = args[++i];
      continue;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      continue;
    }
    if (args[i].rfind("--", 0) == 0) given.insert(args[i].substr(2, args[i].find('=') - 2));
    out.push_back(args[i]);
  }
  if (!path) return out;
  std::ifstream in(*path);
  if (!in) throw IoError("cannot read config file '" + *path + "'");
  std::vector<std::string> injected;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (given.count(item.name)) continue;
    if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "false")) {
      if (item.inputs[0] == "true") injected.push_back("--" + item.name);
      continue;
    }
    injected.push_back("--" + item.name);
    for (const std::string& v : item.inputs) injected.push_back(v);
  }
  // Insert right after the subcommand name.
  const auto at = out.empty() ? out.end() : out.begin() + 1;
  out.insert(at, injected.begin(), injected.end());
  return out;
}

int run_qfi(const ProbeFlags& f, const OmegaFlags& w) {
  const GaussianState probe = make_probe(f.probe());
  const ChannelModel m = f.model();
  const double h = qfi_gaussian(probe, m, f.phi).value;
  if (!w.omega && !w.optimize) {
    print_pairs({{"qfi", h}});
    return 0;
  }
  double omega = w.omega.value_or(0.0);
  if (w.optimize) omega = optimize_homodyne(probe, m, f.phi).omega;
  const double fi = fi_homodyne(probe, m, f.phi, omega).value;
  print_pairs({{"qfi", h}, {"omega", omega}, {"fi", fi}, {"ratio", h > 0 ? fi / h : 0.0}});
  return 0;
}

int run_fi(const ProbeFlags& f, const OmegaFlags& w) {
  if (!w.omega && !w.optimize) throw UsageError("fi needs --omega or --optimize-omega");
  const GaussianState probe = make_probe(f.probe());
  const ChannelModel m = f.model();
  double omega = w.omega.value_or(0.0);
  if (w.optimize) omega = optimize_homodyne(probe, m, f.phi).omega;
  print_pairs({{"omega", omega}, {"fi", fi_homodyne(probe, m, f.phi, omega).value}});
  return 0;
}

int run_optimize(const ProbeFlags& f) {
  const ProbeOptimum o = optimize_probe(f.n0, f.model(), f.phi);
  print_pairs({{"beta_opt", o.beta_opt}, {"theta_opt", o.theta_opt}, {"qfi", o.qfi}, {"n_out", o.n_out}});
  return 0;
}

int run_oracle_check(const std::string& out) {
  const std::vector<CertificationPoint> grid = certification_grid();
  const std::vector<CertificationResult> results = certify(grid);

  Table t{{"n0", "beta", "theta", "phi", "random", "strength", "cutoff", "moment_error", "qfi_error",
           "omega", "fi_error", "passed"},
          {},
          {{"points", std::to_string(grid.size())}},
          6};
  double worst_moment = 0, worst_qfi = 0, worst_fi = 0;
  const CertificationResult* first_failure = nullptr;
  for (const CertificationResult& r : results) {
    const bool random = std::holds_alternative<RandomDisturbance>(r.point.model);
    const double strength = random ? std::get<RandomDisturbance>(r.point.model).delta
                                   : std::get<UnitaryDisturbance>(r.point.model).eta;
    t.rows.push_back({r.point.probe.n0, r.point.probe.beta, r.point.probe.theta, r.point.phi,
                      random ? 1.0 : 0.0, strength, static_cast<double>(r.cutoff), r.moment_error,
                      r.qfi_error, r.omega, r.fi_error, r.passed() ? 1.0 : 0.0});
    worst_moment = std::max(worst_moment, r.moment_error);
    worst_qfi = std::max(worst_qfi, r.qfi_error);
    worst_fi = std::max(worst_fi, r.fi_error);
    if (!r.passed() && !first_failure) first_failure = &r;
  }
  if (!out.empty()) {
    t.sort();
    write_table(t, out, false);
  }
  fmt::print("points={} worst_moment_error={} worst_qfi_rel_error={} worst_fi_rel_error={}\n", grid.size(),
             num(worst_moment), num(worst_qfi), num(worst_fi));
  if (first_failure) {
    fmt::print(stderr, "certification failed at {}: {}\n", describe(first_failure->point), first_failure->failure);
    return kExitCertification;
  }
  std::cout << "certification passed\n";
  return 0;
}

int run_mle(const ProbeFlags& f, const OmegaFlags& w, int m, int r, std::uint64_t seed) {
  ExperimentConfig c;
  c.probe = f.probe();
  c.model = f.model();
  c.true_phase = f.phi;
  c.samples = m;
  c.repetitions = r;
  c.seed = seed;
  c.omega = w.omega ? *w.omega : optimize_homodyne(make_probe(c.probe), c.model, c.true_phase).omega;
  const CrbReport rep = crb_check(c);
  print_pairs({{"mse", rep.mse},
               {"crb", rep.crb},
               {"ratio", rep.ratio},
               {"qcrb", rep.qcrb},
               {"omega", c.omega},
               {"flagged", static_cast<double>(rep.flagged)}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase estimation with Gaussian probes under linear disturbance", "cvpm"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");
  app.footer("Any subcommand accepts --config FILE with key=value lines named after its flags;\n"
             "flags on the command line take precedence. CVPM_THREADS caps worker threads.");

  ProbeFlags qf, ff, of, mf;
  OmegaFlags qw, fw, mw;

  auto* qfi = app.add_subcommand("qfi", "quantum Fisher information at one point");
  qf.add_to(qfi);
  qw.add_to(qfi);

  auto* fi = app.add_subcommand("fi", "homodyne Fisher information at one point");
  ff.add_to(fi);
  fw.add_to(fi);

  auto* opt = app.add_subcommand("optimize-probe", "best squeezing fraction and angle at fixed energy");
  of.add_to(opt, false);

  double n0_min = 1e-3, n0_max = 100.0;
  int threshold_points = 41;
  std::string threshold_out;
  bool threshold_gp = false;
  auto* thr = app.add_subcommand("threshold", "noise threshold for squeezed-vacuum optimality, CSV");
  thr->add_option("--n0-min", n0_min, "smallest probe energy")->capture_default_str();
  thr->add_option("--n0-max", n0_max, "largest probe energy")->capture_default_str();
  thr->add_option("--points", threshold_points, "log-spaced grid points")->capture_default_str()->check(CLI::PositiveNumber);
  thr->add_option("--out", threshold_out, "CSV path (default: stdout)");
  thr->add_flag("--gnuplot", threshold_gp, "also write <out>.gp");

  std::string figure, sweep_out;
  int sweep_points = 0;
  bool sweep_gp = false;
  auto* sweep = app.add_subcommand("sweep", "evaluate a predefined parameter sweep and write CSV");
  sweep->add_option("--figure", figure, "one of 1, 2a, 2b, 3, 4a, 4b, 5, 6")
      ->required()
      ->check(CLI::IsMember(figure_ids()));
  sweep->add_option("--out", sweep_out, "CSV path (default: fig<id>.csv, '-' for stdout)");
  sweep->add_option("--points", sweep_points, "resolution of the continuous axes (default: per figure)")
      ->check(CLI::NonNegativeNumber);
  sweep->add_flag("--gnuplot", sweep_gp, "also write <out>.gp");

  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle-check", "certify the phase-space engine against the Fock oracle");
  oracle->add_option("--out", oracle_out, "optional CSV with one row per grid point");

  int samples = 1000, reps = 1000;
  std::uint64_t seed = 0;
  auto* mle = app.add_subcommand("mle", "Monte Carlo maximum-likelihood run against the Cramer-Rao bound");
  mf.add_to(mle);
  mle->add_option("--omega", mw.omega, "homodyne angle (default: optimal)");
  mle->add_option("--m", samples, "shots per experiment")->capture_default_str()->check(CLI::PositiveNumber);
  mle->add_option("--r", reps, "repetitions")->capture_default_str()->check(CLI::PositiveNumber);
  mle->add_option("--seed", seed, "random seed")->required();

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(args);

    if (qfi->parsed()) return run_qfi(qf, qw);
    if (fi->parsed()) return run_fi(ff, fw);
    if (opt->parsed()) return run_optimize(of);
    if (thr->parsed()) {
      write_table(threshold_table(n0_min, n0_max, threshold_points), threshold_out, threshold_gp);
      return 0;
    }
    if (sweep->parsed()) {
      const std::string path = sweep_out.empty() ? "fig" + figure + ".csv" : sweep_out;
      write_table(make_figure(figure, {sweep_points}), path, sweep_gp);
      return 0;
    }
    if (oracle->parsed()) return run_oracle_check(oracle_out);
    if (mle->parsed()) return run_mle(mf, mw, samples, reps, seed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n\n{}", e.what(), app.help());
    return kExitUsage;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kExitIo;
  } catch (const cvpm::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
