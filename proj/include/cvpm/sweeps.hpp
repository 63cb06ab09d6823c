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

#pragma once

// Figure sweeps as in-memory tables, plus the CSV and gnuplot writers used by
// the command-line tool.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "cvpm/errors.hpp"
#include "cvpm/metrology.hpp"
#include "cvpm/optimize.hpp"
#include "cvpm/parallel.hpp"

namespace cvpm {

inline constexpr const char* kSchemaLine = "# cv-phase-metrology schema v1";

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> config;  ///< echoed as comment lines
  std::size_t sort_keys = 1;                                 ///< leading columns that order rows

  void sort() {
    std::stable_sort(rows.begin(), rows.end(), [k = sort_keys](const auto& a, const auto& b) {
      return std::lexicographical_compare(a.begin(), a.begin() + k, b.begin(), b.begin() + k);
    });
  }

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error("no column named " + name);
    return static_cast<std::size_t>(it - columns.begin());
  }
};

/// 12 significant digits, C locale, no trailing spaces.
inline std::string format_number(double x) {
  if (!std::isfinite(x)) throw Error("refusing to write a non-finite value");
  if (x == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", x);
}

inline void write_csv(std::ostream& os, const Table& t) {
  os << kSchemaLine << '\n';
  for (const auto& [key, value] : t.config) os << "# " << key << '=' << value << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

/// n evenly spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw Error("grid needs at least one point");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo)) throw Error("log grid needs 0 < lo <= hi");
  std::vector<double> v = linspace(std::log10(lo), std::log10(hi), n);
  for (double& x : v) x = std::pow(10.0, x);
  return v;
}

namespace detail {

template <typename A, typename B>
std::vector<std::pair<A, B>> outer(const std::vector<A>& a, const std::vector<B>& b) {
  std::vector<std::pair<A, B>> out;
  out.reserve(a.size() * b.size());
  for (const A& x : a) {
    for (const B& y : b) out.emplace_back(x, y);
  }
  return out;
}

inline double ratio(double f, double h) {
  if (!(h > 0.0)) throw Error("F/H undefined where the QFI vanishes");
  return f / h;
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
  return s;
}

}  // namespace detail

struct SweepOptions {
  int points = 0;  ///< resolution of the continuous axes; 0 keeps each figure's default
};

/// Figure identifiers accepted by make_figure.
inline const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"1", "2a", "2b", "3", "4a", "4b", "5", "6"};
  return ids;
}

namespace figures {

inline int pick(const SweepOptions& o, int fallback) { return o.points > 0 ? o.points : fallback; }

// QFI of the squeezed vacuum against output photon number, unitary disturbance.
inline Table fig1(const SweepOptions& o) {
  const std::vector<double> etas{0.0, 0.5, 1.0, 1.5};
  const std::vector<double> n0s = linspace(0.0, 20.0, pick(o, 101));
  const auto pts = detail::outer(etas, n0s);
  Table t{{"eta", "n_out", "qfi"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [eta, n0] = pts[i];
    const GaussianState probe = make_probe({n0, 1.0, 0.0});
    const UnitaryDisturbance m{eta};
    return std::vector<double>{eta, mean_photon_number(apply_channel(probe, m, 0.0)),
                               qfi_gaussian(probe, m, 0.0).value};
  });
  t.config = {{"eta", detail::join(etas)}, {"n0", "0..20 x" + std::to_string(n0s.size())}};
  return t;
}

inline std::vector<double> homodyne_row(const GaussianState& probe, const ChannelModel& m) {
  const double h = qfi_gaussian(probe, m, 0.0).value;
  const HomodyneOptimum best = optimize_homodyne(probe, m, 0.0);
  return {h, best.fi, best.omega, detail::ratio(best.fi, h)};
}

// F/H of the optimal homodyne angle against probe energy.
inline Table fig2a(const SweepOptions& o) {
  const std::vector<double> etas{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> n0s = linspace(0.05, 5.0, pick(o, 100));
  const auto pts = detail::outer(etas, n0s);
  Table t{{"eta", "n0", "qfi", "fi", "omega_opt", "ratio"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [eta, n0] = pts[i];
    std::vector<double> row{eta, n0};
    const auto tail = homodyne_row(make_probe({n0, 1.0, 0.0}), UnitaryDisturbance{eta});
    row.insert(row.end(), tail.begin(), tail.end());
    return row;
  });
  t.config = {{"eta", detail::join(etas)}, {"n0", "0.05..5 x" + std::to_string(n0s.size())}};
  return t;
}

// F/H of the optimal homodyne angle against disturbance strength.
inline Table fig2b(const SweepOptions& o) {
  const std::vector<double> n0s{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<double> etas = linspace(0.02, 2.0, pick(o, 100));
  const auto pts = detail::outer(n0s, etas);
  Table t{{"n0", "eta", "qfi", "fi", "omega_opt", "ratio"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [n0, eta] = pts[i];
    std::vector<double> row{n0, eta};
    const auto tail = homodyne_row(make_probe({n0, 1.0, 0.0}), UnitaryDisturbance{eta});
    row.insert(row.end(), tail.begin(), tail.end());
    return row;
  });
  t.config = {{"n0", detail::join(n0s)}, {"eta", "0.02..2 x" + std::to_string(etas.size())}};
  return t;
}

inline std::vector<double> thresholds(const std::vector<double>& n0s) {
  return parallel_map(n0s.size(), [&](std::size_t i) { return threshold_delta(n0s[i]); });
}

// Optimal squeezing fraction over (n0, delta), with the threshold curve.
inline Table fig3(const SweepOptions& o) {
  const int n = pick(o, 200);
  const std::vector<double> n0s = linspace(0.02, 4.0, n);
  const std::vector<double> deltas = linspace(0.02, 2.0, n);
  const std::vector<double> dt = thresholds(n0s);
  const auto pts = detail::outer(n0s, deltas);
  Table t{{"n0", "delta", "beta_opt", "theta_opt", "qfi", "delta_t"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [n0, delta] = pts[i];
    const ProbeOptimum p = optimize_probe(n0, RandomDisturbance{delta}, 0.0);
    return std::vector<double>{n0, delta, p.beta_opt, p.theta_opt, p.qfi, dt[i / deltas.size()]};
  });
  t.config = {{"n0", "0.02..4 x" + std::to_string(n)}, {"delta", "0.02..2 x" + std::to_string(n)}};
  return t;
}

// Optimised QFI against noise at fixed probe energy.
inline Table fig4a(const SweepOptions& o) {
  const std::vector<double> n0s{1, 21, 41, 61, 81, 101};
  const std::vector<double> deltas = linspace(0.0, 2.0, pick(o, 101));
  const auto pts = detail::outer(n0s, deltas);
  Table t{{"n0", "delta", "n_out", "beta_opt", "theta_opt", "qfi"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [n0, delta] = pts[i];
    const ProbeOptimum p = optimize_probe(n0, RandomDisturbance{delta}, 0.0);
    return std::vector<double>{n0, delta, p.n_out, p.beta_opt, p.theta_opt, p.qfi};
  });
  t.config = {{"n0", detail::join(n0s)}, {"delta", "0..2 x" + std::to_string(deltas.size())}};
  return t;
}

// Optimised QFI against output photon number at fixed noise.
inline Table fig4b(const SweepOptions& o) {
  const std::vector<double> deltas{0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0};
  const std::vector<double> n0s = linspace(0.0, 200.0, pick(o, 101));
  const auto pts = detail::outer(deltas, n0s);
  Table t{{"delta", "n_out", "n0", "beta_opt", "qfi"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [delta, n0] = pts[i];
    const ProbeOptimum p = optimize_probe(n0, RandomDisturbance{delta}, 0.0);
    return std::vector<double>{delta, p.n_out, n0, p.beta_opt, p.qfi};
  });
  t.config = {{"delta", detail::join(deltas)}, {"n0", "0..200 x" + std::to_string(n0s.size())}};
  return t;
}

// Homodyne F/H for squeezed vacua under random disturbance.
inline Table fig5(const SweepOptions& o) {
  const std::vector<double> n0s{1e-9, 2, 4, 6, 8, 10};
  const std::vector<double> deltas = linspace(0.0, 3.0, pick(o, 151));
  const auto pts = detail::outer(n0s, deltas);
  Table t{{"n0", "delta", "qfi", "fi", "omega_opt", "ratio"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [n0, delta] = pts[i];
    std::vector<double> row{n0, delta};
    const auto tail = homodyne_row(make_probe({n0, 1.0, 0.0}), RandomDisturbance{delta});
    row.insert(row.end(), tail.begin(), tail.end());
    return row;
  });
  t.config = {{"n0", detail::join(n0s)}, {"delta", "0..3 x" + std::to_string(deltas.size())}};
  return t;
}

// Homodyne F/H for the optimised probe over (n0, delta), with the threshold curve.
inline Table fig6(const SweepOptions& o) {
  const int n = pick(o, 200);
  const std::vector<double> n0s = linspace(0.02, 4.0, n);
  const std::vector<double> deltas = linspace(0.02, 2.0, n);
  const std::vector<double> dt = thresholds(n0s);
  const auto pts = detail::outer(n0s, deltas);
  Table t{{"n0", "delta", "beta_opt", "qfi", "fi", "omega_opt", "ratio", "delta_t"}, {}, {}, 2};
  t.rows = parallel_map(pts.size(), [&](std::size_t i) {
    const auto [n0, delta] = pts[i];
    const RandomDisturbance m{delta};
    const ProbeOptimum p = optimize_probe(n0, m, 0.0);
    const HomodyneOptimum best = optimize_homodyne(make_probe({n0, p.beta_opt, p.theta_opt}), m, 0.0);
    return std::vector<double>{n0,      delta,      p.beta_opt,                    p.qfi,
                               best.fi, best.omega, detail::ratio(best.fi, p.qfi), dt[i / deltas.size()]};
  });
  t.config = {{"n0", "0.02..4 x" + std::to_string(n)}, {"delta", "0.02..2 x" + std::to_string(n)}};
  return t;
}

}  // namespace figures

inline Table make_figure(const std::string& id, const SweepOptions& o = {}) {
  Table t;
  if (id == "1") t = figures::fig1(o);
  else if (id == "2a") t = figures::fig2a(o);
  else if (id == "2b") t = figures::fig2b(o);
  else if (id == "3") t = figures::fig3(o);
  else if (id == "4a") t = figures::fig4a(o);
  else if (id == "4b") t = figures::fig4b(o);
  else if (id == "5") t = figures::fig5(o);
  else if (id == "6") t = figures::fig6(o);
  else throw Error("unknown figure '" + id + "'");
  t.config.insert(t.config.begin(), {"figure", id});
  t.sort();
  return t;
}

/// Delta_t(n0) over a log-spaced energy grid.
inline Table threshold_table(double n0_min, double n0_max, int points) {
  const std::vector<double> n0s = logspace(n0_min, n0_max, points);
  const std::vector<double> dt = figures::thresholds(n0s);
  Table t{{"n0", "delta_t"}, {}, {}, 1};
  for (std::size_t i = 0; i < n0s.size(); ++i) t.rows.push_back({n0s[i], dt[i]});
  t.config = {{"n0_min", format_number(n0_min)},
              {"n0_max", format_number(n0_max)},
              {"points", std::to_string(points)}};
  t.sort();
  return t;
}

/// Companion gnuplot script for a written CSV. Two-column tables plot as one
/// curve, (n0, delta) maps as a heat map of their third column, and everything
/// else as one curve per value of the first column against the second.
inline std::string gnuplot_script(const Table& t, const std::string& csv_path) {
  std::string s = "set datafile separator ','\nset key outside\n";
  const std::size_t last = t.columns.size();
  if (last == 2) {
    s += fmt::format("set logscale x\nset xlabel '{}'\nset ylabel '{}'\n", t.columns[0], t.columns[1]);
    s += fmt::format("plot '{}' using 1:2 with linespoints notitle\n", csv_path);
    return s;
  }
  if (t.columns.back() == "delta_t") {
    s += fmt::format("set xlabel '{}'\nset ylabel '{}'\nset view map\n", t.columns[0], t.columns[1]);
    s += fmt::format("splot '{}' using 1:2:3 with points palette pointtype 5 pointsize 0.3 title '{}', \\\n",
                     csv_path, t.columns[2]);
    s += fmt::format("      '{}' using 1:{}:(0) with lines lc 'black' title 'delta_t'\n", csv_path, last);
    return s;
  }
  s += fmt::format("set xlabel '{}'\nset ylabel '{}'\n", t.columns[1], t.columns.back());
  std::vector<double> families;
  for (const auto& row : t.rows) {
    if (std::find(families.begin(), families.end(), row[0]) == families.end()) families.push_back(row[0]);
  }
  s += "plot ";
  for (std::size_t i = 0; i < families.size(); ++i) {
    const std::string v = format_number(families[i]);
    s += fmt::format("{}'{}' using ($1=={} ? $2 : 1/0):{} with lines title '{}={}'",
                     i ? ", \\\n     " : "", csv_path, v, last, t.columns[0], v);
  }
  s += '\n';
  return s;
}

}  // namespace cvpm
