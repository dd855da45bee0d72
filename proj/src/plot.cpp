// Copyright 2026 The dagrpo Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dagrpo/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dagrpo/errors.hpp"

namespace dagrpo {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 240.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTitle = 36.0;
constexpr double kPanelTop = 28.0;
constexpr double kPanelBottom = 34.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed2(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, r.ptr);
}

std::string tick(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void pad() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

}  // namespace

int CsvTable::column(const std::string& n) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == n) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(std::istream& in, const std::string& name) {
  CsvTable t;
  t.name = name;
  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw ConfigError(name + ": empty CSV");
  }
  t.header = split(line);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ConfigError(name + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " cells, header has " +
                            std::to_string(t.header.size()),
                        line_no, 1);
    }
    std::vector<std::optional<double>> row;
    for (const auto& c : cells) {
      if (c.empty()) {
        row.emplace_back();
        continue;
      }
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size()) {
        throw ConfigError(name + ": line " + std::to_string(line_no) +
                              ": non-numeric cell '" + c + "'",
                          line_no, 1);
      }
      row.emplace_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw ConfigError(name + ": CSV has no data rows");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  return read_csv(in, path.stem().string());
}

std::string render_svg(const PlotSpec& spec, const std::vector<CsvTable>& tables) {
  if (tables.empty()) throw ConfigError("plot needs at least one source");
  if (spec.series.empty()) throw ConfigError("plot needs at least one series");
  for (const auto& t : tables) {
    if (t.column("iteration") < 0) {
      throw ConfigError(t.name + ": missing column 'iteration'");
    }
    for (const auto& s : spec.series) {
      if (t.column(s) < 0) throw ConfigError(t.name + ": missing column '" + s + "'");
    }
  }

  Range xr;
  for (const auto& t : tables) {
    const int xc = t.column("iteration");
    for (const auto& r : t.rows) {
      if (r[xc]) xr.add(*r[xc]);
    }
  }
  for (const auto& m : spec.phase_markers) xr.add(m.iteration);
  if (xr.empty() || xr.hi - xr.lo < 1e-12) {
    xr.lo = xr.empty() ? 0.0 : xr.lo;
    xr.hi = xr.lo + 1.0;
  }

  // Target segments: (from, to, tau).
  struct Segment {
    double x0, x1, tau;
  };
  std::vector<Segment> targets;
  {
    std::optional<double> tau = spec.initial_tau;
    double start = xr.lo;
    auto markers = spec.phase_markers;
    std::sort(markers.begin(), markers.end(),
              [](const PhaseMarker& a, const PhaseMarker& b) {
                return a.iteration < b.iteration;
              });
    for (const auto& m : markers) {
      if (tau) targets.push_back({start, static_cast<double>(m.iteration), *tau});
      start = m.iteration;
      if (m.tau) tau = m.tau;
    }
    if (tau) targets.push_back({start, xr.hi, *tau});
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanelHeight - kPanelTop - kPanelBottom;
  const double height =
      kTitle + kPanelHeight * static_cast<double>(spec.series.size());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(kWidth)
      << "\" height=\"" << fixed2(height) << "\" viewBox=\"0 0 "
      << fixed2(kWidth) << ' ' << fixed2(height) << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << fixed2(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\""
        << " font-size=\"16\">" << escape(spec.title) << "</text>\n";
  }

  for (std::size_t pi = 0; pi < spec.series.size(); ++pi) {
    const std::string& series = spec.series[pi];
    const bool with_tau = std::find(spec.tau_series.begin(), spec.tau_series.end(),
                                    series) != spec.tau_series.end();
    const double top = kTitle + kPanelHeight * static_cast<double>(pi) + kPanelTop;
    Range yr;
    for (const auto& t : tables) {
      const int yc = t.column(series);
      for (const auto& r : t.rows) {
        if (r[yc] && std::isfinite(*r[yc])) yr.add(*r[yc]);
      }
    }
    if (with_tau) {
      for (const auto& s : targets) yr.add(s.tau);
    }
    yr.pad();
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    svg << "<g class=\"panel\" data-series=\"" << escape(series) << "\">\n";
    svg << "<text x=\"" << fixed2(kLeft) << "\" y=\"" << fixed2(top - 8)
        << "\" font-size=\"13\">" << escape(series) << "</text>\n";
    svg << "<rect x=\"" << fixed2(kLeft) << "\" y=\"" << fixed2(top) << "\" width=\""
        << fixed2(plot_w) << "\" height=\"" << fixed2(plot_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
      const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
      svg << "<line x1=\"" << fixed2(kLeft - 4) << "\" y1=\"" << fixed2(sy(yv))
          << "\" x2=\"" << fixed2(kLeft) << "\" y2=\"" << fixed2(sy(yv))
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << fixed2(kLeft - 6) << "\" y=\"" << fixed2(sy(yv) + 4)
          << "\" font-size=\"10\" text-anchor=\"end\">" << tick(yv) << "</text>\n";
      svg << "<line x1=\"" << fixed2(sx(xv)) << "\" y1=\"" << fixed2(top + plot_h)
          << "\" x2=\"" << fixed2(sx(xv)) << "\" y2=\"" << fixed2(top + plot_h + 4)
          << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << fixed2(sx(xv)) << "\" y=\"" << fixed2(top + plot_h + 16)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << tick(xv) << "</text>\n";
    }
    svg << "<text x=\"" << fixed2(kLeft + plot_w / 2) << "\" y=\""
        << fixed2(top + plot_h + 30) << "\" font-size=\"11\" text-anchor=\"middle\">"
        << "iteration</text>\n";

    for (const auto& m : spec.phase_markers) {
      svg << "<line class=\"phase\" x1=\"" << fixed2(sx(m.iteration)) << "\" y1=\""
          << fixed2(top) << "\" x2=\"" << fixed2(sx(m.iteration)) << "\" y2=\""
          << fixed2(top + plot_h) << "\" stroke=\"#888888\"/>\n";
    }
    if (with_tau) {
      for (const auto& s : targets) {
        svg << "<line class=\"target\" x1=\"" << fixed2(sx(s.x0)) << "\" y1=\""
            << fixed2(sy(s.tau)) << "\" x2=\"" << fixed2(sx(s.x1)) << "\" y2=\""
            << fixed2(sy(s.tau)) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
      }
    }

    for (std::size_t ti = 0; ti < tables.size(); ++ti) {
      const auto& t = tables[ti];
      const int xc = t.column("iteration");
      const int yc = t.column(series);
      const char* color = kPalette[ti % std::size(kPalette)];
      std::string d;
      bool pen_down = false;
      for (const auto& r : t.rows) {
        if (!r[xc] || !r[yc] || !std::isfinite(*r[yc])) {
          pen_down = false;
          continue;
        }
        d += pen_down ? " L" : (d.empty() ? "M" : " M");
        d += fixed2(sx(*r[xc])) + ' ' + fixed2(sy(*r[yc]));
        pen_down = true;
      }
      svg << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.2\"/>\n";
      const double ly = top + 14 + 14 * static_cast<double>(ti);
      svg << "<line x1=\"" << fixed2(kLeft + plot_w - 150) << "\" y1=\"" << fixed2(ly - 4)
          << "\" x2=\"" << fixed2(kLeft + plot_w - 130) << "\" y2=\"" << fixed2(ly - 4)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << fixed2(kLeft + plot_w - 125) << "\" y=\"" << fixed2(ly)
          << "\" font-size=\"11\">" << escape(t.name) << "</text>\n";
    }
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const PlotSpec& spec) {
  std::vector<CsvTable> tables;
  for (const auto& src : spec.sources) tables.push_back(read_csv(src));
  const std::string svg = render_svg(spec, tables);
  std::ofstream out(spec.output, std::ios::binary);
  if (!out) throw RuntimeAbort("cannot write " + spec.output.string());
  out << svg;
}

}  // namespace dagrpo
