// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "elaasim/sim.hpp"

namespace elaasim {

namespace {

std::string num6(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

std::string coord(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10.0 * mag;
  for (const double m : {1.0, 2.0, 5.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9) * step;
  for (double v = first; v <= hi + 1e-9 * step; v += step) {
    ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);

  out << "axis,estimator,nmse_db,stderr_db,n_trials\n";
  for (std::size_t j = 0; j < result.axis.values.size(); ++j) {
    for (std::size_t e = 0; e < result.estimator_names.size(); ++e) {
      const SweepCell& cell = result.cells[j][e];
      out << num6(result.axis.values[j]) << ',' << result.estimator_names[e] << ','
          << num6(cell.nmse_db) << ',' << num6(cell.stderr_db) << ',' << cell.n_trials
          << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_plot(const SweepResult& result, const std::string& path) {
  if (result.axis.values.empty()) throw std::invalid_argument("emit_plot: empty result");

  constexpr double kWidth = 760, kHeight = 480;
  constexpr double kLeft = 70, kRight = 560, kTop = 28, kBottom = 420;

  double x_lo = result.axis.values.front(), x_hi = x_lo;
  for (const double v : result.axis.values) {
    x_lo = std::min(x_lo, v);
    x_hi = std::max(x_hi, v);
  }
  if (x_lo == x_hi) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }

  bool have_y = false;
  double y_lo = 0.0, y_hi = 0.0;
  for (const auto& row : result.cells) {
    for (const SweepCell& cell : row) {
      if (cell.n_trials == 0 || !std::isfinite(cell.nmse_db)) continue;
      if (!have_y) {
        y_lo = y_hi = cell.nmse_db;
        have_y = true;
      } else {
        y_lo = std::min(y_lo, cell.nmse_db);
        y_hi = std::max(y_hi, cell.nmse_db);
      }
    }
  }
  if (!have_y) {
    y_lo = -1.0;
    y_hi = 1.0;
  } else if (y_lo == y_hi) {
    y_lo -= 1.0;
    y_hi += 1.0;
  } else {
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }

  const auto px = [&](double x) {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
  };
  const auto py = [&](double y) {
    return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) +
         "\" height=\"" + coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + " " +
         coord(kHeight) + "\" font-family=\"DejaVu Sans, Helvetica, sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"" + coord(kWidth) + "\" height=\"" + coord(kHeight) +
         "\" fill=\"#ffffff\"/>\n";

  for (const double t : nice_ticks(x_lo, x_hi, 6)) {
    const std::string x = coord(px(t));
    svg += "<line x1=\"" + x + "\" y1=\"" + coord(kTop) + "\" x2=\"" + x + "\" y2=\"" +
           coord(kBottom) + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + coord(kBottom + 18) +
           "\" text-anchor=\"middle\" fill=\"#333333\">" + num6(t) + "</text>\n";
  }
  for (const double t : nice_ticks(y_lo, y_hi, 6)) {
    const std::string y = coord(py(t));
    svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + y + "\" x2=\"" + coord(kRight) +
           "\" y2=\"" + y + "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + coord(kLeft - 8) + "\" y=\"" + coord(py(t) + 4) +
           "\" text-anchor=\"end\" fill=\"#333333\">" + num6(t) + "</text>\n";
  }
  svg += "<rect x=\"" + coord(kLeft) + "\" y=\"" + coord(kTop) + "\" width=\"" +
         coord(kRight - kLeft) + "\" height=\"" + coord(kBottom - kTop) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  svg += "<text x=\"" + coord((kLeft + kRight) / 2) + "\" y=\"" + coord(kHeight - 16) +
         "\" text-anchor=\"middle\" fill=\"#000000\">" + result.axis.label() + "</text>\n";
  svg += "<text x=\"20\" y=\"" + coord((kTop + kBottom) / 2) +
         "\" text-anchor=\"middle\" fill=\"#000000\" transform=\"rotate(-90 20 " +
         coord((kTop + kBottom) / 2) + ")\">NMSE (dB)</text>\n";

  for (std::size_t e = 0; e < result.estimator_names.size(); ++e) {
    const char* color = kPalette[e % kPaletteSize];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < result.axis.values.size(); ++j) {
      const SweepCell& cell = result.cells[j][e];
      if (cell.n_trials == 0 || !std::isfinite(cell.nmse_db)) continue;
      pts.emplace_back(px(result.axis.values[j]), py(cell.nmse_db));
    }
    if (pts.size() >= 2) {
      svg += "<polyline fill=\"none\" stroke=\"";
      svg += color;
      svg += "\" stroke-width=\"1.8\" points=\"";
      for (std::size_t p = 0; p < pts.size(); ++p) {
        if (p) svg += ' ';
        svg += coord(pts[p].first) + "," + coord(pts[p].second);
      }
      svg += "\"/>\n";
    }
    for (const auto& [x, y] : pts) {
      svg += "<circle cx=\"" + coord(x) + "\" cy=\"" + coord(y) + "\" r=\"3.2\" fill=\"";
      svg += color;
      svg += "\"/>\n";
    }
  }

  for (std::size_t e = 0; e < result.estimator_names.size(); ++e) {
    const char* color = kPalette[e % kPaletteSize];
    const double y = kTop + 10 + 20 * static_cast<double>(e);
    svg += "<line x1=\"" + coord(kRight + 16) + "\" y1=\"" + coord(y) + "\" x2=\"" +
           coord(kRight + 44) + "\" y2=\"" + coord(y) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + coord(kRight + 50) + "\" y=\"" + coord(y + 4) +
           "\" fill=\"#000000\">" + result.estimator_names[e] + "</text>\n";
  }

  svg += "</svg>\n";

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << svg;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_summary(const SweepResult& result) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-12s %12s %12s %12s %9s\n", "axis",
                "estimator", "nmse_db", "mean_db", "stderr_db", "n_trials");
  out += line;
  for (std::size_t j = 0; j < result.axis.values.size(); ++j) {
    for (std::size_t e = 0; e < result.estimator_names.size(); ++e) {
      const SweepCell& cell = result.cells[j][e];
      std::snprintf(line, sizeof(line), "%-10s %-12s %12s %12s %12s %9d\n",
                    num6(result.axis.values[j]).c_str(), result.estimator_names[e].c_str(),
                    num6(cell.nmse_db).c_str(), num6(cell.mean_db).c_str(),
                    num6(cell.stderr_db).c_str(), cell.n_trials);
      out += line;
    }
  }
  return out;
}

}  // namespace elaasim
