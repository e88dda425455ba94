// Copyright 2026 The HuberDP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "huberdp/report.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <tuple>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"

namespace huberdp {
namespace {

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

bool ParseNum(absl::string_view s, double& out) {
  if (s == "nan") {
    out = std::nan("");
    return true;
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool ParseCount(absl::string_view s, size_t& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

absl::Status WithOutput(const std::string& path,
                        const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return std::cout ? absl::OkStatus()
                     : absl::InternalError("io error: writing to stdout");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("io error: cannot open ", path));
  write(out);
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("io error: writing ", path));
  return absl::OkStatus();
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};

}  // namespace

void WriteCsv(std::span<const SweepRow> rows, std::ostream& out) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << r.method << ',' << r.dist << ',' << r.d << ',' << r.n << ','
        << Num(r.m_or_gamma) << ',' << r.trials << ',' << Num(r.mse_mean)
        << ',' << Num(r.mse_stderr) << ','
        << (r.tuned_param.has_value() ? Num(*r.tuned_param) : "") << '\n';
  }
}

absl::StatusOr<std::vector<SweepRow>> ReadCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    return absl::InvalidArgumentError("parse error: line 1: bad CSV header");
  }
  std::vector<SweepRow> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<absl::string_view> f = absl::StrSplit(line, ',');
    auto bad = [&](std::string_view what) {
      return absl::InvalidArgumentError(absl::StrCat(
          "parse error: line ", line_no, ": ", std::string(what)));
    };
    if (f.size() != 9) return bad("expected 9 fields");
    SweepRow r;
    r.method = std::string(f[0]);
    r.dist = std::string(f[1]);
    if (!ParseCount(f[2], r.d) || !ParseCount(f[3], r.n) ||
        !ParseNum(f[4], r.m_or_gamma) || !ParseCount(f[5], r.trials) ||
        !ParseNum(f[6], r.mse_mean) || !ParseNum(f[7], r.mse_stderr)) {
      return bad("malformed number");
    }
    if (!f[8].empty()) {
      double v;
      if (!ParseNum(f[8], v)) return bad("malformed tuned_param");
      r.tuned_param = v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

absl::Status EmitCsv(std::span<const SweepRow> rows, const std::string& path) {
  return WithOutput(path, [&](std::ostream& out) { WriteCsv(rows, out); });
}

void WritePlotSvg(std::span<const SweepRow> rows, std::string_view title,
                  std::ostream& out) {
  using SeriesKey = std::tuple<std::string, std::string, size_t, size_t>;
  std::map<SeriesKey, std::vector<std::pair<double, double>>> series;
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const SweepRow& r : rows) {
    if (!(r.m_or_gamma > 0.0) || !(r.mse_mean > 0.0) ||
        !std::isfinite(r.m_or_gamma) || !std::isfinite(r.mse_mean)) {
      continue;
    }
    const double lx = std::log10(r.m_or_gamma);
    const double ly = std::log10(r.mse_mean);
    series[{r.method, r.dist, r.d, r.n}].emplace_back(lx, ly);
    x_lo = std::min(x_lo, lx);
    x_hi = std::max(x_hi, lx);
    y_lo = std::min(y_lo, ly);
    y_hi = std::max(y_hi, ly);
  }
  if (series.empty()) {
    x_lo = y_lo = 0.0;
    x_hi = y_hi = 1.0;
  }
  // Whole decades, at least one wide.
  x_lo = std::floor(x_lo);
  y_lo = std::floor(y_lo);
  x_hi = std::max(std::ceil(x_hi), x_lo + 1.0);
  y_hi = std::max(std::ceil(y_hi), y_lo + 1.0);

  const double width = 640, height = 440;
  const double left = 80, right = 200, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double lx) { return left + (lx - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double ly) {
    return top + ph - (ly - y_lo) / (y_hi - y_lo) * ph;
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << absl::StrFormat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\" "
      "viewBox=\"0 0 %g %g\" font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height, width, height);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << absl::StrFormat(
      "<text x=\"%g\" y=\"24\" font-size=\"15\">%s</text>\n", left,
      XmlEscape(title));
  out << absl::StrFormat(
      "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
      "stroke=\"black\"/>\n",
      left, top, pw, ph);
  for (double e = x_lo; e <= x_hi + 1e-9; e += 1.0) {
    out << absl::StrFormat(
        "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"#ddd\"/>\n"
        "<text x=\"%.2f\" y=\"%g\" text-anchor=\"middle\">1e%d</text>\n",
        sx(e), top, sx(e), top + ph, sx(e), top + ph + 18,
        static_cast<int>(e));
  }
  for (double e = y_lo; e <= y_hi + 1e-9; e += 1.0) {
    out << absl::StrFormat(
        "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/>\n"
        "<text x=\"%g\" y=\"%.2f\" text-anchor=\"end\">1e%d</text>\n",
        left, sy(e), left + pw, sy(e), left - 6, sy(e) + 4,
        static_cast<int>(e));
  }
  out << absl::StrFormat(
      "<text x=\"%g\" y=\"%g\" text-anchor=\"middle\">m or gamma (log "
      "scale)</text>\n",
      left + pw / 2, height - 16);
  out << absl::StrFormat(
      "<text x=\"18\" y=\"%g\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 %g)\">MSE (log scale)</text>\n",
      top + ph / 2, top + ph / 2);

  size_t idx = 0;
  for (auto& [key, points] : series) {
    std::sort(points.begin(), points.end());
    const char* color = kPalette[idx % std::size(kPalette)];
    std::string coords;
    for (const auto& [lx, ly] : points) {
      absl::StrAppendFormat(&coords, "%.2f,%.2f ", sx(lx), sy(ly));
    }
    out << absl::StrFormat(
        "<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"2\" "
        "points=\"%s\"/>\n",
        color, coords);
    for (const auto& [lx, ly] : points) {
      out << absl::StrFormat(
          "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", sx(lx),
          sy(ly), color);
    }
    const auto& [method, dist, d, n] = key;
    const double ly = top + 14 + 18 * static_cast<double>(idx);
    out << absl::StrFormat(
        "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" "
        "stroke-width=\"2\"/>\n"
        "<text x=\"%g\" y=\"%g\">%s</text>\n",
        left + pw + 10, ly - 4, left + pw + 30, ly - 4, color,
        left + pw + 36, ly,
        XmlEscape(absl::StrCat(method, " ", dist, " d=", d, " n=", n)));
    ++idx;
  }
  out << "</svg>\n";
}

absl::Status EmitPlot(std::span<const SweepRow> rows, std::string_view title,
                      const std::string& path) {
  return WithOutput(path,
                    [&](std::ostream& out) { WritePlotSvg(rows, title, out); });
}

}  // namespace huberdp
