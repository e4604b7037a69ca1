// Copyright 2026 The rollattr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rollattr/report.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "rollattr/error.hpp"
#include "rollattr/rolling.hpp"

namespace rollattr {

std::string format_real(double x) {
  if (x == 0.0) return "0";  // no "-0"
  return fmt::format("{:.9g}", x);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_csv_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

void write_curve_csv(std::ostream& out, const RollingResult& r) {
  out << "group_index,first_line,last_line,p_author1,p_author2_negated,"
         "average\n";
  for (std::size_t g = 0; g < r.groups.size(); ++g) {
    const auto& gr = r.groups[g];
    const auto s = r.signed_point(g);
    out << gr.group_index << ',' << gr.first_line << ',' << gr.last_line << ','
        << format_real(s.primary) << ',' << format_real(s.secondary) << ','
        << format_real(s.average) << '\n';
  }
}

std::vector<CurveRow> read_curve_csv(std::istream& in) {
  std::vector<CurveRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto f = split_csv_record(line);
    if (f.size() != 6) {
      throw ParseError(line_no, f.size() + 1, "expected 6 curve columns");
    }
    try {
      rows.push_back({std::stoul(f[0]), std::stoi(f[1]), std::stoi(f[2]),
                      std::stod(f[3]), std::stod(f[4]), std::stod(f[5])});
    } catch (const std::logic_error&) {
      throw ParseError(line_no, 1, "non-numeric curve field");
    }
  }
  return rows;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
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
        out += ch;
    }
  }
  return out;
}

const char* dash_for(FeatureMode m) {
  switch (m) {
    case FeatureMode::kCombined:
      return "";
    case FeatureMode::kRhythm:
      return "8,5";
    case FeatureMode::kWords:
      return "2,4";
  }
  return "";
}

constexpr double kWidth = 1200.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 40.0;

}  // namespace

void write_curve_svg(std::ostream& out, std::span<const RollingResult> results,
                     std::span<const Boundary> boundaries) {
  int lo = 0;
  int hi = 1;
  bool any = false;
  for (const auto& r : results) {
    for (const auto& g : r.groups) {
      lo = any ? std::min(lo, g.first_line) : g.first_line;
      hi = any ? std::max(hi, g.last_line) : g.last_line;
      any = true;
    }
  }
  if (hi <= lo) hi = lo + 1;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_of = [&](double line) {
    return kLeft + (line - lo) / static_cast<double>(hi - lo) * plot_w;
  };
  auto y_of = [&](double v) { return kTop + (1.0 - v) / 2.0 * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" "
      "height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and reference lines at +1, 0, -1.
  for (double v : {1.0, 0.5, 0.0, -0.5, -1.0}) {
    out << fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
        "stroke=\"{}\" stroke-width=\"{}\"/>\n",
        kLeft, y_of(v), kLeft + plot_w, y_of(v),
        v == 0.0 ? "#000000" : "#dddddd", v == 0.0 ? "1" : "0.5");
    out << fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" "
        "text-anchor=\"end\">{}</text>\n",
        kLeft - 6.0, y_of(v) + 4.0, format_real(v));
  }

  for (const auto& b : boundaries) {
    if (b.line_index < lo || b.line_index > hi) continue;
    const double x = x_of(b.line_index);
    out << fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
        "stroke=\"#888888\" stroke-width=\"0.8\"/>\n",
        x, kTop, x, kTop + plot_h);
    out << fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" "
        "text-anchor=\"middle\">{}</text>\n",
        x, kTop - 8.0, xml_escape(b.label));
  }

  auto polyline = [&](const RollingResult& r, auto value, const char* color,
                      const char* dash, double width) {
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"" << format_real(width) << "\"";
    if (*dash) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (std::size_t g = 0; g < r.groups.size(); ++g) {
      const auto& gr = r.groups[g];
      if (g) out << ' ';
      out << fmt::format("{:.2f},{:.2f}",
                         x_of(0.5 * (gr.first_line + gr.last_line)),
                         y_of(value(r.signed_point(g))));
    }
    out << "\"/>\n";
  };

  if (!results.empty()) {
    const auto& first = results.front();
    polyline(first, [](const SignedPoint& s) { return s.primary; }, "#1f77b4",
             dash_for(first.mode), 1.2);
    polyline(first, [](const SignedPoint& s) { return s.secondary; },
             "#d62728", dash_for(first.mode), 1.2);
  }
  for (const auto& r : results) {
    polyline(r, [](const SignedPoint& s) { return s.average; }, "#000000",
             dash_for(r.mode), 1.6);
  }

  // Legend.
  if (!results.empty()) {
    const auto& first = results.front();
    double y = kHeight - 14.0;
    double x = kLeft;
    auto legend = [&](const std::string& text, const char* color,
                      const char* dash) {
      out << fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
          "stroke=\"{}\" stroke-width=\"1.6\"",
          x, y - 4.0, x + 24.0, y - 4.0, color);
      if (*dash) out << " stroke-dasharray=\"" << dash << "\"";
      out << "/>\n";
      out << fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\">{}"
                         "</text>\n",
                         x + 28.0, y, xml_escape(text));
      x += 40.0 + 7.0 * static_cast<double>(text.size());
    };
    legend(first.authors.at(first.primary), "#1f77b4", "");
    legend("-" + first.authors.at(first.secondary), "#d62728", "");
    for (const auto& r : results) {
      legend(fmt::format("average ({})", to_string(r.mode)), "#000000",
             dash_for(r.mode));
    }
  }
  out << "</svg>\n";
}

}  // namespace rollattr
