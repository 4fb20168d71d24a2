#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace liemom::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 640;
  int height = 400;
};

namespace detail {

inline void append_number(std::string& out, double v, std::chars_format fmt, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, fmt, precision);
  out.append(buf, res.ptr);
}

inline std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

inline Range data_range(const std::vector<Series>& series, bool use_y) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    const auto& v = use_y ? s.y : s.x;
    for (double d : v) {
      if (!std::isfinite(d)) continue;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  if (!(lo <= hi)) return {};
  if (lo == hi) {
    const double pad = std::max(0.5, 0.5 * std::abs(lo));
    return {lo - pad, hi + pad};
  }
  return {lo, hi};
}

}  // namespace detail

// Plain single-file SVG: axes with five ticks per side, one polyline per
// series, legend in the top-right corner.  All coordinates are emitted with a
// fixed precision so re-rendering the same chart reproduces identical bytes.
inline std::string render(const LineChart& chart) {
  constexpr int kLeft = 70, kRight = 20, kTop = 34, kBottom = 46;
  constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                      "#9467bd", "#ff7f0e", "#8c564b"};
  constexpr int kPaletteSize = 6;
  const int w = chart.width, h = chart.height;
  const detail::Range rx = detail::data_range(chart.series, false);
  const detail::Range ry = detail::data_range(chart.series, true);
  const auto px = [&](double x) {
    return kLeft + (x - rx.lo) / (rx.hi - rx.lo) * (w - kLeft - kRight);
  };
  const auto py = [&](double y) {
    return h - kBottom - (y - ry.lo) / (ry.hi - ry.lo) * (h - kTop - kBottom);
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + std::to_string(w / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
         detail::escape(chart.title) + "</text>\n";
  out += "<text x=\"" + std::to_string(w / 2) + "\" y=\"" + std::to_string(h - 10) +
         "\" text-anchor=\"middle\">" + detail::escape(chart.x_label) + "</text>\n";
  out += "<text transform=\"translate(16," + std::to_string(h / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + detail::escape(chart.y_label) + "</text>\n";

  for (int i = 0; i < 5; ++i) {
    const double fx = rx.lo + i * (rx.hi - rx.lo) / 4.0;
    const double fy = ry.lo + i * (ry.hi - ry.lo) / 4.0;
    std::string sx, sy, tx, ty;
    detail::append_number(sx, px(fx), std::chars_format::fixed, 2);
    detail::append_number(sy, py(fy), std::chars_format::fixed, 2);
    detail::append_number(tx, fx, std::chars_format::general, 4);
    detail::append_number(ty, fy, std::chars_format::general, 4);
    out += "<line x1=\"" + sx + "\" y1=\"" + std::to_string(h - kBottom) + "\" x2=\"" + sx +
           "\" y2=\"" + std::to_string(h - kBottom + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + sx + "\" y=\"" + std::to_string(h - kBottom + 18) +
           "\" text-anchor=\"middle\">" + tx + "</text>\n";
    out += "<line x1=\"" + std::to_string(kLeft - 5) + "\" y1=\"" + sy + "\" x2=\"" +
           std::to_string(kLeft) + "\" y2=\"" + sy + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + std::to_string(kLeft - 8) + "\" y=\"" + sy +
           "\" text-anchor=\"end\" dominant-baseline=\"middle\">" + ty + "</text>\n";
  }
  out += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(kTop) + "\" x2=\"" +
         std::to_string(kLeft) + "\" y2=\"" + std::to_string(h - kBottom) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + std::to_string(kLeft) + "\" y1=\"" + std::to_string(h - kBottom) +
         "\" x2=\"" + std::to_string(w - kRight) + "\" y2=\"" + std::to_string(h - kBottom) +
         "\" stroke=\"black\"/>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& ser = chart.series[s];
    const char* color = kPalette[s % kPaletteSize];
    std::string pts;
    const std::size_t n = std::min(ser.x.size(), ser.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      if (!pts.empty()) pts += ' ';
      detail::append_number(pts, px(ser.x[i]), std::chars_format::fixed, 2);
      pts += ',';
      detail::append_number(pts, py(ser.y[i]), std::chars_format::fixed, 2);
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" +
           pts + "\"/>\n";
    const int ly = kTop + 8 + 16 * static_cast<int>(s);
    out += "<line x1=\"" + std::to_string(w - kRight - 130) + "\" y1=\"" + std::to_string(ly) +
           "\" x2=\"" + std::to_string(w - kRight - 106) + "\" y2=\"" + std::to_string(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + std::to_string(w - kRight - 100) + "\" y=\"" + std::to_string(ly + 4) +
           "\">" + detail::escape(ser.label) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace liemom::svg
