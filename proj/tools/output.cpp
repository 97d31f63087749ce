#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace cli {

void Table::add(std::vector<double> row) {
  if (row.size() != columns.size()) throw std::logic_error("table: row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << '\n';
  }
}

namespace {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void take(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (hi - lo <= 1e-300 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_svg(const Table& t, std::ostream& out, PlotStyle style) {
  const double W = 640, H = 440, left = 80, right = 20, top = 20, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  Range rx, ry;
  for (const auto& row : t.rows) {
    rx.take(row[0]);
    for (std::size_t j = 1; j < row.size(); ++j) ry.take(row[j]);
  }
  rx.finish();
  ry.finish();
  auto X = [&](double v) { return left + pw * (v - rx.lo) / (rx.hi - rx.lo); };
  auto Y = [&](double v) { return top + ph * (1.0 - (v - ry.lo) / (ry.hi - ry.lo)); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\">" << short_number(rx.lo) << "</text>\n";
  out << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"end\">" << short_number(rx.hi)
      << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << short_number(ry.lo)
      << "</text>\n";
  out << "<text x=\"" << left - 6 << "\" y=\"" << top + 12 << "\" text-anchor=\"end\">" << short_number(ry.hi)
      << "</text>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">"
      << escape(t.columns[0]) << "</text>\n";
  std::string ylabel;
  for (std::size_t j = 1; j < t.columns.size(); ++j) ylabel += (j > 1 ? ", " : "") + t.columns[j];
  out << "<text transform=\"translate(18," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(ylabel) << "</text>\n";
  out << "</g>\n";

  for (std::size_t j = 1; j < t.columns.size(); ++j) {
    const char* color = kColors[(j - 1) % 6];
    if (style == PlotStyle::Lines) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      bool first = true;
      for (const auto& row : t.rows) {
        if (!std::isfinite(row[0]) || !std::isfinite(row[j])) continue;
        out << (first ? "" : " ") << short_number(X(row[0])) << "," << short_number(Y(row[j]));
        first = false;
      }
      out << "\"/>\n";
    } else {
      for (const auto& row : t.rows) {
        if (!std::isfinite(row[0]) || !std::isfinite(row[j])) continue;
        out << "<circle cx=\"" << short_number(X(row[0])) << "\" cy=\"" << short_number(Y(row[j]))
            << "\" r=\"1.5\" fill=\"" << color << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
}

}  // namespace cli
