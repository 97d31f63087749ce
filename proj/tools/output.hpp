#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cli {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
  void add(std::vector<double> row);
};

enum class PlotStyle { Lines, Points };

// 17 significant digits, '.' decimal point, header row first.
std::string format_number(double v);
void write_csv(const Table& t, std::ostream& out);

// First column on the x axis, every other column as one series.
void write_svg(const Table& t, std::ostream& out, PlotStyle style);

}  // namespace cli
