#pragma once

// CSV and SVG emitters. Numbers use the shortest round-trip decimal form, so
// identical values always produce identical bytes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stvo {

// Shortest round-trip form; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> values);
  // Comma separated, header first, LF line endings.
  void write(std::ostream& os) const;
  void write(const std::filesystem::path& path) const;
};

// Strict reader for files written by CsvTable: rejects CR, ragged rows and
// quoted fields. Throws InvalidInput.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable read_csv(std::istream& is);
// Column index by name; throws InvalidInput if absent.
std::size_t column(const CsvTable& table, const std::string& name);
// Parses a field written by format_number; throws InvalidInput otherwise.
double parse_number(const std::string& field);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

// Static line plot with axes, tick labels and a legend. Non-finite points
// break the line.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::vector<double>& x,
                    const std::vector<PlotSeries>& series);

}  // namespace stvo
