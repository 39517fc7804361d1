#include "stvo/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "stvo/core.hpp"

namespace stvo {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_number(const std::string& field)
{
    if (field == "nan") return std::nan("");
    if (field == "inf") return HUGE_VAL;
    if (field == "-inf") return -HUGE_VAL;
    double v = 0.0;
    const char* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, v);
    if (field.empty() || res.ec != std::errc() || res.ptr != end) {
        throw InvalidInput("not a number: '" + field + "'");
    }
    return v;
}

void CsvTable::add_row(const std::vector<double>& values)
{
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_number(v));
    add_row(std::move(row));
}

void CsvTable::add_row(std::vector<std::string> values)
{
    if (values.size() != header.size())
        throw InvalidInput("CsvTable: row width differs from header");
    rows.push_back(std::move(values));
}

namespace {

void write_line(std::ostream& os, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << fields[i];
    }
    os << '\n';
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void CsvTable::write(std::ostream& os) const
{
    write_line(os, header);
    for (const auto& row : rows) write_line(os, row);
}

void CsvTable::write(const std::filesystem::path& path) const
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    write(os);
    if (!os) throw InvalidInput("write to '" + path.string() + "' failed");
}

CsvTable read_csv(std::istream& is)
{
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.find('\r') != std::string::npos) throw InvalidInput("CSV: CR line ending");
        if (line.find('"') != std::string::npos) throw InvalidInput("CSV: quoted field");
        auto fields = split_line(line);
        if (first) {
            if (fields.empty()) throw InvalidInput("CSV: empty header");
            table.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != table.header.size()) throw InvalidInput("CSV: ragged row");
            table.rows.push_back(std::move(fields));
        }
    }
    if (first) throw InvalidInput("CSV: empty file");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open '" + path.string() + "'");
    return read_csv(is);
}

std::size_t column(const CsvTable& table, const std::string& name)
{
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw InvalidInput("CSV: missing column '" + name + "'");
    return static_cast<std::size_t>(it - table.header.begin());
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::vector<double>& x,
                    const std::vector<PlotSeries>& series)
{
    const double W = 720, H = 420, left = 70, right = 160, top = 40, bottom = 50;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (double v : x) {
        if (std::isfinite(v)) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    }
    for (const auto& s : series) {
        if (s.y.size() != x.size())
            throw InvalidInput("write_svg_plot: series length differs from x");
        for (double v : s.y) {
            if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
        }
    }
    if (!(xmin <= xmax)) xmin = 0, xmax = 1;
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return top + (ymax - v) / (ymax - ymin) * ph; };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidInput("cannot open '" + path.string() + "' for writing");
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(title) << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
           << tick(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
           << tick(yv) << "</text>\n";
        os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << py(yv) << "\" y2=\""
           << py(yv) << "\" stroke=\"#e0e0e0\"/>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kPalette[k % (sizeof kPalette / sizeof *kPalette)];
        std::string d;
        bool pen_down = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double yv = series[k].y[i];
            if (!std::isfinite(yv) || !std::isfinite(x[i])) {
                pen_down = false;
                continue;
            }
            d += pen_down ? " L" : " M";
            d += tick(px(x[i])) + " " + tick(py(yv));
            pen_down = true;
        }
        os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\"/>\n";
        const double ly = top + 14 + 18 * static_cast<double>(k);
        os << "<line x1=\"" << left + pw + 12 << "\" x2=\"" << left + pw + 32 << "\" y1=\"" << ly
           << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">"
           << escape(series[k].label) << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw InvalidInput("write to '" + path.string() + "' failed");
}

}  // namespace stvo
