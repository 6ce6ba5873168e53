#pragma once

// Tables, CSV/TSV/SVG emission and all-or-nothing file output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace fdrlink::experiments {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw std::logic_error("Table " + name + ": row width differs from header");
    rows.push_back(std::move(row));
  }
  std::size_t column(const std::string& key) const {
    const auto it = std::find(header.begin(), header.end(), key);
    if (it == header.end()) throw std::out_of_range("Table " + name + ": no column " + key);
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

/// RFC 4180: comma separated, CRLF line breaks, quoted where needed.
inline void write_csv(std::ostream& os, const Table& t) {
  auto line = [&](const auto& cells, auto fmt) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_escape(fmt(cells[i]));
    }
    os << "\r\n";
  };
  line(t.header, [](const std::string& s) { return s; });
  for (const auto& row : t.rows) line(row, [](const Cell& c) { return format_cell(c); });
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

/// A named x/y polyline for plotting.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Tab-separated: series label, x, y; one point per line.
inline std::string to_tsv(const std::vector<Series>& series) {
  std::ostringstream os;
  os << "series\tx\ty\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os << s.label << '\t' << format_double(s.x[i]) << '\t' << format_double(s.y[i]) << '\n';
    }
  }
  return os.str();
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Minimal line chart with linear axes.
inline std::string to_svg(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
  constexpr double W = 640, H = 420, L = 70, R = 170, T = 40, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& s : series) {
    for (double v : s.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (!(x1 > x0)) { x0 -= 0.5; x1 += 0.5; }
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
     << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    char xs[32], ys[32];
    std::snprintf(xs, sizeof xs, "%.3g", xv);
    std::snprintf(ys, sizeof ys, "%.3g", yv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << xs
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << ys
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << xml_escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = palette[i % (sizeof palette / sizeof *palette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size(); ++k) os << (k ? " " : "") << px(s.x[k]) << ',' << py(s.y[k]);
    os << "\"/>\n";
    os << "<text x=\"" << W - R + 8 << "\" y=\"" << T + 14 * (i + 1) << "\" font-size=\"10\" fill=\"" << colour
       << "\">" << xml_escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collects file contents and writes them together: every file goes to a
/// temporary name first and is renamed only after all of them were written.
class OutputSet {
 public:
  void add(const std::string& filename, std::string content) { files_[filename] = std::move(content); }
  void add_table(const Table& t) { add(t.name + ".csv", to_csv(t)); }
  const std::map<std::string, std::string>& files() const { return files_; }

  std::vector<std::filesystem::path> commit(const std::filesystem::path& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory " + dir.string());
    std::vector<fs::path> staged;
    auto discard = [&] {
      for (const auto& p : staged) fs::remove(p, ec);
    };
    for (const auto& [name, content] : files_) {
      const fs::path tmp = dir / ("." + name + ".partial");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (out) {
        staged.push_back(tmp);
        out << content;
        out.close();
      }
      if (!out) {
        discard();
        throw OutputError("cannot write " + (dir / name).string());
      }
    }
    std::vector<fs::path> written;
    std::size_t k = 0;
    for (const auto& [name, content] : files_) {
      const fs::path target = dir / name;
      fs::rename(staged[k++], target, ec);
      if (ec) {
        discard();
        throw OutputError("cannot write " + target.string());
      }
      written.push_back(target);
    }
    return written;
  }

 private:
  std::map<std::string, std::string> files_;
};

}  // namespace fdrlink::experiments
