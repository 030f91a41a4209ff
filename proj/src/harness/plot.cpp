#include "nasa/harness/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace nasa {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    if (lineno == 1) {
      t.columns = split(line);
      if (t.columns.empty() || t.columns.front() != "step") {
        throw std::runtime_error(where + "header must start with 'step'");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size()) {
      throw std::runtime_error(where + "expected " + std::to_string(t.columns.size()) + " fields, got " +
                               std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw std::runtime_error(where + "malformed number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (lineno == 0) throw std::runtime_error(path.string() + ":1: missing header");
  return t;
}

std::string run_label(const std::filesystem::path& csv) {
  std::string dir = csv.parent_path().filename().string();
  static const std::regex seed_suffix("[-_]?seed[0-9]+$");
  dir = std::regex_replace(dir, seed_suffix, "");
  return dir.empty() ? csv.stem().string() : dir;
}

std::vector<Curve> aggregate(const std::vector<std::filesystem::path>& csvs, const std::vector<CsvTable>& tables,
                             const std::string& column, std::size_t max_points) {
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& cols = tables[i].columns;
    if (std::find(cols.begin(), cols.end(), column) != cols.end()) groups[run_label(csvs[i])].push_back(i);
  }
  std::vector<Curve> curves;
  for (const auto& [label, members] : groups) {
    double max_step = 0;
    std::size_t max_rows = 0;
    for (std::size_t i : members) {
      max_rows = std::max(max_rows, tables[i].rows.size());
      for (const auto& r : tables[i].rows) max_step = std::max(max_step, r[0]);
    }
    // Bin width 0 means align on exact step values.
    const double width = max_rows > max_points ? std::ceil((max_step + 1) / double(max_points)) : 0.0;
    std::map<double, std::vector<double>> per_bin;
    for (std::size_t i : members) {
      const auto& t = tables[i];
      const std::size_t col = std::size_t(std::find(t.columns.begin(), t.columns.end(), column) - t.columns.begin());
      std::map<double, std::pair<double, int>> file_bins;
      for (const auto& r : t.rows) {
        const double key = width > 0 ? std::floor(r[0] / width) * width + width / 2 : r[0];
        auto& [sum, n] = file_bins[key];
        sum += r[col];
        ++n;
      }
      for (const auto& [key, acc] : file_bins) per_bin[key].push_back(acc.first / acc.second);
    }
    Curve c;
    c.label = label;
    for (const auto& [key, values] : per_bin) {
      double mean = 0;
      for (double v : values) mean += v;
      mean /= double(values.size());
      double var = 0;
      for (double v : values) var += (v - mean) * (v - mean);
      c.x.push_back(key);
      c.mean.push_back(mean);
      c.stddev.push_back(std::sqrt(var / double(values.size())));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::string render_svg(const std::string& title, const std::vector<Curve>& curves) {
  constexpr double W = 640, H = 400, left = 70, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.x.size(); ++i) {
      if (!any) {
        x0 = x1 = c.x[i];
        y0 = y1 = c.mean[i];
        any = true;
      }
      x0 = std::min(x0, c.x[i]);
      x1 = std::max(x1, c.x[i]);
      y0 = std::min(y0, c.mean[i] - c.stddev[i]);
      y1 = std::max(y1, c.mean[i] + c.stddev[i]);
    }
  }
  if (x1 - x0 <= 0) x1 = x0 + 1;
  if (y1 - y0 <= 0) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return top + (1 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\"" << coord(pw) << "\" height=\""
     << coord(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    os << "<text x=\"" << coord(sx(xv)) << "\" y=\"" << coord(top + ph + 16) << "\" text-anchor=\"middle\">"
       << fmt(xv) << "</text>\n";
    os << "<text x=\"" << coord(left - 6) << "\" y=\"" << coord(sy(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << coord(left + pw / 2) << "\" y=\"" << coord(H - 10) << "\" text-anchor=\"middle\">step</text>\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    if (!c.x.empty()) {
      os << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < c.x.size(); ++i) os << coord(sx(c.x[i])) << ',' << coord(sy(c.mean[i] + c.stddev[i])) << ' ';
      for (std::size_t i = c.x.size(); i-- > 0;) os << coord(sx(c.x[i])) << ',' << coord(sy(c.mean[i] - c.stddev[i])) << ' ';
      os << "\"/>\n";
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < c.x.size(); ++i) os << coord(sx(c.x[i])) << ',' << coord(sy(c.mean[i])) << ' ';
      os << "\"/>\n";
    }
    const double ly = top + 14 + 18 * double(k);
    os << "<rect x=\"" << coord(left + pw + 12) << "\" y=\"" << coord(ly - 9) << "\" width=\"12\" height=\"10\" fill=\""
       << colour << "\"/>\n";
    os << "<text x=\"" << coord(left + pw + 30) << "\" y=\"" << coord(ly) << "\">" << c.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> plot_metrics(const std::vector<std::filesystem::path>& csvs,
                                                const std::filesystem::path& out_dir) {
  if (csvs.empty()) throw std::invalid_argument("plot needs at least one metrics file");
  std::vector<CsvTable> tables;
  for (const auto& p : csvs) tables.push_back(read_csv(p));
  std::vector<std::string> columns;
  for (const auto& t : tables) {
    for (std::size_t i = 1; i < t.columns.size(); ++i) {
      if (std::find(columns.begin(), columns.end(), t.columns[i]) == columns.end()) columns.push_back(t.columns[i]);
    }
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& col : columns) {
    const auto path = out_dir / (col + ".svg");
    std::ofstream os(path);
    os << render_svg(col, aggregate(csvs, tables, col));
    if (!os) throw std::runtime_error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace nasa
