#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailmat/estim.hpp"
#include "tailmat/matrix.hpp"

namespace tailmat {

// full double precision, locale-independent
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_panel_csv(const std::string& path, const Panel& panel) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "p,n,s\n" << panel.p() << "," << panel.n() << "," << panel.lag << "\n";
  for (std::size_t i = 0; i < panel.p(); ++i) {
    const double* row = panel.values.row(i);
    for (std::size_t t = 0; t < panel.n(); ++t) {
      if (t) out << ",";
      out << format_double(row[t]);
    }
    out << "\n";
  }
}

inline Panel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("p,n,s", 0) != 0) {
    throw std::runtime_error(path + ": missing p,n,s header");
  }
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing dimension row");
  std::size_t p = 0, n = 0;
  int s = 0;
  {
    std::istringstream ss(line);
    char comma;
    if (!(ss >> p >> comma >> n >> comma >> s)) {
      throw std::runtime_error(path + ": bad dimension row");
    }
  }
  Panel panel;
  panel.values = Matrix(p, n);
  panel.lag = s;
  for (std::size_t i = 0; i < p; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated panel");
    std::istringstream ss(line);
    std::string cell;
    for (std::size_t t = 0; t < n; ++t) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row");
      panel.values(i, t) = std::stod(cell);
    }
  }
  return panel;
}

struct ReturnsReadReport {
  std::size_t rejected_rows = 0;
};

// Returns CSV: header row of series labels, then either one column per series
// (series_in_columns) or one row per series.  Rows with gaps are dropped and
// counted.
inline ReturnsPanel read_returns_csv(const std::string& path, bool series_in_columns,
                                     ReturnsReadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> labels;
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) labels.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  std::size_t rejected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    bool ok = true;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (...) {
        ok = false;
        break;
      }
    }
    if (!ok || (series_in_columns && row.size() != labels.size())) {
      ++rejected;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (report) report->rejected_rows = rejected;
  if (rows.empty()) throw std::runtime_error(path + ": no usable data rows");

  ReturnsPanel panel;
  if (series_in_columns) {
    const std::size_t p = labels.size(), n = rows.size();
    if (n < 10) throw std::runtime_error(path + ": need at least 10 observations");
    panel.labels = labels;
    panel.values = Matrix(p, n);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t i = 0; i < p; ++i) panel.values(i, t) = rows[t][i];
  } else {
    // header labels name the rows; each data line is one series
    const std::size_t p = rows.size();
    const std::size_t n = rows[0].size();
    if (n < 10) throw std::runtime_error(path + ": need at least 10 observations");
    for (const auto& r : rows) {
      if (r.size() != n) throw std::runtime_error(path + ": ragged series rows");
    }
    panel.labels = labels;
    panel.labels.resize(p, "");
    panel.values = Matrix(p, n);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t t = 0; t < n; ++t) panel.values(i, t) = rows[i][t];
  }
  return panel;
}

}  // namespace tailmat
