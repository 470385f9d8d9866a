#include "rjacobi/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rjacobi {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw std::invalid_argument("write_csv: header/column count mismatch");
  if (columns.empty()) throw std::invalid_argument("write_csv: no columns");
  const std::size_t n = columns.front().size();
  for (const auto& col : columns) {
    if (col.size() != n)
      throw std::invalid_argument("write_csv: ragged columns");
  }

  std::ofstream out(path, std::ios::binary);  // binary: LF on every platform
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) out << ',';
      out << fmt17(columns[j][i]);
    }
    out << '\n';
  }
  out.close();
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

}  // namespace rjacobi
