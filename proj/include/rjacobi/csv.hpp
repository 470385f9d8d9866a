#pragma once

#include <string>
#include <vector>

namespace rjacobi {

// Shortest text form that round-trips an IEEE double ("%.17g"); used for
// every numeric field the tool writes so reruns are byte-identical.
std::string fmt17(double v);

// Writes a rectangular table as CSV: comma separator, LF line endings,
// header row then one row per index. All columns must share one length.
// Throws std::runtime_error if the file cannot be written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

}  // namespace rjacobi
