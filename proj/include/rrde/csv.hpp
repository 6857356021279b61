#pragma once

#include <string>
#include <vector>

namespace rrde {

/// Comment lines (written with a leading "# "), a header, numeric rows.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// %.17g, so values read back bit-exactly.
std::string format_real(double v);

/// Comments first, then the header, then rows; '\n' line endings.
std::string render_csv(const Table& table);
void emit_csv(const Table& table, const std::string& path);

Table parse_csv(const std::string& text);
Table read_csv(const std::string& path);

}  // namespace rrde
