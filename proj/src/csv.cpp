#include "rrde/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rrde/config.hpp"

namespace rrde {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const Table& t) {
  if (t.header.empty()) throw ConfigError("emit_csv: empty header");
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw ConfigError("emit_csv: row width differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ",";
      out += format_real(r[i]);
    }
    out += "\n";
  }
  return out;
}

void emit_csv(const Table& t, const std::string& path) {
  const std::string s = render_csv(t);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("emit_csv: cannot write " + path);
  f << s;
  if (!f) throw Error("emit_csv: write failed for " + path);
}

Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header) {
      for (auto& c : cells) {
        const auto a = c.find_first_not_of(' ');
        const auto b = c.find_last_not_of(' ');
        c = a == std::string::npos ? "" : c.substr(a, b - a + 1);
      }
      t.header = std::move(cells);
      header = true;
      continue;
    }
    if (cells.size() != t.header.size()) throw ConfigError("csv: row width differs from header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_real(c));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigError("csv: no header line");
  return t;
}

Table read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace rrde
