#include "rrde/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rrde {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) throw ConfigError("not a number: '" + text + "'");
  return v;
}

std::vector<double> parse_reals(const std::string& text) {
  std::string s = text;
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_real(tok));
  return out;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(origin + ":" + std::to_string(no) + ": expected key=value");
    c.kv_.emplace(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  Config c = parse(ss.str(), path);
  const std::filesystem::path dir = std::filesystem::path(path).parent_path();
  c.base_ = dir.empty() ? "." : dir.string();
  return c;
}

const std::string& Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

std::vector<std::string> Config::all(const std::string& key) const {
  std::vector<std::string> v;
  auto [a, b] = kv_.equal_range(key);
  for (auto it = a; it != b; ++it) v.push_back(it->second);
  return v;
}

double Config::number(const std::string& key) const {
  try {
    return parse_real(get(key));
  } catch (const ConfigError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

double Config::number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

long long Config::integer(const std::string& key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
    throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
  return v;
}

long long Config::integer_or(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

void Config::set(const std::string& key, const std::string& value) {
  kv_.erase(key);
  kv_.emplace(key, value);
}

std::string Config::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_) / p).lexically_normal().string();
}

std::uint64_t Config::hash(const std::vector<std::string>& exclude) const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : kv_) {
    bool skip = false;
    for (const auto& e : exclude) skip = skip || e == k;
    if (skip) continue;
    const std::string line = k + "=" + v + "\n";
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace rrde
