#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rrde/errors.hpp"

namespace rrde {

/// Missing or malformed configuration (usage error).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Flat key=value configuration. Lines starting with '#' and blank lines are
/// ignored; a key may repeat (e.g. constraint=), later set() calls replace.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  std::vector<std::string> all(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer_or(const std::string& key, long long fallback) const;
  void set(const std::string& key, const std::string& value);

  /// Directory that relative paths in the configuration are resolved against.
  const std::string& base_dir() const { return base_; }
  void set_base_dir(std::string dir) { base_ = std::move(dir); }
  std::string resolve(const std::string& path) const;

  /// FNV-1a 64 over the sorted "key=value\n" lines, excluding the given keys.
  std::uint64_t hash(const std::vector<std::string>& exclude = {"out", "config"}) const;
  const std::multimap<std::string, std::string>& entries() const { return kv_; }

 private:
  std::multimap<std::string, std::string> kv_;
  std::string base_ = ".";
};

/// Whitespace or comma separated reals.
std::vector<double> parse_reals(const std::string& text);
double parse_real(const std::string& text);

}  // namespace rrde
