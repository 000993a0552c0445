#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace migsim {

// Minimal TOML-style document: [section] headers, dotted keys, scalars
// (string, integer, float, bool) and single-line arrays of scalars.  That
// subset covers every config this project reads; anything fancier is
// rejected with a located error.
class TomlDocument {
 public:
  using Value = std::variant<bool, long long, double, std::string,
                             std::vector<double>, std::vector<std::string>>;

  static TomlDocument parse(const std::string& text,
                            const std::string& origin = "<string>");
  static TomlDocument parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  bool get_bool(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key) const;
  double get_double(const std::string& key) const;  // accepts integers
  const std::string& get_string(const std::string& key) const;
  std::vector<double> get_double_array(const std::string& key) const;

  bool get_bool(const std::string& key, bool fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_double_array(const std::string& key,
                                       const std::vector<double>& fallback) const;

  // CLI override: parses `raw` like a file value, with bare words accepted
  // as strings for ergonomics.
  void set_from_string(const std::string& key, const std::string& raw);

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }

  const std::map<std::string, Value>& entries() const { return values_; }

  // Sorted key=value serialization with fixed number formatting; the basis
  // for config hashing and resolved-config dumps.
  std::string canonical() const;

 private:
  std::map<std::string, Value> values_;
};

// FNV-1a over the canonical serialization.
std::uint64_t fnv1a64(const std::string& text);

}  // namespace migsim
