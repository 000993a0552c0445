#include "migsim/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "migsim/errors.hpp"

namespace migsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  bool prev_dot = true;  // key may not start with a dot
  for (char c : k) {
    if (c == '.') {
      if (prev_dot) return false;
      prev_dot = true;
      continue;
    }
    prev_dot = false;
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return !prev_dot;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (c == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw config_error(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string parse_quoted(const std::string& raw, const std::string& origin,
                         int line) {
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    char c = raw[i];
    if (c == '\\') {
      if (i + 2 >= raw.size()) fail(origin, line, "dangling escape in string");
      const char e = raw[++i];
      if (e == '"') c = '"';
      else if (e == '\\') c = '\\';
      else fail(origin, line, std::string("unsupported escape \\") + e);
    }
    out.push_back(c);
  }
  return out;
}

bool looks_like_int(const std::string& s) {
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

TomlDocument::Value parse_scalar(const std::string& raw,
                                 const std::string& origin, int line,
                                 bool allow_bare) {
  if (raw.empty()) fail(origin, line, "empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') {
      fail(origin, line, "unterminated string");
    }
    return parse_quoted(raw, origin, line);
  }
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (looks_like_int(raw)) {
    try {
      return static_cast<long long>(std::stoll(raw));
    } catch (const std::exception&) {
      fail(origin, line, "integer out of range: " + raw);
    }
  }
  {
    std::size_t pos = 0;
    try {
      const double d = std::stod(raw, &pos);
      if (pos == raw.size()) return d;
    } catch (const std::exception&) {
    }
  }
  // Override values arrive unquoted from the shell; anything that is not a
  // literal is taken verbatim (paths, preset names).  File parsing is strict.
  if (allow_bare) return raw;
  fail(origin, line, "cannot parse value: " + raw);
}

std::vector<std::string> split_array(const std::string& inner,
                                     const std::string& origin, int line) {
  std::vector<std::string> parts;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const char c = inner[i];
    if (c == '"' && (i == 0 || inner[i - 1] != '\\')) quoted = !quoted;
    if (c == ',' && !quoted) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string last = trim(cur);
  if (!last.empty()) parts.push_back(last);
  if (quoted) fail(origin, line, "unterminated string in array");
  return parts;
}

TomlDocument::Value parse_value(const std::string& raw,
                                const std::string& origin, int line,
                                bool allow_bare) {
  if (!raw.empty() && raw.front() == '[') {
    if (raw.back() != ']') fail(origin, line, "unterminated array");
    const auto parts = split_array(raw.substr(1, raw.size() - 2), origin, line);
    std::vector<double> nums;
    std::vector<std::string> strs;
    for (const auto& p : parts) {
      const auto v = parse_scalar(p, origin, line, allow_bare);
      if (std::holds_alternative<long long>(v)) {
        nums.push_back(static_cast<double>(std::get<long long>(v)));
      } else if (std::holds_alternative<double>(v)) {
        nums.push_back(std::get<double>(v));
      } else if (std::holds_alternative<std::string>(v)) {
        strs.push_back(std::get<std::string>(v));
      } else {
        fail(origin, line, "array elements must be numbers or strings");
      }
    }
    if (!nums.empty() && !strs.empty()) {
      fail(origin, line, "array mixes numbers and strings");
    }
    if (!strs.empty()) return strs;
    return nums;  // empty array defaults to numeric
  }
  return parse_scalar(raw, origin, line, allow_bare);
}

std::string format_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

std::string serialize_value(const TomlDocument::Value& v) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const { return "\"" + s + "\""; }
    std::string operator()(const std::vector<double>& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += format_double(a[i]);
      }
      return out + "]";
    }
    std::string operator()(const std::vector<std::string>& a) const {
      std::string out = "[";
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) out += ",";
        out += "\"" + a[i] + "\"";
      }
      return out + "]";
    }
  };
  return std::visit(Visitor{}, v);
}

}  // namespace

TomlDocument TomlDocument::parse(const std::string& text,
                                 const std::string& origin) {
  TomlDocument doc;
  std::istringstream in(text);
  std::string raw_line;
  std::string prefix;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw_line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      const std::string section = trim(line.substr(1, line.size() - 2));
      if (!valid_key(section)) {
        fail(origin, line_no, "invalid section name: " + section);
      }
      prefix = section;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin, line_no, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!valid_key(key)) fail(origin, line_no, "invalid key: " + key);
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (doc.values_.count(full)) {
      fail(origin, line_no, "duplicate key: " + full);
    }
    doc.values_[full] = parse_value(val, origin, line_no, false);
  }
  return doc;
}

TomlDocument TomlDocument::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void TomlDocument::set_from_string(const std::string& key,
                                   const std::string& raw) {
  if (!valid_key(key)) throw config_error("invalid override key: " + key);
  const std::string v = trim(raw);
  values_[key] = parse_value(v, "<override " + key + ">", 1, true);
}

namespace {

[[noreturn]] void wrong_type(const std::string& key, const char* want) {
  throw config_error("key '" + key + "': expected " + want);
}

}  // namespace

bool TomlDocument::get_bool(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const bool* b = std::get_if<bool>(&it->second)) return *b;
  wrong_type(key, "a boolean");
}

long long TomlDocument::get_int(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const long long* i = std::get_if<long long>(&it->second)) return *i;
  wrong_type(key, "an integer");
}

std::uint64_t TomlDocument::get_uint(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const long long* i = std::get_if<long long>(&it->second)) {
    if (*i < 0) wrong_type(key, "a nonnegative integer");
    return static_cast<std::uint64_t>(*i);
  }
  if (const double* d = std::get_if<double>(&it->second)) {
    if (*d >= 0.0 && *d == std::floor(*d) && *d <= 1.8e19) {
      return static_cast<std::uint64_t>(*d);
    }
  }
  wrong_type(key, "a nonnegative integer");
}

double TomlDocument::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const double* d = std::get_if<double>(&it->second)) return *d;
  if (const long long* i = std::get_if<long long>(&it->second)) {
    return static_cast<double>(*i);
  }
  wrong_type(key, "a number");
}

const std::string& TomlDocument::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
  wrong_type(key, "a string");
}

std::vector<double> TomlDocument::get_double_array(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw config_error("missing key '" + key + "'");
  if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
  wrong_type(key, "an array of numbers");
}

bool TomlDocument::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}
long long TomlDocument::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}
std::uint64_t TomlDocument::get_uint(const std::string& key,
                                     std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}
double TomlDocument::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
std::string TomlDocument::get_string(const std::string& key,
                                     const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}
std::vector<double> TomlDocument::get_double_array(
    const std::string& key, const std::vector<double>& fallback) const {
  return has(key) ? get_double_array(key) : fallback;
}

std::string TomlDocument::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += "=";
    out += serialize_value(value);
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace migsim
