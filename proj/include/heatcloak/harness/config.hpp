#pragma once

// Flat key-value configuration files:
//
//   # comment
//   dimension = 3
//   epsilons  = 0.02, 0.04, 0.08
//
// Keys are unique; values are kept as text and converted on access.

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace heatcloak {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("config: key '" + key + "' expects a number, got '" + t + "'");
  return v;
}

}  // namespace detail

class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<input>") {
    KeyValueConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = origin + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
      const std::string key = detail::trim(line.substr(0, eq));
      if (key.empty()) throw ConfigError(where + ": empty key");
      if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
      cfg.values_[key] = detail::trim(line.substr(eq + 1));
    }
    return cfg;
  }

  static KeyValueConfig parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in, "<string>");
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  std::string text(const std::string& key) const {
    used_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
  }

  double number(const std::string& key) const { return detail::parse_double(text(key), key); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<double>(static_cast<int>(v))) throw ConfigError("config: key '" + key + "' expects an integer");
    return static_cast<int>(v);
  }
  int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

  /// Comma- or whitespace-separated numbers.
  std::vector<double> numbers(const std::string& key) const {
    std::string t = text(key);
    for (char& c : t)
      if (c == ',') c = ' ';
    std::istringstream in(t);
    std::vector<double> out;
    std::string item;
    while (in >> item) out.push_back(detail::parse_double(item, key));
    return out;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : fallback;
  }

  /// Keys present in the file that no accessor has read.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace heatcloak
