#pragma once

// Plain `key = value` configuration text. Blank lines and anything after '#'
// are ignored. Keys are case-sensitive and may not repeat.

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qpot::config {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Entry {
  std::string value;
  int line = 0;
};

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

class KeyValues {
public:
  static KeyValues parse(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) {
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": empty key");
      }
      if (kv.entries_.contains(key)) {
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      }
      kv.entries_[key] = {value, line_no};
    }
    return kv;
  }

  static KeyValues load(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool has(const std::string& key) const { return entries_.contains(key); }

  std::string get(const std::string& key, const std::string& fallback) const {
    used_[key] = true;
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
  }

  std::string require(const std::string& key) const {
    used_[key] = true;
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
      throw ConfigError("missing key '" + key + "'");
    }
    return it->second.value;
  }

  double get_double(const std::string& key, double fallback) const {
    return has(key) ? to_double(key, require(key)) : (used_[key] = true, fallback);
  }

  long long get_int(const std::string& key, long long fallback) const {
    return has(key) ? to_int(key, require(key)) : (used_[key] = true, fallback);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) {
      used_[key] = true;
      return fallback;
    }
    const std::string v = require(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw error_at(key, "expected a boolean, got '" + v + "'");
  }

  /// Comma-separated list of integers.
  std::vector<long long> get_int_list(const std::string& key, std::vector<long long> fallback) const {
    if (!has(key)) {
      used_[key] = true;
      return fallback;
    }
    std::vector<long long> out;
    std::istringstream in(require(key));
    std::string item;
    while (std::getline(in, item, ',')) {
      out.push_back(to_int(key, trim(item)));
    }
    return out;
  }

  /// Keys present in the text that were never queried.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) {
      if (!used_.contains(k)) {
        out.push_back(k);
      }
    }
    return out;
  }

  /// Throws on the first key that was never queried.
  void reject_unknown() const {
    for (const auto& k : unused_keys()) {
      throw error_at(k, "unknown key '" + k + "'");
    }
  }

  ConfigError error_at(const std::string& key, const std::string& message) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? "" : "line " + std::to_string(it->second.line) + ": ";
    return ConfigError(where + message);
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

private:
  double to_double(const std::string& key, const std::string& v) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw error_at(key, "expected a number for '" + key + "', got '" + v + "'");
    }
    return out;
  }

  long long to_int(const std::string& key, const std::string& v) const {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
      throw error_at(key, "expected an integer for '" + key + "', got '" + v + "'");
    }
    return out;
  }

  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace qpot::config
