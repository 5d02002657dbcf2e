// SPDX-License-Identifier: MIT
// Copyright (c) 2026 se23nav contributors
#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "se23nav/errors.hpp"
#include "se23nav/se23_core.hpp"

namespace se23nav::simkit {

/// Flat key/value configuration. Lines are `key = value`; `[section]`
/// prefixes following keys with `section.`; `#` starts a comment; string
/// values may be quoted and vectors are written `[x, y, z]`.
class Config {
 public:
  Config() = default;

  [[nodiscard]] static Config parse(std::istream& in) {
    Config c;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = find_comment(line); hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw PreconditionError("config line " + std::to_string(lineno) + ": missing '='");
      std::string key = trim(line.substr(0, eq));
      if (!section.empty()) key = section + "." + key;
      std::string value = trim(line.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      c.values_[key] = value;
    }
    return c;
  }

  [[nodiscard]] static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot open config '" + path + "'");
    return parse(in);
  }

  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) != 0; }

  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  [[nodiscard]] double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw PreconditionError("config key '" + key + "' is not a number");
    }
  }

  [[nodiscard]] long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoll(it->second);
    } catch (const std::exception&) {
      throw PreconditionError("config key '" + key + "' is not an integer");
    }
  }

  [[nodiscard]] Vec3 get_vec3(const std::string& key, const Vec3& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string s = it->second;
    if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
      throw PreconditionError("config key '" + key + "' must be a vector [x, y, z]");
    }
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::vector<double> parts;
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(std::stod(trim(item)));
    if (parts.size() != 3) throw PreconditionError("config key '" + key + "' must have 3 components");
    return {parts[0], parts[1], parts[2]};
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
  static std::size_t find_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (s[i] == '#' && !quoted) return i;
    }
    return std::string::npos;
  }

  std::map<std::string, std::string> values_;
};

}  // namespace se23nav::simkit
