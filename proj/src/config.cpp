#include "pidual/config.hpp"

#include <fstream>
#include <sstream>

#include "pidual/report.hpp"

namespace pidual {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Config, "config parse error at line " + std::to_string(line_no) +
                                  ", column " + std::to_string(stripped.size()) +
                                  ": expected 'key = value'");
    }
    std::string key = trim(stripped.substr(0, eq));
    std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      fail(ErrorKind::Config, "config parse error at line " + std::to_string(line_no) +
                                  ", column 1: empty key");
    }
    for (const auto& [k, v] : cfg.entries_) {
      if (k == key)
        fail(ErrorKind::Config, "config parse error at line " + std::to_string(line_no) +
                                    ": duplicate key '" + key + "'");
    }
    cfg.entries_.emplace_back(key, value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Config, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

Config Config::from_lines(const std::vector<std::string>& lines) {
  std::string text;
  for (const std::string& l : lines) text += l + "\n";
  return parse_string(text);
}

std::optional<std::string> Config::find(const std::string& key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

bool Config::has(const std::string& key) const { return find(key).has_value(); }

std::string Config::get_string(const std::string& key) const {
  auto v = find(key);
  require(v.has_value(), ErrorKind::Config, "missing required config key '" + key + "'");
  return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto v = find(key);
  return v.has_value() ? *v : fallback;
}

long Config::get_int(const std::string& key, long fallback) const {
  auto v = find(key);
  if (!v.has_value()) return fallback;
  try {
    return std::stol(*v);
  } catch (...) {
    fail(ErrorKind::Config, "config key '" + key + "' is not an integer: " + *v);
  }
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
  auto v = find(key);
  if (!v.has_value()) return fallback;
  try {
    return std::stoull(*v);
  } catch (...) {
    fail(ErrorKind::Config, "config key '" + key + "' is not a seed: " + *v);
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  auto v = find(key);
  if (!v.has_value()) return fallback;
  try {
    return std::stod(*v);
  } catch (...) {
    fail(ErrorKind::Config, "config key '" + key + "' is not a number: " + *v);
  }
}

Exponent Config::get_exponent(const std::string& key, const Exponent& fallback) const {
  auto v = find(key);
  if (!v.has_value()) return fallback;
  return Exponent::parse(*v);
}

Vector Config::get_vector(const std::string& key) const {
  return parse_vector(get_string(key));
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  auto v = find(key);
  if (!v.has_value()) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  fail(ErrorKind::Config, "config key '" + key + "' is not a boolean: " + *v);
}

void Config::require_known_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    bool ok = false;
    for (const std::string& pattern : allowed) {
      if (!pattern.empty() && pattern.back() == '.') {
        if (key.rfind(pattern, 0) == 0) {
          ok = true;
          break;
        }
      } else if (key == pattern) {
        ok = true;
        break;
      }
    }
    if (!ok) fail(ErrorKind::Config, "unknown config key '" + key + "'");
  }
}

std::vector<std::string> Config::echo_lines() const {
  std::vector<std::string> lines;
  for (const auto& [k, v] : entries_) lines.push_back(k + " = " + v);
  return lines;
}

}  // namespace pidual
