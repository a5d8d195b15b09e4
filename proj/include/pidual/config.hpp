#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pidual/exponent.hpp"
#include "pidual/types.hpp"

namespace pidual {

// Flat dotted-key configuration: one `key = value` per line, '#' comments.
// Entry order is preserved for byte-stable report echoes.
class Config {
 public:
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);
  static Config from_lines(const std::vector<std::string>& lines);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key, long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  Exponent get_exponent(const std::string& key, const Exponent& fallback) const;
  Vector get_vector(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Rejects unknown keys; `allowed` may end in '.' to allow a prefix.
  void require_known_keys(const std::vector<std::string>& allowed) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  std::vector<std::string> echo_lines() const;

 private:
  std::optional<std::string> find(const std::string& key) const;
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace pidual
