#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "contactkit/geometry.hpp"
#include "contactkit/io.hpp"

namespace contactkit {

// INI-style key/value configuration. Keys are addressed as "section.key";
// vector values are whitespace-separated numbers. Missing required keys and
// malformed values raise ConfigError naming the key.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  std::vector<std::string> sections() const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  Vec3 get_vec3(const std::string& key) const;
  Vec3 get_vec3(const std::string& key, const Vec3& fallback) const;
  Rot6D get_rot6d(const std::string& key) const;

  // Overrides or inserts a value (used for CLI overrides such as --seed).
  void set(const std::string& key, const std::string& value);

  // Canonical text used for config hashing.
  std::string canonical_text() const;

 private:
  boost::property_tree::ptree tree_;
};

}  // namespace contactkit
