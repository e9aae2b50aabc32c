#include "contactkit/config.hpp"

#include <algorithm>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "contactkit/errors.hpp"

namespace contactkit {

namespace pt = boost::property_tree;

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  try {
    pt::read_ini(in, cfg.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  try {
    return parse(read_text_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

bool KeyValueConfig::has(const std::string& key) const {
  return static_cast<bool>(tree_.get_optional<std::string>(key));
}

std::vector<std::string> KeyValueConfig::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, child] : tree_) out.push_back(name);
  return out;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(key);
  if (!v) throw ConfigError("missing config key '" + key + "'");
  return trim(*v);
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
  try {
    return parse_double(get_string(key), key);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (v != static_cast<double>(static_cast<long long>(v))) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: " + v);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::istringstream in(get_string(key));
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(parse_double(tok, key));
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  return out;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) const {
  return has(key) ? get_doubles(key) : fallback;
}

Vec3 KeyValueConfig::get_vec3(const std::string& key) const {
  const std::vector<double> v = get_doubles(key);
  if (v.size() != 3) throw ConfigError("config key '" + key + "' needs 3 values");
  return {v[0], v[1], v[2]};
}

Vec3 KeyValueConfig::get_vec3(const std::string& key, const Vec3& fallback) const {
  return has(key) ? get_vec3(key) : fallback;
}

Rot6D KeyValueConfig::get_rot6d(const std::string& key) const {
  const std::vector<double> v = get_doubles(key);
  if (v.size() != 6) throw ConfigError("config key '" + key + "' needs 6 values");
  return {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

std::string KeyValueConfig::canonical_text() const {
  // Sorted "section.key=value" lines so key order in the file does not matter.
  std::vector<std::string> lines;
  for (const auto& [section, sub] : tree_) {
    if (sub.empty()) {
      lines.push_back(section + "=" + trim(sub.data()));
      continue;
    }
    for (const auto& [key, leaf] : sub) lines.push_back(section + "." + key + "=" + trim(leaf.data()));
  }
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& l : lines) out += l + "\n";
  return out;
}

}  // namespace contactkit
