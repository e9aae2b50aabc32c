#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "contactkit/geometry.hpp"

namespace ck_test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(CONTACTKIT_FIXTURE_DIR) / name;
}

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(CONTACTKIT_CONFIG_DIR) / name;
}

// Fresh directory under the build tree, removed first if it exists.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("contactkit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline contactkit::Vec3 random_vec3(std::mt19937_64& rng, double lo, double hi) {
  return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

inline contactkit::Mat3 random_rotation(std::mt19937_64& rng) {
  // Uniform quaternion (Shoemake).
  const double u1 = uniform(rng, 0.0, 1.0), u2 = uniform(rng, 0.0, 2.0 * M_PI), u3 = uniform(rng, 0.0, 2.0 * M_PI);
  const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(u3), std::sqrt(1.0 - u1) * std::sin(u2),
                             std::sqrt(1.0 - u1) * std::cos(u2), std::sqrt(u1) * std::sin(u3));
  return q.normalized().toRotationMatrix();
}

}  // namespace ck_test
