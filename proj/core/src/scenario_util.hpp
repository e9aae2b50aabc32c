#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "contactkit/scenarios.hpp"

namespace contactkit::detail {

// a + (b - a) * U[0, 1); degenerate ranges return a.
inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * std::generate_canonical<double, 53>(rng);
}

// Minimum-jerk blend s(tau) for tau in [0, 1], with first and second
// derivatives in tau.
struct MinJerk {
  double s = 0.0;
  double ds = 0.0;
  double dds = 0.0;
};
MinJerk min_jerk(double tau);

// Independent stream per trial so trials can be re-run alone.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

double read_double(const ScenarioConfig& cfg, const std::string& key, double fallback);
int read_int(const ScenarioConfig& cfg, const std::string& key, int fallback);

StiffnessSchedule read_schedule(const ScenarioConfig& cfg);

double mean(const std::vector<double>& v);
double rms(const std::vector<double>& v);

std::string percent(double rate);

}  // namespace contactkit::detail
