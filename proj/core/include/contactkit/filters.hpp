#pragma once

#include <numbers>

namespace contactkit {

// Smoothing factor of the first-order IIR y += alpha (x - y) for a cutoff in Hz.
inline double low_pass_alpha(double dt, double cutoff_hz) {
  return dt / (dt + 1.0 / (2.0 * std::numbers::pi * cutoff_hz));
}

}  // namespace contactkit
