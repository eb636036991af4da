#pragma once

#include <cmath>
#include <stdexcept>

#include "shorlab/common.hpp"
#include "shorlab/rng.hpp"

/*
 * Readout-error model: every qubit is read correctly with probability F,
 * independently, so a whole n-qubit register reads back correctly with
 * probability F^n. Flips are symmetric. Applies only at readout; state
 * preparation and gate errors are out of scope.
 */
namespace shorlab::noise {

struct ReadoutModel {
  double fidelity;

  explicit ReadoutModel(double F) : fidelity(F) {
    if (!(F >= 0.5 && F <= 1.0)) {
      throw std::invalid_argument("ReadoutModel: fidelity must lie in [0.5, 1.0]");
    }
  }
};

// Flip each of the low n_bits of value independently with probability 1 - F.
inline u64 apply_readout_noise(u64 value, int n_bits, const ReadoutModel& model, Rng& rng) {
  if (n_bits < 1 || n_bits > 64) {
    throw std::invalid_argument("apply_readout_noise: n_bits must be in [1, 64]");
  }
  const double flip_p = 1.0 - model.fidelity;
  u64 out = value;
  for (int b = 0; b < n_bits; ++b) {
    if (rng.flip(flip_p)) out ^= u64{1} << b;
  }
  return out;
}

// F^n, the probability an n-qubit register reads back with no flipped bit.
inline double register_fidelity(const ReadoutModel& model, u64 n_bits) {
  if (n_bits < 1) throw std::invalid_argument("register_fidelity: n_bits must be >= 1");
  return std::pow(model.fidelity, static_cast<double>(n_bits));
}

}  // namespace shorlab::noise
