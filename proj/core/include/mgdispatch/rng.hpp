#pragma once

#include <cstdint>
#include <random>

namespace mgdispatch {

// Reproducibility contract: all stochastic output of the library is produced
// by std::mt19937_64 substreams keyed as (seed, stream_id, purpose) through
// std::seed_seq, with uniforms mapped to normals by the AS241 inverse CDF.
// Both building blocks are fully specified, so identical inputs give
// identical samples on every platform.

std::mt19937_64 make_substream(std::uint64_t seed, std::uint32_t stream_id, std::uint32_t purpose);

// Uniform draw on the open interval (0,1).
inline double uniform_open01(std::mt19937_64& eng) {
  return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF (Wichura's AS241, double precision).
double standard_normal_quantile(double p);

double standard_normal_cdf(double z);

inline double standard_normal_sample(std::mt19937_64& eng) {
  return standard_normal_quantile(uniform_open01(eng));
}

}  // namespace mgdispatch
