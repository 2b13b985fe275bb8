#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fspde/types.hpp"

namespace fspde {

/// Number of retained noise modes for mesh size h (d = 1): floor(1/h) + 1.
int mode_count(Scalar h);

/// Configuration of one truncated cylindrical Wiener path.
struct NoiseConfig {
  int num_modes = 0;       // M
  int num_steps = 0;       // N
  Scalar tau = 0.0;        // step size; N * tau = T
  std::uint64_t master_seed = 0;
  std::uint64_t realization_index = 0;
};

/// Per-mode Brownian increments: entry (j,n) holds W_j(t_{n+1}) - W_j(t_n)
/// for mode row j = 0..M-1 and step column n = 0..N-1. The stream of mode j
/// is derived from (master_seed, realization_index, j) alone, so enlarging M
/// or N extends a path without changing existing entries.
struct NoisePath {
  NoiseConfig config;
  Matrix increments;  // M x N
};

/// Samples all M*N increments (independent N(0, tau) draws). Deterministic
/// given the config, independent of threading.
NoisePath sample_path(const NoiseConfig& config);

/// Sums groups of `factor` consecutive increments, yielding the same
/// realization at step size factor*tau. `factor` must divide N.
NoisePath coarsen_in_time(const NoisePath& path, int factor);

/// Binary serialization (debug aid): fixed header followed by the increment
/// matrix as row-major 64-bit floats.
void save_noise_path(const NoisePath& path, const std::string& filename);
NoisePath load_noise_path(const std::string& filename);
void write_noise_path(const NoisePath& path, std::ostream& out);
NoisePath read_noise_path(std::istream& in);

namespace rng {

/// SplitMix64 finalizer; the counter-based streams below are evaluations of
/// mix64 along a Weyl sequence, so any draw is O(1) random access.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Key of the stream owned by (seed, realization, mode).
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t realization,
                         std::uint64_t mode) noexcept;

/// Standard normal draw number `counter` of a stream (Box-Muller over two
/// counter positions).
Scalar normal_draw(std::uint64_t key, std::uint64_t counter) noexcept;

}  // namespace rng

}  // namespace fspde
