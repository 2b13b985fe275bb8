#include "fspde/white_noise.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

namespace fspde {

namespace rng {

namespace {
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t realization,
                         std::uint64_t mode) noexcept {
  std::uint64_t k = mix64(seed + kWeyl);
  k = mix64(k + kWeyl * (realization + 1));
  k = mix64(k + kWeyl * (mode + 1));
  return k;
}

Scalar normal_draw(std::uint64_t key, std::uint64_t counter) noexcept {
  const std::uint64_t a = mix64(key + kWeyl * (2 * counter + 1));
  const std::uint64_t b = mix64(key + kWeyl * (2 * counter + 2));
  // u1 in (0,1], u2 in [0,1)
  const Scalar u1 = static_cast<Scalar>((a >> 11) + 1) * 0x1.0p-53;
  const Scalar u2 = static_cast<Scalar>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi_v<Scalar> * u2);
}

}  // namespace rng

int mode_count(Scalar h) {
  if (!(h > 0.0) || !(h < 1.0)) {
    throw std::invalid_argument("mode_count: h must lie in (0,1)");
  }
  return static_cast<int>(std::floor(1.0 / h)) + 1;
}

NoisePath sample_path(const NoiseConfig& config) {
  if (config.num_modes < 1 || config.num_steps < 0 || !(config.tau > 0.0)) {
    throw std::invalid_argument("sample_path: invalid noise config");
  }
  Matrix inc(config.num_modes, config.num_steps);
  const Scalar scale = std::sqrt(config.tau);
  for (int j = 0; j < config.num_modes; ++j) {
    const std::uint64_t key = rng::stream_key(
        config.master_seed, config.realization_index,
        static_cast<std::uint64_t>(j) + 1);  // modes are 1-based
    for (int n = 0; n < config.num_steps; ++n) {
      inc(j, n) = scale * rng::normal_draw(key, static_cast<std::uint64_t>(n));
    }
  }
  return NoisePath{config, std::move(inc)};
}

NoisePath coarsen_in_time(const NoisePath& path, int factor) {
  if (factor < 1 || path.config.num_steps % factor != 0) {
    throw std::invalid_argument("coarsen_in_time: factor must divide N");
  }
  NoiseConfig cfg = path.config;
  cfg.num_steps = path.config.num_steps / factor;
  cfg.tau = path.config.tau * factor;
  Matrix inc(cfg.num_modes, cfg.num_steps);
  for (int m = 0; m < cfg.num_steps; ++m) {
    inc.col(m) = path.increments.middleCols(m * factor, factor).rowwise().sum();
  }
  return NoisePath{cfg, std::move(inc)};
}

namespace {

constexpr char kNoiseMagic[8] = {'F', 'S', 'P', 'D', 'N', 'O', 'I', 'S'};
constexpr std::uint32_t kNoiseFormatVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_noise_path(const NoisePath& path, std::ostream& out) {
  out.write(kNoiseMagic, sizeof(kNoiseMagic));
  write_pod(out, kNoiseFormatVersion);
  write_pod(out, std::uint32_t{0});  // reserved
  write_pod(out, static_cast<std::uint64_t>(path.config.num_modes));
  write_pod(out, static_cast<std::uint64_t>(path.config.num_steps));
  write_pod(out, path.config.tau);
  write_pod(out, path.config.master_seed);
  write_pod(out, path.config.realization_index);
  for (int j = 0; j < path.config.num_modes; ++j) {
    for (int n = 0; n < path.config.num_steps; ++n) {
      write_pod(out, path.increments(j, n));
    }
  }
}

NoisePath read_noise_path(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kNoiseMagic, sizeof(magic)) != 0) {
    throw std::invalid_argument("read_noise_path: bad magic");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kNoiseFormatVersion) {
    throw std::invalid_argument("read_noise_path: unsupported version " +
                                std::to_string(version));
  }
  read_pod<std::uint32_t>(in);  // reserved
  NoiseConfig cfg;
  cfg.num_modes = static_cast<int>(read_pod<std::uint64_t>(in));
  cfg.num_steps = static_cast<int>(read_pod<std::uint64_t>(in));
  cfg.tau = read_pod<Scalar>(in);
  cfg.master_seed = read_pod<std::uint64_t>(in);
  cfg.realization_index = read_pod<std::uint64_t>(in);
  if (!in || cfg.num_modes < 1 || cfg.num_steps < 0 || !(cfg.tau > 0.0)) {
    throw std::invalid_argument("read_noise_path: corrupt header");
  }
  Matrix inc(cfg.num_modes, cfg.num_steps);
  for (int j = 0; j < cfg.num_modes; ++j) {
    for (int n = 0; n < cfg.num_steps; ++n) {
      inc(j, n) = read_pod<Scalar>(in);
    }
  }
  if (!in) {
    throw std::invalid_argument("read_noise_path: truncated body");
  }
  return NoisePath{cfg, std::move(inc)};
}

void save_noise_path(const NoisePath& path, const std::string& filename) {
  std::ofstream out(filename, std::ios::binary);
  if (!out) {
    throw std::runtime_error("save_noise_path: cannot open " + filename);
  }
  write_noise_path(path, out);
}

NoisePath load_noise_path(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) {
    throw std::runtime_error("load_noise_path: cannot open " + filename);
  }
  return read_noise_path(in);
}

}  // namespace fspde
