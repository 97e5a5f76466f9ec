#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace trustcascade {

/// Top-level experiment seed. Independent streams are derived from it by
/// hashing a list of integer coordinates (purpose tag, source, ...), so the
/// numbers a task sees do not depend on how tasks are scheduled.
struct Seed {
  std::uint64_t value = 0;
};

namespace stream_tag {
inline constexpr std::uint64_t kCascadeTrue = 0x54;
inline constexpr std::uint64_t kCascadeFalse = 0x46;
inline constexpr std::uint64_t kTraining = 0x4c;
inline constexpr std::uint64_t kStratification = 0x53;
inline constexpr std::uint64_t kFigureCell = 0x43;
}  // namespace stream_tag

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Seed derive(Seed base, std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = splitmix64(base.value);
  for (auto c : coords) h = splitmix64(h ^ splitmix64(c));
  return Seed{h};
}

/// Random stream used by every stochastic routine.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  /// Uniform double in [0, 1) built from the top 53 bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace trustcascade
