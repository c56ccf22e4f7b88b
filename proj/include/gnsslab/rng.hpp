#pragma once

#include <cstdint>
#include <random>

namespace gnsslab {

/// Which quantity a random draw feeds. Each gets its own substream so that
/// toggling one error source never shifts another's draws.
enum class Draw : std::uint32_t {
  CodeNoiseL1 = 1,
  CodeNoiseL2 = 2,
  PhaseNoiseL1 = 3,
  PhaseNoiseL2 = 4,
  SelectiveAvailability = 5,
  AmbiguityL1 = 6,
  AmbiguityL2 = 7,
  Ephemeris = 8,
  Scenario = 9,
};

/// Deterministic substream factory. Engine is std::mt19937_64 seeded through
/// std::seed_seq, both fully specified by the standard; Gaussian deviates use
/// our own Box-Muller transform because std::normal_distribution is
/// implementation-defined.
class NoiseStreams {
 public:
  NoiseStreams(std::uint64_t seed, std::uint64_t receiver_key, std::uint64_t common_key)
      : seed_(seed), receiver_key_(receiver_key), common_key_(common_key) {}

  /// Receiver-side substream for one (satellite, epoch, draw).
  std::mt19937_64 receiver_stream(int svn, double epoch, Draw draw) const;

  /// Satellite-side substream, shared by every receiver with the same common key.
  std::mt19937_64 common_stream(int svn, double epoch, Draw draw) const;

  /// Substream keyed only by the satellite (one value per pass).
  std::mt19937_64 pass_stream(int svn, Draw draw) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t receiver_key_;
  std::uint64_t common_key_;
};

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c, std::uint64_t d);

/// Standard normal deviate from two uniform draws (Box-Muller, cosine branch).
double standard_normal(std::mt19937_64& engine);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(std::mt19937_64& engine);

/// Uniform integer in [lo, hi].
std::int64_t uniform_int(std::mt19937_64& engine, std::int64_t lo, std::int64_t hi);

}  // namespace gnsslab
