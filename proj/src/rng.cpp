#include "gnsslab/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace gnsslab {

namespace {

std::uint64_t epoch_bits(double epoch) {
  // +0.0 and -0.0 share a stream.
  return std::bit_cast<std::uint64_t>(epoch == 0.0 ? 0.0 : epoch);
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c, std::uint64_t d) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(a), hi(a), lo(b), hi(b), lo(c), hi(c), lo(d), hi(d)};
  return std::mt19937_64(seq);
}

std::mt19937_64 NoiseStreams::receiver_stream(int svn, double epoch, Draw draw) const {
  return make_stream(seed_, receiver_key_ * 2 + 1, static_cast<std::uint64_t>(svn),
                     epoch_bits(epoch), static_cast<std::uint64_t>(draw));
}

std::mt19937_64 NoiseStreams::common_stream(int svn, double epoch, Draw draw) const {
  return make_stream(seed_, common_key_ * 2, static_cast<std::uint64_t>(svn), epoch_bits(epoch),
                     static_cast<std::uint64_t>(draw));
}

std::mt19937_64 NoiseStreams::pass_stream(int svn, Draw draw) const {
  return make_stream(seed_, receiver_key_ * 2 + 1, static_cast<std::uint64_t>(svn),
                     0xFFFF'FFFF'FFFF'FFFFull, static_cast<std::uint64_t>(draw));
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& engine) {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t uniform_int(std::mt19937_64& engine, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(engine() % span);
}

}  // namespace gnsslab
