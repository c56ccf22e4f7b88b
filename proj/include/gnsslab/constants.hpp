#pragma once

#include <numbers>

namespace gnsslab::constants {

inline constexpr double kSpeedOfLight = 299'792'458.0;       // m/s
inline constexpr double kEarthRadius = 6'371'000.0;          // m, spherical Earth
inline constexpr double kSiderealDay = 86'164.1;             // s
inline constexpr double kEarthRotationRate = 2.0 * std::numbers::pi / kSiderealDay;  // rad/s

inline constexpr double kFundamentalFrequency = 10.23e6;     // Hz
inline constexpr double kL1Multiple = 154.0;
inline constexpr double kL2Multiple = 120.0;
inline constexpr double kFrequencyL1 = kL1Multiple * kFundamentalFrequency;  // 1575.42 MHz
inline constexpr double kFrequencyL2 = kL2Multiple * kFundamentalFrequency;  // 1227.60 MHz
inline constexpr double kWavelengthL1 = kSpeedOfLight / kFrequencyL1;
inline constexpr double kWavelengthL2 = kSpeedOfLight / kFrequencyL2;

inline constexpr double kOrbitRadius = 26'600e3;             // m
inline constexpr double kOrbitPeriod = 11.0 * 3600.0 + 58.0 * 60.0;  // 43,080 s
inline constexpr double kInclination = 55.0 * std::numbers::pi / 180.0;

inline constexpr int kPlaneCount = 6;
inline constexpr int kSlotsPerPlane = 4;

/// f_L2^2 / f_L1^2, the weight on L2 in the ionosphere-free combination.
inline constexpr double kIonoFreeGamma =
    (kFrequencyL2 * kFrequencyL2) / (kFrequencyL1 * kFrequencyL1);

/// gamma / (1 - gamma): normalized = pr_l1 - k (pr_l2 - pr_l1). The L2 - L1
/// difference is exact for nearby inputs, so only the final step rounds.
inline constexpr double kIonoFreeDifferenceWeight = kIonoFreeGamma / (1.0 - kIonoFreeGamma);

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace gnsslab::constants
