#pragma once

namespace intphase {

// CODATA 2018.
inline constexpr double kSpeedOfLight = 299792458.0;          // m/s, exact
inline constexpr double kHbar = 1.054571817e-34;              // J s
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg

inline constexpr double kCSquared = kSpeedOfLight * kSpeedOfLight;

inline constexpr double kDefaultGravity = 9.81;  // m/s^2

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// Sr-88 single-atom reference: mass and the 698 nm clock transition frequency
// rounded to the values used throughout for worked numbers.
inline constexpr double kSr88MassU = 87.9056;
inline constexpr double kSr88TransitionHz = 429.0e12;

}  // namespace intphase
