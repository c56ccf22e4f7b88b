#pragma once

namespace gnsslab {

/// Zenith delays in meters; the defaults split 90/10 between dry and wet.
struct TroposphereModel {
  double zenith_dry = 2.25;
  double zenith_wet = 0.25;
};

/// First-order ionosphere: group delay a / f^2 meters, a in m*Hz^2.
struct IonosphereModel {
  double a = 0.0;

  /// Model whose L1 group delay equals the given number of meters.
  static IonosphereModel from_l1_delay(double meters);
};

struct TropoDelay {
  double dry = 0.0;
  double wet = 0.0;
  double total() const { return dry + wet; }
};

/// 1/sin(elevation) mapping. Throws Error(BelowHorizon) for elevation <= 0.
TropoDelay tropo_delay(const TroposphereModel& model, double elevation);

/// Throws Error(InvalidArgument) for f <= 0.
double iono_delay(const IonosphereModel& model, double frequency);

struct IonoFreeRange {
  double literal = 0.0;     // rho_L1 - gamma * rho_L2
  double normalized = 0.0;  // literal / (1 - gamma)
};

/// gamma = f_L2^2 / f_L1^2.
IonoFreeRange iono_free_pseudorange(double pr_l1, double pr_l2);

struct IonoFreeWavelength {
  double wavelength = 0.0;  // m
  double frequency = 0.0;   // Hz
};

/// frequency = (f_L1^2 - f_L2^2) / f_L1, wavelength = c / frequency.
IonoFreeWavelength iono_free_wavelength();

struct IonoFreeCarrier {
  double literal = 0.0;     // Phi_L1 - gamma * Phi_L2 on phase-derived ranges, m
  double normalized = 0.0;  // literal / (1 - gamma), m
  double cycles = 0.0;      // normalized / wavelength
  double wavelength = 0.0;  // effective wavelength of the combined signal, m
};

/// Carrier-phase counterpart of iono_free_pseudorange. Inputs are phases in
/// cycles of their own carrier; they are turned into phase-derived ranges
/// (cycles * wavelength) before combining, which is what makes the a/f^2 term
/// cancel. The ambiguity carried by the result is not an integer.
IonoFreeCarrier iono_free_carrier(double phi_l1, double phi_l2);

}  // namespace gnsslab
