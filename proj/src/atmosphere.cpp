#include "gnsslab/atmosphere.hpp"

#include <cmath>

#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"

namespace gnsslab {

using namespace constants;

IonosphereModel IonosphereModel::from_l1_delay(double meters) {
  return {meters * kFrequencyL1 * kFrequencyL1};
}

TropoDelay tropo_delay(const TroposphereModel& model, double elevation) {
  if (!(elevation > 0.0)) throw Error(ErrorCode::BelowHorizon, "below horizon");
  const double mapping = 1.0 / std::sin(elevation);
  return {model.zenith_dry * mapping, model.zenith_wet * mapping};
}

double iono_delay(const IonosphereModel& model, double frequency) {
  if (!(frequency > 0.0)) throw Error(ErrorCode::InvalidArgument, "frequency must be positive");
  return model.a / (frequency * frequency);
}

IonoFreeRange iono_free_pseudorange(double pr_l1, double pr_l2) {
  IonoFreeRange out;
  out.literal = pr_l1 - kIonoFreeGamma * pr_l2;
  out.normalized = pr_l1 - kIonoFreeDifferenceWeight * (pr_l2 - pr_l1);
  return out;
}

IonoFreeWavelength iono_free_wavelength() {
  const double f = (kFrequencyL1 * kFrequencyL1 - kFrequencyL2 * kFrequencyL2) / kFrequencyL1;
  return {kSpeedOfLight / f, f};
}

IonoFreeCarrier iono_free_carrier(double phi_l1, double phi_l2) {
  IonoFreeCarrier out;
  const double r1 = phi_l1 * kWavelengthL1;
  const double r2 = phi_l2 * kWavelengthL2;
  out.literal = r1 - kIonoFreeGamma * r2;
  out.normalized = r1 - kIonoFreeDifferenceWeight * (r2 - r1);
  out.wavelength = iono_free_wavelength().wavelength;
  out.cycles = out.normalized / out.wavelength;
  return out;
}

}  // namespace gnsslab
