#include <doctest.h>

#include <limits>

#include <numbers>

#include "gnsslab/atmosphere.hpp"
#include "gnsslab/constants.hpp"
#include "gnsslab/error.hpp"
#include "support.hpp"

using namespace gnsslab;
using namespace gnsslab::constants;

TEST_CASE("troposphere mapping") {
  const TroposphereModel m;
  const auto zenith = tropo_delay(m, std::numbers::pi / 2);
  CHECK(zenith.total() == doctest::Approx(2.5));
  CHECK(tropo_delay(m, deg2rad(30.0)).total() == doctest::Approx(5.0));
  double previous = 1e300;
  for (double el = 1.0; el <= 90.0; el += 1.0) {
    const auto d = tropo_delay(m, deg2rad(el));
    CHECK(d.dry / d.total() == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(d.dry + d.wet == d.total());
    CHECK(d.total() < previous);
    previous = d.total();
  }
  CHECK_THROWS_AS(tropo_delay(m, 0.0), Error);
  CHECK_THROWS_AS(tropo_delay(m, -0.2), Error);
}

TEST_CASE("ionosphere delay scaling") {
  CHECK(iono_delay(IonosphereModel{0.0}, kFrequencyL1) == 0.0);
  const auto m = IonosphereModel::from_l1_delay(5.0);
  CHECK(iono_delay(m, kFrequencyL1) == doctest::Approx(5.0).epsilon(1e-15));
  const double l2 = iono_delay(m, kFrequencyL2);
  CHECK(l2 == doctest::Approx(5.0 * (154.0 / 120.0) * (154.0 / 120.0)).epsilon(1e-14));
  CHECK(l2 == doctest::Approx(8.2347).epsilon(1e-5));
  CHECK(iono_delay(m, kFrequencyL1) < l2);
  CHECK_THROWS_AS(iono_delay(m, 0.0), Error);
  CHECK_THROWS_AS(iono_delay(m, -1.0), Error);
}

TEST_CASE("ionosphere-free pseudorange") {
  const double gamma = kIonoFreeGamma;
  const auto same = iono_free_pseudorange(2e7, 2e7);
  CHECK(same.normalized == doctest::Approx(2e7).epsilon(1e-15));
  CHECK(same.literal == doctest::Approx(2e7 * (1.0 - gamma)).epsilon(1e-15));

  const auto m = IonosphereModel::from_l1_delay(5.0);
  const double r = 2e7;
  const auto v = iono_free_pseudorange(r + iono_delay(m, kFrequencyL1), r + iono_delay(m, kFrequencyL2));
  CHECK(std::abs(v.normalized - r) <= 1e-9 * 4);  // a few ulp at 2e7 m
}

TEST_CASE("ionosphere-free cancellation over random models") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double rho = testing::uniform(rng, 2.0e7, 2.6e7);
    const double clock = testing::uniform(rng, -3e5, 3e5);
    const IonosphereModel m{testing::uniform(rng, 0.0, 1e18)};
    const double truth = rho + clock;
    const auto v = iono_free_pseudorange(truth + iono_delay(m, kFrequencyL1),
                                         truth + iono_delay(m, kFrequencyL2));
    worst = std::max(worst, std::abs(v.normalized - truth));
  }
  MESSAGE("worst ionosphere-free residual " << worst << " m");
  CHECK(worst <= 1e-8);
}

TEST_CASE("ionosphere-free carrier combination") {
  const auto wl = iono_free_wavelength();
  CHECK(wl.frequency == doctest::Approx(618.8e6).epsilon(0.005));
  CHECK(wl.wavelength == doctest::Approx(0.485).epsilon(0.005));
  CHECK(wl.wavelength == doctest::Approx(0.4844).epsilon(1e-3));
  CHECK(wl.frequency / kFundamentalFrequency == doctest::Approx(60.5).epsilon(0.001));

  const auto zero = iono_free_carrier(0.0, 0.0);
  CHECK(zero.literal == 0.0);
  CHECK(zero.normalized == 0.0);

  const auto a = iono_free_carrier(1.0e8, 7.8e7);
  const auto b = iono_free_carrier(3.0e8, 2.34e8);
  CHECK(b.normalized == doctest::Approx(3.0 * a.normalized).epsilon(1e-14));
  CHECK(b.literal == doctest::Approx(3.0 * a.literal).epsilon(1e-14));

  // Common geometry with phase advance: phi_f = (rho - I_f) / lambda_f.
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const double rho = testing::uniform(rng, 2.0e7, 2.6e7);
    const auto m = IonosphereModel::from_l1_delay(testing::uniform(rng, 0.0, 30.0));
    const double i1 = iono_delay(m, kFrequencyL1), i2 = iono_delay(m, kFrequencyL2);
    const auto c = iono_free_carrier((rho - i1) / kWavelengthL1, (rho - i2) / kWavelengthL2);
    // Cycles-to-meters conversions round at 2e7 m; allow a few ulp of the range.
    CHECK(std::abs(c.normalized - rho) <= 8.0 * std::numeric_limits<double>::epsilon() * rho);
    CHECK(c.cycles == doctest::Approx(c.normalized / c.wavelength));
  }
}
