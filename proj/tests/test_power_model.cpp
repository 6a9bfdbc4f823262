#include <doctest.h>

#include <cmath>
#include <random>

#include "windtwin/errors.hpp"
#include "windtwin/power_model.hpp"
#include "windtwin/synth.hpp"

using namespace windtwin;

namespace {

TurbineSpec basic_spec() {
  TurbineSpec spec;
  spec.rated_power_kw = 2300.0;
  spec.swept_area_m2 = 3959.0;
  spec.cut_in = 3.0;
  spec.cut_out = 25.0;
  spec.power_curve.v = {3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 20, 25};
  spec.power_curve.y = {25,  90,  200, 360, 590, 890, 1250, 1650,
                        2000, 2200, 2280, 2300, 2300, 2300, 2300};
  spec.cp_curve.v = {3, 5, 7, 9, 11, 13, 15, 20, 25};
  spec.cp_curve.y = {0.30, 0.45, 0.49, 0.48, 0.42, 0.30, 0.20, 0.10, 0.05};
  return spec;
}

CurveTable random_table(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_knots(2, 12);
  std::uniform_real_distribution<double> gap(0.3, 2.0);
  std::uniform_real_distribution<double> val(0.0, 2300.0);
  CurveTable t;
  const int n = n_knots(rng);
  double v = gap(rng);
  for (int i = 0; i < n; ++i) {
    t.v.push_back(v);
    t.y.push_back(val(rng));
    v += gap(rng);
  }
  return t;
}

}  // namespace

TEST_SUITE("power_model") {

TEST_CASE("linear interpolation at the segment midpoint") {
  CurveTable t;
  t.v = {5.0, 6.0};
  t.y = {200.0, 300.0};
  CHECK(interpolate_table(t, 5.5, InterpolationMethod::linear) == doctest::Approx(250.0));
}

TEST_CASE("both methods pass exactly through the knots (100 random tables)") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const CurveTable t = random_table(rng);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(interpolate_table(t, t.v[i], InterpolationMethod::linear) == t.y[i]);
      CHECK(interpolate_table(t, t.v[i], InterpolationMethod::cubic) == t.y[i]);
    }
  }
}

TEST_CASE("monotone cubic never leaves the local knot range") {
  // plateau case from the rated-power knee
  CurveTable plateau;
  plateau.v = {10, 11, 12, 13};
  plateau.y = {1800, 2100, 2300, 2300};
  for (int i = 0; i <= 1000; ++i) {
    const double v = 12.0 + i / 1000.0;
    CHECK(interpolate_table(plateau, v, InterpolationMethod::cubic) == doctest::Approx(2300.0));
  }
  // dense brute-force sweep across random tables
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const CurveTable t = random_table(rng);
    for (std::size_t seg = 0; seg + 1 < t.size(); ++seg) {
      const double lo = std::min(t.y[seg], t.y[seg + 1]);
      const double hi = std::max(t.y[seg], t.y[seg + 1]);
      for (int i = 0; i <= 100; ++i) {
        const double v = t.v[seg] + (t.v[seg + 1] - t.v[seg]) * i / 100.0;
        const double y = interpolate_table(t, v, InterpolationMethod::cubic);
        CHECK(y >= lo - 1e-9);
        CHECK(y <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("interpolation holds boundary values outside the knot span") {
  CurveTable t;
  t.v = {5.0, 6.0, 7.0};
  t.y = {200.0, 300.0, 350.0};
  CHECK(interpolate_table(t, 1.0, InterpolationMethod::cubic) == 200.0);
  CHECK(interpolate_table(t, 9.0, InterpolationMethod::linear) == 350.0);
}

TEST_CASE("interpolation rejects degenerate tables") {
  CurveTable t;
  t.v = {5.0};
  t.y = {100.0};
  CHECK_THROWS_AS(interpolate_table(t, 5.0, InterpolationMethod::linear), ConfigError);
}

TEST_CASE("kinetic relation with the published swept area") {
  TurbineSpec spec = basic_spec();
  // force the coefficient to 0.4 at 10 m/s
  spec.cp_curve.v = {9.0, 10.0, 11.0};
  spec.cp_curve.y = {0.4, 0.4, 0.4};
  const double p = power_from_cp(spec, 10.0, 1.225, InterpolationMethod::linear);
  CHECK(p == doctest::Approx(969.96).epsilon(0.01 / 969.96));
}

TEST_CASE("kinetic relation edge cases") {
  const TurbineSpec spec = basic_spec();
  CHECK(power_from_cp(spec, 0.0, 1.225, InterpolationMethod::linear) == 0.0);  // below cut-in
  const double p1 = power_from_cp(spec, 9.0, 1.0, InterpolationMethod::linear);
  const double p2 = power_from_cp(spec, 9.0, 2.0, InterpolationMethod::linear);
  CHECK(p2 == doctest::Approx(2.0 * p1));
  CHECK_THROWS_AS(power_from_cp(spec, -1.0, 1.225, InterpolationMethod::linear), NumericError);
}

TEST_CASE("kinetic relation respects the Betz bound") {
  const TurbineSpec spec = synthetic_turbine_spec();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> wind(0.0, 30.0);
  std::uniform_real_distribution<double> dens(1.0, 1.4);
  for (int i = 0; i < 500; ++i) {
    const double v = wind(rng);
    const double rho = dens(rng);
    const double p = power_from_cp(spec, v, rho, InterpolationMethod::cubic);
    const double betz = 0.5 * 0.593 * rho * spec.swept_area_m2 * v * v * v / 1000.0;
    CHECK(p <= betz + 1e-9);
  }
}

TEST_CASE("predict_power: constant density at a knot returns the tabulated value") {
  const TurbineSpec spec = basic_spec();
  ModelVariant variant;
  variant.density = DensityMode::constant;
  variant.mapping = MappingMode::power_curve;
  variant.interpolation = InterpolationMethod::cubic;
  HubWeather w;
  w.wind_speed = 10.0;
  CHECK(predict_power(spec, w, variant) == 1650.0);  // bit-identical
}

TEST_CASE("predict_power: density scaling of the power curve") {
  TurbineSpec spec = basic_spec();
  // make P(v) = 1000 exactly at v = 9.5 via a flat segment
  spec.power_curve.v = {9.0, 10.0};
  spec.power_curve.y = {1000.0, 1000.0};
  ModelVariant variant;
  variant.density = DensityMode::humid;
  variant.mapping = MappingMode::power_curve;
  variant.interpolation = InterpolationMethod::linear;
  HubWeather w;
  w.wind_speed = 9.5;
  w.air = {293.15, 101325.0, 1.0};  // rho ~ 1.1936
  CHECK(predict_power(spec, w, variant) == doctest::Approx(974.4).epsilon(0.5 / 974.4));
}

TEST_CASE("predict_power: cold dense air hits the rated cap") {
  TurbineSpec spec = basic_spec();
  spec.power_curve.v = {9.0, 10.0};
  spec.power_curve.y = {2250.0, 2250.0};
  ModelVariant variant;
  variant.density = DensityMode::dry;
  variant.mapping = MappingMode::power_curve;
  variant.interpolation = InterpolationMethod::linear;
  variant.cap = true;
  HubWeather w;
  w.wind_speed = 9.5;
  // dry density 1.30 kg/m3 at ~271.5 K, 101325 Pa
  w.air.temperature_k = 101325.0 * constants::kMolarMassDryAir / (constants::kGasConstant * 1.30);
  w.air.pressure_pa = 101325.0;
  CHECK(density_dry(w.air) == doctest::Approx(1.30));
  CHECK(predict_power(spec, w, variant) == 2300.0);
  variant.cap = false;
  CHECK(predict_power(spec, w, variant) == doctest::Approx(2250.0 * 1.30 / 1.225));
}

TEST_CASE("predict_power: monotone in density, capped, nonnegative") {
  const TurbineSpec spec = synthetic_turbine_spec();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> wind(0.0, 30.0);
  std::uniform_real_distribution<double> temp(250.0, 310.0);
  for (const auto mapping : {MappingMode::power_curve, MappingMode::power_coefficient}) {
    for (int i = 0; i < 300; ++i) {
      ModelVariant variant;
      variant.density = DensityMode::dry;
      variant.mapping = mapping;
      variant.interpolation = InterpolationMethod::cubic;
      variant.cap = true;
      HubWeather w;
      w.wind_speed = wind(rng);
      w.air.temperature_k = temp(rng);
      w.air.pressure_pa = 101325.0;
      const double p = predict_power(spec, w, variant);
      CHECK(p >= 0.0);
      CHECK(p <= spec.rated_power_kw);
      CHECK(std::isfinite(p));
      HubWeather colder = w;
      colder.air.temperature_k = w.air.temperature_k - 10.0;  // denser
      CHECK(predict_power(spec, colder, variant) >= p - 1e-9);
    }
  }
}

TEST_CASE("predict_power: humidity required but absent is a config error") {
  const TurbineSpec spec = basic_spec();
  ModelVariant variant;
  variant.density = DensityMode::humid;
  variant.mapping = MappingMode::power_curve;
  HubWeather w;
  w.wind_speed = 10.0;
  w.air.relative_humidity = std::nullopt;
  CHECK_THROWS_AS(predict_power(spec, w, variant), ConfigError);
}

TEST_CASE("turbine spec validation enforces the Betz bound and ranges") {
  TurbineSpec spec = basic_spec();
  spec.cp_curve.y[2] = 0.60;  // above Betz
  CHECK_THROWS_AS(validate_spec(spec), ValidationError);
  spec = basic_spec();
  spec.power_curve.y[3] = 5000.0;  // above rated
  CHECK_THROWS_AS(validate_spec(spec), ValidationError);
  spec = basic_spec();
  spec.power_curve.v[1] = spec.power_curve.v[0];  // not strictly increasing
  CHECK_THROWS_AS(validate_spec(spec), ValidationError);
}

TEST_CASE("turbine spec JSON round trip") {
  const TurbineSpec spec = synthetic_turbine_spec();
  const auto path = std::filesystem::temp_directory_path() / "spec_roundtrip.json";
  save_turbine_spec(spec, path);
  const TurbineSpec loaded = load_turbine_spec(path);
  CHECK(loaded.rated_power_kw == spec.rated_power_kw);
  CHECK(loaded.power_curve.y == spec.power_curve.y);
  CHECK(loaded.cp_curve.y == spec.cp_curve.y);
}

}  // TEST_SUITE
