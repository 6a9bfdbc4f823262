#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "windtwin/layout.hpp"
#include "windtwin/nwp.hpp"
#include "windtwin/power_model.hpp"
#include "windtwin/time.hpp"

namespace windtwin {

// Additive-Gaussian degradation of the truth field, stddev growing with
// lead: sigma(L) = sigma0 + sigma_growth * L. A fraction of the error is
// shared by all grid nodes of one (issuance, valid) pair; forecast errors
// are spatially correlated, so farm aggregation cancels only the rest.
struct SynthSourceError {
  double bias = 0.0;
  double sigma0 = 0.5;          // wind speed [m/s]
  double sigma_growth = 0.01;   // m/s per lead hour
  double common_fraction = 0.0;    // share of wind error variance common to all nodes
  double temperature_sigma = 0.6;  // K
  double pressure_sigma = 60.0;    // Pa
  double humidity_sigma = 0.04;
  double direction_sigma = 10.0;   // deg
};

struct SynthConfig {
  std::uint64_t seed = 20260708;
  int n_turbines = 5;
  int duration_days = 485;  // 365-day training year + held-out report span
  Timestamp start = 1609459200;  // 2021-01-01T00:00:00Z

  // wind truth: AR(p) anomaly with real characteristic roots from synoptic
  // (slow) down to gust (fast) timescales, plus an annual swing and a
  // slowly drifting spatial tilt.
  double mean_wind = 8.8;  // m/s
  std::vector<double> ar_roots{0.97, 0.45};
  double ar_sigma = 0.24;  // innovation stddev [m/s] (stationary ~1.55)
  double wind_seasonal_amp = 0.5;    // annual mean-wind swing [m/s]
  double wind_seasonal_peak_day = 60.0;  // report months sit at the peak
  double diurnal_amp = 0.15;        // fixed-phase diurnal component [m/s]
  double diurnal_season_mod = 0.6;  // annual modulation of the diurnal amplitude
  double tilt_sigma = 0.35;     // stationary stddev of each tilt [m/s per km]
  double shear_per_m = 0.008;   // vertical wind gradient [1/s]
  // static terrain speed-up, alternating +/- across the row of turbines
  double turbine_offset_spread = 0.8;  // m/s

  // temperature / pressure / humidity cycles
  double temp_mean_k = 278.15;
  double temp_seasonal_amp = 16.0;  // K
  double temp_diurnal_amp = 1.0;    // K
  double pressure_mean_pa = 101000.0;
  double pressure_amp_pa = 900.0;
  double humidity_mean = 0.72;
  double humidity_amp = 0.22;

  // wind direction drift
  double direction_mean_deg = 230.0;
  double direction_swing_deg = 60.0;
  double direction_ar = 0.98;
  double direction_sigma_deg = 4.0;  // innovation

  // SCADA sampling
  int jitter_min_s = 180;
  int jitter_max_s = 600;
  double power_noise_kw = 120.0;
  double speed_noise = 0.25;        // m/s
  double direction_noise_deg = 2.0;
  double nacelle_noise_deg = 3.0;

  double hub_height = 80.0;

  SynthSourceError meps{0.0, 1.00, 0.003, 0.6, 0.6, 60.0, 0.04, 10.0};
  SynthSourceError simra{0.0, 0.30, 0.012, 0.0, 0.4, 40.0, 0.04, 6.0};
};

nlohmann::json synth_config_to_json(const SynthConfig& c);
SynthConfig synth_config_from_json(const nlohmann::json& j);

// E70-class 2.3 MW machine with plausible, clearly synthetic tables; the
// power curve and cp curve are mutually consistent at the knots.
TurbineSpec synthetic_turbine_spec();

struct SynthManifest {
  std::filesystem::path layout;
  std::filesystem::path turbine_spec;
  std::filesystem::path scada;
  std::filesystem::path truth;
  std::filesystem::path meps_forecast;
  std::filesystem::path simra_forecast;
  ForecastSource meps_source;
  ForecastSource simra_source;
};

// Writes layout, turbine spec, SCADA, ground truth, and two degraded
// forecast sets under out_dir. Fully deterministic per seed. The MEPS-like
// source is a coarse grid around the farm with humidity; the SIMRA-like
// source sits on the turbine positions without humidity.
SynthManifest generate(const SynthConfig& config, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& header_comment = {});

// The physics variant used to turn truth weather into truth power.
ModelVariant truth_power_variant();

}  // namespace windtwin
