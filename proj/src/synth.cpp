#include "windtwin/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "windtwin/angles.hpp"
#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Independent, label-addressed deterministic sub-stream.
std::mt19937_64 sub_rng(std::uint64_t seed, const std::string& label) {
  return std::mt19937_64(splitmix64(seed ^ fnv1a(label)));
}

json source_error_to_json(const SynthSourceError& e) {
  return {{"bias", e.bias},
          {"sigma0", e.sigma0},
          {"sigma_growth", e.sigma_growth},
          {"common_fraction", e.common_fraction},
          {"temperature_sigma", e.temperature_sigma},
          {"pressure_sigma", e.pressure_sigma},
          {"humidity_sigma", e.humidity_sigma},
          {"direction_sigma", e.direction_sigma}};
}

SynthSourceError source_error_from_json(const json& j) {
  SynthSourceError e;
  e.bias = j.at("bias").get<double>();
  e.sigma0 = j.at("sigma0").get<double>();
  e.sigma_growth = j.at("sigma_growth").get<double>();
  e.common_fraction = j.at("common_fraction").get<double>();
  e.temperature_sigma = j.at("temperature_sigma").get<double>();
  e.pressure_sigma = j.at("pressure_sigma").get<double>();
  e.humidity_sigma = j.at("humidity_sigma").get<double>();
  e.direction_sigma = j.at("direction_sigma").get<double>();
  return e;
}

}  // namespace

json synth_config_to_json(const SynthConfig& c) {
  return {{"seed", c.seed},
          {"n_turbines", c.n_turbines},
          {"duration_days", c.duration_days},
          {"start", format_iso8601(c.start)},
          {"mean_wind", c.mean_wind},
          {"ar_roots", c.ar_roots},
          {"ar_sigma", c.ar_sigma},
          {"wind_seasonal_amp", c.wind_seasonal_amp},
          {"wind_seasonal_peak_day", c.wind_seasonal_peak_day},
          {"diurnal_amp", c.diurnal_amp},
          {"diurnal_season_mod", c.diurnal_season_mod},
          {"tilt_sigma", c.tilt_sigma},
          {"shear_per_m", c.shear_per_m},
          {"turbine_offset_spread", c.turbine_offset_spread},
          {"temp_mean_k", c.temp_mean_k},
          {"temp_seasonal_amp", c.temp_seasonal_amp},
          {"temp_diurnal_amp", c.temp_diurnal_amp},
          {"pressure_mean_pa", c.pressure_mean_pa},
          {"pressure_amp_pa", c.pressure_amp_pa},
          {"humidity_mean", c.humidity_mean},
          {"humidity_amp", c.humidity_amp},
          {"direction_mean_deg", c.direction_mean_deg},
          {"direction_swing_deg", c.direction_swing_deg},
          {"direction_ar", c.direction_ar},
          {"direction_sigma_deg", c.direction_sigma_deg},
          {"jitter_min_s", c.jitter_min_s},
          {"jitter_max_s", c.jitter_max_s},
          {"power_noise_kw", c.power_noise_kw},
          {"speed_noise", c.speed_noise},
          {"direction_noise_deg", c.direction_noise_deg},
          {"nacelle_noise_deg", c.nacelle_noise_deg},
          {"hub_height", c.hub_height},
          {"meps", source_error_to_json(c.meps)},
          {"simra", source_error_to_json(c.simra)}};
}

SynthConfig synth_config_from_json(const json& j) {
  SynthConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.n_turbines = j.at("n_turbines").get<int>();
  c.duration_days = j.at("duration_days").get<int>();
  c.start = parse_iso8601_or_throw(j.at("start").get<std::string>(), "synth config");
  c.mean_wind = j.at("mean_wind").get<double>();
  c.ar_roots = j.at("ar_roots").get<std::vector<double>>();
  c.ar_sigma = j.at("ar_sigma").get<double>();
  c.wind_seasonal_amp = j.at("wind_seasonal_amp").get<double>();
  c.wind_seasonal_peak_day = j.at("wind_seasonal_peak_day").get<double>();
  c.diurnal_amp = j.at("diurnal_amp").get<double>();
  c.diurnal_season_mod = j.at("diurnal_season_mod").get<double>();
  c.tilt_sigma = j.at("tilt_sigma").get<double>();
  c.shear_per_m = j.at("shear_per_m").get<double>();
  c.turbine_offset_spread = j.at("turbine_offset_spread").get<double>();
  c.temp_mean_k = j.at("temp_mean_k").get<double>();
  c.temp_seasonal_amp = j.at("temp_seasonal_amp").get<double>();
  c.temp_diurnal_amp = j.at("temp_diurnal_amp").get<double>();
  c.pressure_mean_pa = j.at("pressure_mean_pa").get<double>();
  c.pressure_amp_pa = j.at("pressure_amp_pa").get<double>();
  c.humidity_mean = j.at("humidity_mean").get<double>();
  c.humidity_amp = j.at("humidity_amp").get<double>();
  c.direction_mean_deg = j.at("direction_mean_deg").get<double>();
  c.direction_swing_deg = j.at("direction_swing_deg").get<double>();
  c.direction_ar = j.at("direction_ar").get<double>();
  c.direction_sigma_deg = j.at("direction_sigma_deg").get<double>();
  c.jitter_min_s = j.at("jitter_min_s").get<int>();
  c.jitter_max_s = j.at("jitter_max_s").get<int>();
  c.power_noise_kw = j.at("power_noise_kw").get<double>();
  c.speed_noise = j.at("speed_noise").get<double>();
  c.direction_noise_deg = j.at("direction_noise_deg").get<double>();
  c.nacelle_noise_deg = j.at("nacelle_noise_deg").get<double>();
  c.hub_height = j.at("hub_height").get<double>();
  c.meps = source_error_from_json(j.at("meps"));
  c.simra = source_error_from_json(j.at("simra"));
  return c;
}

TurbineSpec synthetic_turbine_spec() {
  TurbineSpec spec;
  spec.rated_power_kw = 2300.0;
  spec.swept_area_m2 = 3959.0;
  spec.cut_in = 3.0;
  spec.cut_out = 25.0;
  // Pitch-regulated shape: gentle rise after cut-in, a long near-linear
  // mid-section, and the rated plateau from 15 m/s. The coefficient table
  // is derived from the same knots so both mappings agree there.
  const std::vector<double> power_raw = {0.0, 0.0,  20.0,  70.0,  150.0,  270.0,  440.0,
                                         660.0, 910.0, 1160.0, 1410.0, 1660.0, 1910.0, 2160.0};
  const double factor = 0.5 * constants::kStandardDensity * spec.swept_area_m2 / 1000.0;
  for (int v = 1; v <= 25; ++v) {
    const double vd = static_cast<double>(v);
    const double p = (v <= static_cast<int>(power_raw.size()))
                         ? power_raw[v - 1]
                         : spec.rated_power_kw;
    spec.power_curve.v.push_back(vd);
    spec.power_curve.y.push_back(p);
    spec.cp_curve.v.push_back(vd);
    spec.cp_curve.y.push_back(p / (factor * vd * vd * vd));
  }
  validate_spec(spec);
  return spec;
}

ModelVariant truth_power_variant() {
  ModelVariant v;
  v.source = "truth";
  v.density = DensityMode::humid;
  v.mapping = MappingMode::power_curve;
  v.interpolation = InterpolationMethod::cubic;
  v.cap = true;
  return v;
}

namespace {

// Stationary variance of an AR(p) with unit innovation variance, from the
// Yule-Walker equations (gamma_0..gamma_p solved as a linear system).
double ar_stationary_variance(const std::vector<double>& phi) {
  const std::size_t p = phi.size();
  const std::size_t n = p + 1;
  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  // row 0: gamma_0 - sum phi_j gamma_j = 1
  a[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) a[j] = -phi[j - 1];
  b[0] = 1.0;
  // row k: gamma_k - sum phi_j gamma_|k-j| = 0
  for (std::size_t k = 1; k <= p; ++k) {
    a[k * n + k] += 1.0;
    for (std::size_t j = 1; j <= p; ++j) {
      const std::size_t idx = k >= j ? k - j : j - k;
      a[k * n + idx] -= phi[j - 1];
    }
    b[k] = 0.0;
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    }
    for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = 0; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  return b[0] / a[0];
}

struct TruthProcess {
  const SynthConfig& cfg;
  std::vector<double> base, tilt_x, tilt_y, temperature, pressure, humidity, direction;
  double centre_x = 0.0, centre_y = 0.0;
  std::size_t hours = 0;

  explicit TruthProcess(const SynthConfig& config, const FarmLayout& layout) : cfg(config) {
    hours = static_cast<std::size_t>(config.duration_days) * 24;
    for (const auto& t : layout.turbines) {
      centre_x += t.x;
      centre_y += t.y;
    }
    centre_x /= static_cast<double>(layout.turbines.size());
    centre_y /= static_cast<double>(layout.turbines.size());

    base.resize(hours);
    tilt_x.resize(hours);
    tilt_y.resize(hours);
    temperature.resize(hours);
    pressure.resize(hours);
    humidity.resize(hours);
    direction.resize(hours);

    std::normal_distribution<double> n01(0.0, 1.0);
    auto ar_series = [&](std::vector<double>& out, double coeff, double stationary_sigma,
                         const std::string& label) {
      auto rng = sub_rng(cfg.seed, label);
      const double innov = stationary_sigma * std::sqrt(1.0 - coeff * coeff);
      double state = stationary_sigma * n01(rng);
      for (std::size_t h = 0; h < hours; ++h) {
        out[h] = state;
        state = coeff * state + innov * n01(rng);
      }
    };
    // AR(p) from the characteristic roots: (1 - r1 L)(1 - r2 L)... applied
    // to white noise. The tilts share the operator so the wind at every
    // point of the field stays AR(p).
    const std::vector<double> phi = [&] {
      std::vector<double> poly{1.0};  // coefficients of prod (1 - r L)
      for (double r : cfg.ar_roots) {
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
          next[i] += poly[i];
          next[i + 1] -= r * poly[i];
        }
        poly = std::move(next);
      }
      std::vector<double> out(poly.size() - 1);
      for (std::size_t i = 1; i < poly.size(); ++i) out[i - 1] = -poly[i];
      return out;
    }();
    const double var_ratio = ar_stationary_variance(phi);  // Var(v)/Var(eps)
    auto arp_series = [&](std::vector<double>& out, double innov_sigma,
                          const std::string& label) {
      auto rng = sub_rng(cfg.seed, label);
      const std::size_t p = phi.size();
      std::vector<double> state(p, 0.0);  // newest first
      const std::size_t burn_in = 3000;
      for (std::size_t h = 0; h < hours + burn_in; ++h) {
        double cur = innov_sigma * n01(rng);
        for (std::size_t j = 0; j < p; ++j) cur += phi[j] * state[j];
        for (std::size_t j = p; j-- > 1;) state[j] = state[j - 1];
        state[0] = cur;
        if (h >= burn_in) out[h - burn_in] = cur;
      }
    };
    arp_series(base, cfg.ar_sigma, "truth/ar");
    const double tilt_innov = cfg.tilt_sigma / std::sqrt(var_ratio);
    arp_series(tilt_x, tilt_innov, "truth/tiltx");
    arp_series(tilt_y, tilt_innov, "truth/tilty");

    std::vector<double> dir_ar(hours);
    const double dir_stationary =
        cfg.direction_sigma_deg / std::sqrt(1.0 - cfg.direction_ar * cfg.direction_ar);
    ar_series(dir_ar, cfg.direction_ar, dir_stationary, "truth/dir");

    for (std::size_t h = 0; h < hours; ++h) {
      const double hod = static_cast<double>(h % 24);
      const double day = static_cast<double>(h) / 24.0;
      const double diurnal_amp =
          cfg.diurnal_amp *
          (1.0 + cfg.diurnal_season_mod * std::sin(2.0 * kPi * (day - 80.0) / 365.25));
      base[h] += cfg.mean_wind +
                 cfg.wind_seasonal_amp *
                     std::cos(2.0 * kPi * (day - cfg.wind_seasonal_peak_day) / 365.25) +
                 diurnal_amp * std::sin(2.0 * kPi * (hod - 11.0) / 24.0);
      temperature[h] = cfg.temp_mean_k +
                       cfg.temp_seasonal_amp * std::sin(2.0 * kPi * (day - 105.0) / 365.25) +
                       cfg.temp_diurnal_amp * std::sin(2.0 * kPi * (hod - 9.0) / 24.0);
      pressure[h] = cfg.pressure_mean_pa +
                    cfg.pressure_amp_pa * std::sin(2.0 * kPi * static_cast<double>(h) / 397.0);
      humidity[h] = std::clamp(
          cfg.humidity_mean +
              cfg.humidity_amp * std::sin(2.0 * kPi * static_cast<double>(h) / 211.0 + 1.0),
          0.02, 1.0);
      direction[h] = wrap_degrees(
          cfg.direction_mean_deg +
          cfg.direction_swing_deg * std::sin(2.0 * kPi * static_cast<double>(h) / 497.0) +
          dir_ar[h]);
    }
  }

  double wind_at(double x, double y, double z, std::size_t h) const {
    // short-wavelength static terrain speed-up; the fine source resolves
    // it, the coarse grid cannot
    const double terrain = cfg.turbine_offset_spread * std::sin(2.0 * kPi * (x / 700.0 + 0.37));
    const double v = base[h] + terrain + tilt_x[h] * (x - centre_x) / 1000.0 +
                     tilt_y[h] * (y - centre_y) / 1000.0 +
                     cfg.shear_per_m * (z - cfg.hub_height);
    return std::max(0.0, v);
  }

  HubWeather weather_at(double x, double y, double z, std::size_t h) const {
    HubWeather w;
    w.wind_speed = wind_at(x, y, z, h);
    w.wind_direction = direction[h];
    w.air.temperature_k = temperature[h];
    w.air.pressure_pa = pressure[h];
    w.air.relative_humidity = humidity[h];
    return w;
  }
};

FarmLayout make_layout(const SynthConfig& cfg) {
  FarmLayout layout;
  layout.farm_id = "synthfarm";
  layout.origin_x = 0.0;
  layout.origin_y = 0.0;
  static constexpr double y_pattern[5] = {0.0, 300.0, 600.0, 150.0, 450.0};
  for (int i = 0; i < cfg.n_turbines; ++i) {
    TurbinePosition t;
    t.id = "T" + std::to_string(i + 1);
    t.x = 900.0 * i;
    t.y = y_pattern[i % 5] + 750.0 * (i / 5);
    t.hub_height = cfg.hub_height;
    t.elevation = 40.0 + 7.0 * i;
    layout.turbines.push_back(t);
  }
  return layout;
}

void write_comment_lines(std::ofstream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
}

struct ForecastGridSpec {
  // (x, y) columns and height levels
  std::vector<std::pair<double, double>> columns;
  std::vector<double> levels;
};

void write_forecast_csv(const std::filesystem::path& path, const std::string& source_name,
                        const ForecastSource& source, const SynthSourceError& err,
                        const ForecastGridSpec& grid, bool with_humidity,
                        const TruthProcess& truth, const SynthConfig& cfg,
                        const std::vector<std::string>& header_comment) {
  auto out = open_output(path);
  write_comment_lines(out, header_comment);
  out << "source,issuance,valid,x,y,height,wind_speed,wind_direction,temperature,pressure";
  if (with_humidity) out << ",humidity";
  out << "\n";
  auto rng = sub_rng(cfg.seed, "forecast/" + source_name);
  std::normal_distribution<double> n01(0.0, 1.0);
  const Timestamp end = cfg.start + static_cast<Timestamp>(cfg.duration_days) * kSecondsPerDay;
  const Timestamp period = static_cast<Timestamp>(source.issuance_period_h) * kSecondsPerHour;
  const double common_scale = std::sqrt(std::clamp(err.common_fraction, 0.0, 1.0));
  const double node_scale = std::sqrt(1.0 - std::clamp(err.common_fraction, 0.0, 1.0));
  for (Timestamp issuance = cfg.start; issuance < end; issuance += period) {
    for (int lead = source.lead_min_h; lead <= source.lead_max_h; lead += source.step_h) {
      const Timestamp valid = issuance + static_cast<Timestamp>(lead) * kSecondsPerHour;
      if (valid >= end) continue;
      const auto h = static_cast<std::size_t>((valid - cfg.start) / kSecondsPerHour);
      const double sigma = err.sigma0 + err.sigma_growth * static_cast<double>(lead);
      const double common_err = sigma * common_scale * n01(rng);
      for (const auto& [cx, cy] : grid.columns) {
        for (double level : grid.levels) {
          const double wind = std::max(0.0, truth.wind_at(cx, cy, level, h) + err.bias +
                                                common_err + sigma * node_scale * n01(rng));
          const double dir =
              wrap_degrees(truth.direction[h] + err.direction_sigma * n01(rng));
          const double temp = truth.temperature[h] + err.temperature_sigma * n01(rng);
          const double pres = truth.pressure[h] + err.pressure_sigma * n01(rng);
          out << source_name << ',' << format_iso8601(issuance) << ',' << format_iso8601(valid)
              << ',' << fmt_double(cx) << ',' << fmt_double(cy) << ',' << fmt_double(level)
              << ',' << fmt_double(wind) << ',' << fmt_double(dir) << ',' << fmt_double(temp)
              << ',' << fmt_double(pres);
          if (with_humidity) {
            const double hum =
                std::clamp(truth.humidity[h] + err.humidity_sigma * n01(rng), 0.0, 1.0);
            out << ',' << fmt_double(hum);
          }
          out << "\n";
        }
      }
    }
  }
}

}  // namespace

SynthManifest generate(const SynthConfig& config, const std::filesystem::path& out_dir,
                       const std::vector<std::string>& header_comment) {
  if (config.n_turbines < 1) throw ConfigError("synth: n_turbines must be >= 1");
  if (config.duration_days < 2) throw ConfigError("synth: duration_days must be >= 2");
  if (config.ar_roots.empty() || config.ar_roots.size() > 6) {
    throw ConfigError("synth: need between 1 and 6 AR roots");
  }
  for (double r : config.ar_roots) {
    if (r <= 0.0 || r >= 1.0) throw ConfigError("synth: AR roots must be in (0, 1)");
  }
  if (config.jitter_min_s < 180 || config.jitter_max_s > 600 ||
      config.jitter_min_s > config.jitter_max_s) {
    throw ConfigError("synth: SCADA jitter must lie within [180, 600] s");
  }

  std::filesystem::create_directories(out_dir);
  SynthManifest manifest;
  manifest.layout = out_dir / "layout.json";
  manifest.turbine_spec = out_dir / "turbine_spec.json";
  manifest.scada = out_dir / "scada.csv";
  manifest.truth = out_dir / "truth.csv";
  manifest.meps_forecast = out_dir / "forecast_meps_like.csv";
  manifest.simra_forecast = out_dir / "forecast_simra_like.csv";
  manifest.meps_source = ForecastSource::meps("meps_like");
  manifest.meps_source.horizontal_resolution_m = 5000.0;
  manifest.simra_source = ForecastSource::simra("simra_like");

  const FarmLayout layout = make_layout(config);
  save_layout(layout, manifest.layout);
  const TurbineSpec spec = synthetic_turbine_spec();
  save_turbine_spec(spec, manifest.turbine_spec);

  const TruthProcess truth(config, layout);
  const ModelVariant variant = truth_power_variant();
  const std::size_t hours = truth.hours;

  // Truth power per turbine-hour, reused by the SCADA stream.
  std::vector<std::vector<double>> truth_power(layout.turbines.size(),
                                               std::vector<double>(hours));
  for (std::size_t i = 0; i < layout.turbines.size(); ++i) {
    const auto& t = layout.turbines[i];
    for (std::size_t h = 0; h < hours; ++h) {
      truth_power[i][h] = predict_power(spec, truth.weather_at(t.x, t.y, t.hub_height, h), variant);
    }
  }

  {
    auto out = open_output(manifest.truth);
    write_comment_lines(out, header_comment);
    out << "turbine_id,time,wind_speed,wind_direction,temperature,pressure,humidity,power_kw\n";
    for (std::size_t i = 0; i < layout.turbines.size(); ++i) {
      const auto& t = layout.turbines[i];
      for (std::size_t h = 0; h < hours; ++h) {
        const HubWeather w = truth.weather_at(t.x, t.y, t.hub_height, h);
        out << t.id << ',' << format_iso8601(config.start + static_cast<Timestamp>(h) * 3600)
            << ',' << fmt_double(w.wind_speed) << ',' << fmt_double(w.wind_direction) << ','
            << fmt_double(w.air.temperature_k) << ',' << fmt_double(w.air.pressure_pa) << ','
            << fmt_double(*w.air.relative_humidity) << ',' << fmt_double(truth_power[i][h])
            << "\n";
      }
    }
  }

  {
    auto out = open_output(manifest.scada);
    write_comment_lines(out, header_comment);
    out << "turbine_id,timestamp,channel,value\n";
    const Timestamp end = config.start + static_cast<Timestamp>(config.duration_days) * kSecondsPerDay;
    std::normal_distribution<double> n01(0.0, 1.0);
    for (std::size_t i = 0; i < layout.turbines.size(); ++i) {
      const auto& t = layout.turbines[i];
      auto rng = sub_rng(config.seed, "scada/" + t.id);
      std::uniform_int_distribution<int> jitter(config.jitter_min_s, config.jitter_max_s);
      Timestamp at = config.start + jitter(rng);
      while (at < end) {
        const auto h = static_cast<std::size_t>((at - config.start) / kSecondsPerHour);
        const HubWeather w = truth.weather_at(t.x, t.y, t.hub_height, h);
        const double speed = std::max(0.0, w.wind_speed + config.speed_noise * n01(rng));
        const double dir = wrap_degrees(w.wind_direction + config.direction_noise_deg * n01(rng));
        const double nacelle =
            wrap_degrees(w.wind_direction + config.nacelle_noise_deg * n01(rng));
        const double power = std::clamp(truth_power[i][h] + config.power_noise_kw * n01(rng),
                                        0.0, spec.rated_power_kw);
        const std::string stamp = format_iso8601(at);
        out << t.id << ',' << stamp << ",wind_speed," << fmt_double(speed) << "\n";
        out << t.id << ',' << stamp << ",wind_direction," << fmt_double(dir) << "\n";
        out << t.id << ',' << stamp << ",nacelle_direction," << fmt_double(nacelle) << "\n";
        out << t.id << ',' << stamp << ",active_power," << fmt_double(power) << "\n";
        at += jitter(rng);
      }
    }
  }

  double farm_min_x = layout.turbines.front().x, farm_max_x = farm_min_x;
  double farm_min_y = layout.turbines.front().y, farm_max_y = farm_min_y;
  for (const auto& t : layout.turbines) {
    farm_min_x = std::min(farm_min_x, t.x);
    farm_max_x = std::max(farm_max_x, t.x);
    farm_min_y = std::min(farm_min_y, t.y);
    farm_max_y = std::max(farm_max_y, t.y);
  }
  const double gx0 = farm_min_x - 1000.0, gx1 = farm_max_x + 1000.0;
  const double gy0 = farm_min_y - 1000.0, gy1 = farm_max_y + 1000.0;
  ForecastGridSpec meps_grid;
  meps_grid.columns = {{gx0, gy0}, {gx0, gy1}, {gx1, gy0}, {gx1, gy1}};
  meps_grid.levels = {config.hub_height - 50.0, config.hub_height + 50.0};
  write_forecast_csv(manifest.meps_forecast, "meps_like", manifest.meps_source, config.meps,
                     meps_grid, /*with_humidity=*/true, truth, config, header_comment);

  ForecastGridSpec simra_grid;
  for (const auto& t : layout.turbines) simra_grid.columns.emplace_back(t.x, t.y);
  simra_grid.levels = {config.hub_height - 40.0, config.hub_height};
  write_forecast_csv(manifest.simra_forecast, "simra_like", manifest.simra_source, config.simra,
                     simra_grid, /*with_humidity=*/false, truth, config, header_comment);

  return manifest;
}

}  // namespace windtwin
