#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <tuple>
#include <vector>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/layout.hpp"
#include "windtwin/pipeline.hpp"
#include "windtwin/synth.hpp"
#include "windtwin/timeseries.hpp"

using namespace windtwin;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

SynthConfig tiny_config() {
  SynthConfig c;
  c.duration_days = 20;
  c.seed = 424242;
  return c;
}

// Per-turbine truth rows keyed by (turbine, time).
struct TruthTable {
  std::map<std::string, std::map<Timestamp, std::vector<double>>> rows;  // ws, wd, T, p, phi, P
};

TruthTable read_truth(const std::filesystem::path& path) {
  TruthTable t;
  CsvReader csv(path);
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    const Timestamp ts = *parse_iso8601(row[1]);
    std::vector<double> vals;
    for (std::size_t i = 2; i < row.size(); ++i) vals.push_back(*parse_double(row[i]));
    t.rows[row[0]][ts] = vals;
  }
  return t;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("same seed twice gives byte-identical files") {
  const auto dir_a = temp_dir("synth_det_a");
  const auto dir_b = temp_dir("synth_det_b");
  const SynthConfig cfg = tiny_config();
  const SynthManifest a = generate(cfg, dir_a);
  const SynthManifest b = generate(cfg, dir_b);
  for (const auto& [pa, pb] :
       {std::pair{a.scada, b.scada}, {a.truth, b.truth}, {a.meps_forecast, b.meps_forecast},
        {a.simra_forecast, b.simra_forecast}, {a.layout, b.layout}}) {
    CHECK(read_file_bytes(pa) == read_file_bytes(pb));
  }
  // a different seed changes the data
  SynthConfig other = cfg;
  other.seed += 1;
  const auto dir_c = temp_dir("synth_det_c");
  const SynthManifest c = generate(other, dir_c);
  CHECK(read_file_bytes(a.scada) != read_file_bytes(c.scada));
}

TEST_CASE("SCADA sampling intervals stay within 3 to 10 minutes") {
  const auto dir = temp_dir("synth_jitter");
  const SynthManifest m = generate(tiny_config(), dir);
  const ScadaData data = load_scada(m.scada);
  for (const auto& [id, channels] : data.turbines) {
    const TimeSeries& s = channels.at(Channel::active_power);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const Timestamp gap = s.samples[i].timestamp - s.samples[i - 1].timestamp;
      CHECK(gap >= 180);
      CHECK(gap <= 600);
    }
  }
}

TEST_CASE("ground-truth power never exceeds rated power") {
  const auto dir = temp_dir("synth_rated");
  const SynthManifest m = generate(tiny_config(), dir);
  const TurbineSpec spec = load_turbine_spec(m.turbine_spec);
  const TruthTable truth = read_truth(m.truth);
  for (const auto& [id, rows] : truth.rows) {
    for (const auto& [t, vals] : rows) {
      CHECK(vals[5] <= spec.rated_power_kw + 1e-9);
      CHECK(vals[5] >= 0.0);
    }
  }
}

TEST_CASE("inter-turbine truth correlation is positive and below one") {
  const auto dir = temp_dir("synth_corr");
  SynthConfig cfg = tiny_config();
  cfg.duration_days = 60;
  const SynthManifest m = generate(cfg, dir);
  const TruthTable truth = read_truth(m.truth);
  const auto& first = truth.rows.at("T1");
  const auto& last = truth.rows.at("T5");
  std::vector<double> a, b;
  for (const auto& [t, vals] : first) {
    a.push_back(vals[0]);
    b.push_back(last.at(t)[0]);
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  const double corr = cov / std::sqrt(va * vb);
  CHECK(corr > 0.2);
  CHECK(corr < 0.995);
}

TEST_CASE("zero source error reproduces SCADA power up to measurement noise") {
  // With the spatial tilt and all degradation removed, the physics
  // prediction from the error-free source must match the hourly SCADA means
  // to the noise floor, and exactly once the noise is off too.
  const auto dir = temp_dir("synth_degenerate");
  SynthConfig cfg = tiny_config();
  cfg.tilt_sigma = 0.0;
  cfg.turbine_offset_spread = 0.0;  // the coarse grid cannot carry the ripple
  cfg.meps = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  cfg.power_noise_kw = 0.0;
  cfg.speed_noise = 0.0;
  const SynthManifest m = generate(cfg, dir);
  const TurbineSpec spec = load_turbine_spec(m.turbine_spec);
  const FarmLayout layout = load_layout(m.layout);
  const ForecastSet fcst = load_forecast(m.meps_forecast, m.meps_source);

  ModelVariant variant = truth_power_variant();
  variant.source = "meps_like";

  const ScadaData scada = load_scada(m.scada);
  double max_err = 0.0;
  for (const auto& turbine : layout.turbines) {
    const HubWeatherSeries hub = sample_at_hub(fcst, turbine, SamplingStrategy::idw4);
    const TimeSeries hourly =
        resample_hourly(scada.turbines.at(turbine.id).at(Channel::active_power),
                        ResamplePolicy::mean);
    for (const auto& e : hub.entries) {
      const Timestamp target = e.issuance + static_cast<Timestamp>(e.lead_h) * kSecondsPerHour;
      const auto measured = value_at(hourly, target, QueryMode::realtime);
      if (!measured) continue;
      const double predicted = predict_power(spec, e.weather, variant);
      max_err = std::max(max_err, std::abs(predicted - *measured));
    }
  }
  CHECK(max_err < 1e-6);

  // with measurement noise back on, the RMS gap stays at the noise floor
  const auto dir_noisy = temp_dir("synth_degenerate_noisy");
  SynthConfig noisy = cfg;
  noisy.power_noise_kw = 15.0;
  const SynthManifest mn = generate(noisy, dir_noisy);
  const ScadaData scada_n = load_scada(mn.scada);
  const ForecastSet fcst_n = load_forecast(mn.meps_forecast, mn.meps_source);
  double sq = 0.0;
  std::size_t n = 0;
  for (const auto& turbine : layout.turbines) {
    const HubWeatherSeries hub = sample_at_hub(fcst_n, turbine, SamplingStrategy::idw4);
    const TimeSeries hourly =
        resample_hourly(scada_n.turbines.at(turbine.id).at(Channel::active_power),
                        ResamplePolicy::mean);
    for (const auto& e : hub.entries) {
      const Timestamp target = e.issuance + static_cast<Timestamp>(e.lead_h) * kSecondsPerHour;
      const auto measured = value_at(hourly, target, QueryMode::realtime);
      if (!measured) continue;
      const double err = predict_power(spec, e.weather, variant) - *measured;
      sq += err * err;
      ++n;
    }
  }
  REQUIRE(n > 1000);
  CHECK(std::sqrt(sq / static_cast<double>(n)) < noisy.power_noise_kw);
}

TEST_CASE("forecast error stddev follows the configured growth curve") {
  const auto dir = temp_dir("synth_sigma");
  SynthConfig cfg = tiny_config();
  cfg.duration_days = 60;
  const SynthManifest m = generate(cfg, dir);
  const FarmLayout layout = load_layout(m.layout);
  const TruthTable truth = read_truth(m.truth);

  // Recover the linear truth field per hour from the per-turbine truth rows
  // (base + tilt_x * dx + tilt_y * dy), then measure forecast residuals at
  // the grid nodes against it.
  double cx = 0.0, cy = 0.0;
  for (const auto& t : layout.turbines) {
    cx += t.x;
    cy += t.y;
  }
  cx /= static_cast<double>(layout.turbines.size());
  cy /= static_cast<double>(layout.turbines.size());

  struct Plane {
    double b = 0.0, gx = 0.0, gy = 0.0;
    bool ok = false;
  };
  std::map<Timestamp, Plane> planes;
  {
    // least squares over the turbines; exact because the field is linear
    std::vector<std::array<double, 2>> xy;
    for (const auto& t : layout.turbines) {
      xy.push_back({(t.x - cx) / 1000.0, (t.y - cy) / 1000.0});
    }
    const auto& t1 = truth.rows.at("T1");
    for (const auto& [ts, unused] : t1) {
      (void)unused;
      double s11 = 0, s12 = 0, s22 = 0, s1 = 0, s2 = 0, sy = 0, sy1 = 0, sy2 = 0;
      const double n = static_cast<double>(layout.turbines.size());
      bool clamped = false;
      for (std::size_t i = 0; i < layout.turbines.size(); ++i) {
        const double v = truth.rows.at(layout.turbines[i].id).at(ts)[0];
        if (v < 0.5) clamped = true;
        s11 += xy[i][0] * xy[i][0];
        s12 += xy[i][0] * xy[i][1];
        s22 += xy[i][1] * xy[i][1];
        s1 += xy[i][0];
        s2 += xy[i][1];
        sy += v;
        sy1 += v * xy[i][0];
        sy2 += v * xy[i][1];
      }
      // normal equations for [b, gx, gy]
      const double a11 = n, a12 = s1, a13 = s2;
      const double a22 = s11, a23 = s12, a33 = s22;
      const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                         a13 * (a12 * a23 - a22 * a13);
      if (clamped || std::abs(det) < 1e-9) continue;
      Plane p;
      p.b = ((a22 * a33 - a23 * a23) * sy + (a13 * a23 - a12 * a33) * sy1 +
             (a12 * a23 - a13 * a22) * sy2) /
            det;
      p.gx = ((a23 * a13 - a12 * a33) * sy + (a11 * a33 - a13 * a13) * sy1 +
              (a12 * a13 - a11 * a23) * sy2) /
             det;
      p.gy = ((a12 * a23 - a22 * a13) * sy + (a12 * a13 - a11 * a23) * sy1 +
              (a11 * a22 - a12 * a12) * sy2) /
             det;
      p.ok = true;
      planes[ts] = p;
    }
  }

  auto check_source = [&](const std::filesystem::path& file, const ForecastSource& source,
                          const SynthSourceError& err, const std::vector<int>& leads) {
    const ForecastSet fcst = load_forecast(file, source);
    // residuals per (lead, node position): the static terrain ripple and
    // the plane-projection leftovers are constant per node, so each node
    // list is demeaned before pooling
    std::map<int, std::map<std::tuple<double, double, double>, std::vector<double>>> residuals;
    for (const auto& [iss, valids] : fcst.records) {
      for (const auto& [valid, nodes] : valids) {
        const int lead = static_cast<int>((valid - iss) / kSecondsPerHour);
        const auto pit = planes.find(valid);
        if (pit == planes.end() || !pit->second.ok) continue;
        const Plane& p = pit->second;
        for (const auto& node : nodes) {
          const double field = p.b + p.gx * (node.x - cx) / 1000.0 +
                               p.gy * (node.y - cy) / 1000.0 +
                               cfg.shear_per_m * (node.height - cfg.hub_height);
          residuals[lead][{node.x, node.y, node.height}].push_back(node.wind_speed - field);
        }
      }
    }
    for (int lead : leads) {
      double sq = 0.0;
      std::size_t n = 0;
      for (auto& [key, list] : residuals.at(lead)) {
        double mean = 0.0;
        for (double x : list) mean += x;
        mean /= static_cast<double>(list.size());
        for (double x : list) sq += (x - mean) * (x - mean);
        n += list.size() - 1;
      }
      REQUIRE(n >= 1000);
      const double expected = err.sigma0 + err.sigma_growth * lead;
      CHECK(std::sqrt(sq / static_cast<double>(n)) == doctest::Approx(expected).epsilon(0.10));
    }
  };
  check_source(m.meps_forecast, m.meps_source, cfg.meps, {1, 30, 61});
  check_source(m.simra_forecast, m.simra_source, cfg.simra, {6, 12, 18});
}

TEST_CASE("run_synth writes a loadable run config with non-overlapping periods") {
  const auto dir = temp_dir("synth_runcfg");
  SynthConfig cfg = tiny_config();
  const RunConfig rc = pipeline::run_synth(cfg, dir);
  CHECK(rc.seed == cfg.seed);
  CHECK(rc.selection_period.end <= rc.report_period.begin);
  CHECK(std::filesystem::exists(dir / "runconfig.json"));
  CHECK(rc.forecasts.size() == 2);
  CHECK(!rc.variants.empty());
  // every output embeds the config hash
  const std::string scada_head = read_file_bytes(dir / "scada.csv").substr(0, 64);
  CHECK(scada_head.find("config_hash=" + config_hash(rc)) != std::string::npos);
}

TEST_CASE("synth config validation") {
  SynthConfig bad = tiny_config();
  bad.jitter_min_s = 60;  // below the 3-minute floor
  CHECK_THROWS_AS(generate(bad, temp_dir("synth_bad1")), ConfigError);
  bad = tiny_config();
  bad.ar_roots = {0.97, 1.2};
  CHECK_THROWS_AS(generate(bad, temp_dir("synth_bad2")), ConfigError);
}

}  // TEST_SUITE
