#include "windtwin/power_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

using nlohmann::json;

namespace {
constexpr double kBetzLimit = 0.593;

std::size_t segment_index(const CurveTable& table, double v) {
  // Largest i with v[i] <= v, clamped to [0, n-2].
  auto it = std::upper_bound(table.v.begin(), table.v.end(), v);
  if (it == table.v.begin()) return 0;
  std::size_t i = static_cast<std::size_t>(it - table.v.begin()) - 1;
  return std::min(i, table.size() - 2);
}

// Fritsch-Carlson knot slopes: zero at sign changes and local extrema,
// magnitude limited to 3x the adjacent secant so segments cannot overshoot.
std::vector<double> monotone_slopes(const CurveTable& t) {
  const std::size_t n = t.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (t.y[i + 1] - t.y[i]) / (t.v[i + 1] - t.v[i]);
  }
  std::vector<double> m(n);
  m[0] = secant[0];
  m[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (secant[i - 1] * secant[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      m[i] = 0.5 * (secant[i - 1] + secant[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      m[i] = 0.0;
      m[i + 1] = 0.0;
      continue;
    }
    const double a = m[i] / secant[i];
    const double b = m[i + 1] / secant[i];
    if (a < 0.0) m[i] = 0.0;
    if (b < 0.0) m[i + 1] = 0.0;
    if (a > 3.0) m[i] = 3.0 * secant[i];
    if (b > 3.0) m[i + 1] = 3.0 * secant[i];
  }
  return m;
}

}  // namespace

std::string ModelVariant::id() const {
  std::string out = source;
  switch (density) {
    case DensityMode::constant: out += "_rhoconst"; break;
    case DensityMode::dry: out += "_rhodry"; break;
    case DensityMode::humid: out += "_rhohumid"; break;
  }
  out += mapping == MappingMode::power_curve ? "_curve" : "_cp";
  out += interpolation == InterpolationMethod::linear ? "_lin" : "_cubic";
  out += cap ? "_cap" : "_nocap";
  return out;
}

void validate_spec(const TurbineSpec& spec) {
  if (spec.rated_power_kw <= 0.0) throw ValidationError("turbine spec: rated power must be > 0");
  if (spec.swept_area_m2 <= 0.0) throw ValidationError("turbine spec: swept area must be > 0");
  if (spec.cut_in < 0.0 || spec.cut_out <= spec.cut_in) {
    throw ValidationError("turbine spec: need 0 <= cut_in < cut_out");
  }
  auto check_knots = [](const CurveTable& t, const std::string& name) {
    if (t.v.size() != t.y.size()) throw ValidationError("turbine spec: " + name + " shape mismatch");
    if (t.size() < 2) throw ConfigError("turbine spec: " + name + " needs at least 2 knots");
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t.v[i] <= t.v[i - 1]) {
        throw ValidationError("turbine spec: " + name + " knots not strictly increasing");
      }
    }
  };
  check_knots(spec.power_curve, "power_curve");
  check_knots(spec.cp_curve, "cp_curve");
  for (double p : spec.power_curve.y) {
    if (p < 0.0 || p > spec.rated_power_kw) {
      throw ValidationError("turbine spec: power_curve value outside [0, rated]");
    }
  }
  for (double cp : spec.cp_curve.y) {
    if (cp < 0.0 || cp >= kBetzLimit) {
      throw ValidationError("turbine spec: cp_curve value violates the Betz bound");
    }
  }
}

TurbineSpec load_turbine_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open turbine spec " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("turbine spec " + path.string() + ": " + e.what());
  }
  TurbineSpec spec;
  try {
    spec.rated_power_kw = j.at("rated_power_kw").get<double>();
    spec.swept_area_m2 = j.at("swept_area_m2").get<double>();
    spec.cut_in = j.at("cut_in").get<double>();
    spec.cut_out = j.at("cut_out").get<double>();
    for (const auto& knot : j.at("power_curve")) {
      spec.power_curve.v.push_back(knot.at(0).get<double>());
      spec.power_curve.y.push_back(knot.at(1).get<double>());
    }
    for (const auto& knot : j.at("cp_curve")) {
      spec.cp_curve.v.push_back(knot.at(0).get<double>());
      spec.cp_curve.y.push_back(knot.at(1).get<double>());
    }
  } catch (const json::exception& e) {
    throw FormatError("turbine spec " + path.string() + ": " + e.what());
  }
  validate_spec(spec);
  return spec;
}

void save_turbine_spec(const TurbineSpec& spec, const std::filesystem::path& path) {
  json j;
  j["rated_power_kw"] = spec.rated_power_kw;
  j["swept_area_m2"] = spec.swept_area_m2;
  j["cut_in"] = spec.cut_in;
  j["cut_out"] = spec.cut_out;
  j["power_curve"] = json::array();
  for (std::size_t i = 0; i < spec.power_curve.size(); ++i) {
    j["power_curve"].push_back({spec.power_curve.v[i], spec.power_curve.y[i]});
  }
  j["cp_curve"] = json::array();
  for (std::size_t i = 0; i < spec.cp_curve.size(); ++i) {
    j["cp_curve"].push_back({spec.cp_curve.v[i], spec.cp_curve.y[i]});
  }
  auto out = open_output(path);
  out << j.dump(2) << "\n";
}

double interpolate_table(const CurveTable& table, double v, InterpolationMethod method) {
  if (table.size() < 2) {
    throw ConfigError("interpolate_table: table needs at least 2 knots");
  }
  if (v <= table.v.front()) return table.y.front();
  if (v >= table.v.back()) return table.y.back();
  const std::size_t i = segment_index(table, v);
  const double h = table.v[i + 1] - table.v[i];
  const double s = (v - table.v[i]) / h;
  if (method == InterpolationMethod::linear) {
    return table.y[i] + s * (table.y[i + 1] - table.y[i]);
  }
  const std::vector<double> m = monotone_slopes(table);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * table.y[i] + h10 * h * m[i] + h01 * table.y[i + 1] + h11 * h * m[i + 1];
}

double variant_density(const AtmosphericState& air, DensityMode mode) {
  switch (mode) {
    case DensityMode::constant: return constants::kStandardDensity;
    case DensityMode::dry: return density_dry(air);
    case DensityMode::humid: return density_humid(air);
  }
  return constants::kStandardDensity;
}

double power_from_cp(const TurbineSpec& spec, double v, double rho, InterpolationMethod method) {
  if (v < 0.0) throw NumericError("power_from_cp: negative wind speed");
  if (rho <= 0.0) throw NumericError("power_from_cp: density must be > 0");
  if (v < spec.cut_in || v > spec.cut_out) return 0.0;
  const double cp = interpolate_table(spec.cp_curve, v, method);
  return 0.5 * rho * cp * spec.swept_area_m2 * v * v * v / 1000.0;
}

double predict_power(const TurbineSpec& spec, const HubWeather& weather,
                     const ModelVariant& variant) {
  const double v = weather.wind_speed;
  double power = 0.0;
  if (v >= spec.cut_in && v <= spec.cut_out) {
    if (variant.mapping == MappingMode::power_curve) {
      power = interpolate_table(spec.power_curve, v, variant.interpolation);
      if (variant.density != DensityMode::constant) {
        power *= variant_density(weather.air, variant.density) / constants::kStandardDensity;
      }
    } else {
      power = power_from_cp(spec, v, variant_density(weather.air, variant.density),
                            variant.interpolation);
    }
  }
  if (power < 0.0) power = 0.0;
  if (variant.cap) power = std::min(power, spec.rated_power_kw);
  return power;
}

}  // namespace windtwin
