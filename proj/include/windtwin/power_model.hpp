#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "windtwin/weather.hpp"

namespace windtwin {

// Tabulated curve over wind speed with strictly increasing knots.
struct CurveTable {
  std::vector<double> v;  // m/s
  std::vector<double> y;

  std::size_t size() const { return v.size(); }
};

struct TurbineSpec {
  double rated_power_kw = 0.0;
  double swept_area_m2 = 0.0;  // A in P = 1/2 rho Cp A v^3
  double cut_in = 0.0;         // m/s
  double cut_out = 0.0;        // m/s
  CurveTable power_curve;      // v -> P [kW], referenced to standard density
  CurveTable cp_curve;         // v -> C_P (dimensionless, < 0.593)
};

// Throws ValidationError on Betz violations, non-increasing knots, or power
// values outside [0, rated].
void validate_spec(const TurbineSpec& spec);

TurbineSpec load_turbine_spec(const std::filesystem::path& path);
void save_turbine_spec(const TurbineSpec& spec, const std::filesystem::path& path);

enum class DensityMode { constant, dry, humid };
enum class MappingMode { power_curve, power_coefficient };
enum class InterpolationMethod { linear, cubic };

struct ModelVariant {
  std::string source;  // forecast source name, informational
  DensityMode density = DensityMode::constant;
  MappingMode mapping = MappingMode::power_curve;
  InterpolationMethod interpolation = InterpolationMethod::linear;
  bool cap = true;  // clamp to rated power

  std::string id() const;
};

// Exact at knots. Linear: piecewise linear. Cubic: monotone piecewise-cubic
// Hermite (Fritsch-Carlson limited slopes), so values stay within the local
// knot range. Outside the knot span the boundary value is held.
double interpolate_table(const CurveTable& table, double v, InterpolationMethod method);

// 1/2 rho Cp(v) A v^3 in kW; zero below cut-in and above cut-out.
double power_from_cp(const TurbineSpec& spec, double v, double rho, InterpolationMethod method);

// Physics-based power for one variant. Power-curve mapping scales the
// tabulated curve by rho/rho_s when density is not constant; coefficient
// mapping feeds the chosen density straight into the kinetic relation.
double predict_power(const TurbineSpec& spec, const HubWeather& weather,
                     const ModelVariant& variant);

// Density selected by the variant (rho_s, dry, or humid).
double variant_density(const AtmosphericState& air, DensityMode mode);

}  // namespace windtwin
