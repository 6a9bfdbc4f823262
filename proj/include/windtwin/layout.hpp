#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace windtwin {

// Positions are local planar coordinates in meters relative to the declared
// farm origin. Timestamps of SCADA averages are interval-start.
struct TurbinePosition {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double hub_height = 0.0;  // m above terrain
  double elevation = 0.0;   // terrain height at the base, m
};

struct FarmLayout {
  std::string farm_id;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<TurbinePosition> turbines;

  const TurbinePosition* find(const std::string& id) const;
};

FarmLayout load_layout(const std::filesystem::path& path);
void save_layout(const FarmLayout& layout, const std::filesystem::path& path);

}  // namespace windtwin
