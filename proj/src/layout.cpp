#include "windtwin/layout.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"

namespace windtwin {

using nlohmann::json;

const TurbinePosition* FarmLayout::find(const std::string& id) const {
  for (const auto& t : turbines) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

FarmLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("layout " + path.string() + ": " + e.what());
  }
  FarmLayout out;
  try {
    out.farm_id = j.at("farm_id").get<std::string>();
    out.origin_x = j.at("origin").at("x").get<double>();
    out.origin_y = j.at("origin").at("y").get<double>();
    for (const auto& t : j.at("turbines")) {
      TurbinePosition p;
      p.id = t.at("id").get<std::string>();
      p.x = t.at("x").get<double>();
      p.y = t.at("y").get<double>();
      p.hub_height = t.at("hub_height").get<double>();
      p.elevation = t.at("elevation").get<double>();
      out.turbines.push_back(p);
    }
  } catch (const json::exception& e) {
    throw FormatError("layout " + path.string() + ": " + e.what());
  }
  std::set<std::string> ids;
  for (const auto& t : out.turbines) {
    if (!ids.insert(t.id).second) {
      throw ValidationError("layout " + path.string() + ": duplicate turbine id " + t.id);
    }
    if (t.hub_height <= 0.0) {
      throw ValidationError("layout " + path.string() + ": hub height must be > 0 for " + t.id);
    }
  }
  return out;
}

void save_layout(const FarmLayout& layout, const std::filesystem::path& path) {
  json j;
  j["farm_id"] = layout.farm_id;
  j["origin"] = {{"x", layout.origin_x}, {"y", layout.origin_y}};
  j["turbines"] = json::array();
  for (const auto& t : layout.turbines) {
    j["turbines"].push_back({{"id", t.id},
                             {"x", t.x},
                             {"y", t.y},
                             {"hub_height", t.hub_height},
                             {"elevation", t.elevation}});
  }
  auto out = open_output(path);
  out << j.dump(2) << "\n";
}

}  // namespace windtwin
