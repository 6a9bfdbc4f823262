// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4-7 share one frozen synthetic dataset and two full
// pipeline runs.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "windtwin/atmosphere.hpp"
#include "windtwin/csv.hpp"
#include "windtwin/ddm.hpp"
#include "windtwin/evaluation.hpp"
#include "windtwin/layout.hpp"
#include "windtwin/pipeline.hpp"
#include "windtwin/power_model.hpp"
#include "windtwin/synth.hpp"
#include "windtwin/terrain.hpp"
#include "windtwin/timeseries.hpp"

using namespace windtwin;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& label, bool ok, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, label.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- criterion 1
void criterion_physics_oracles() {
  bool ok = true;
  std::string detail;
  const double rho_dry = density_dry({288.15, 101325.0, {}});
  if (std::abs(rho_dry - 1.2250) > 0.0005) {
    ok = false;
    detail += "density_dry=" + std::to_string(rho_dry) + " ";
  }
  const double p_sat = saturation_pressure(273.15);
  if (p_sat != 611.0) {
    ok = false;
    detail += "p_sat(273.15K)=" + std::to_string(p_sat) + " ";
  }
  const double rho_humid = density_humid({293.15, 101325.0, 1.0});
  if (std::abs(rho_humid - 1.1936) > 0.001) {
    ok = false;
    detail += "density_humid=" + std::to_string(rho_humid) + " ";
  }
  TurbineSpec spec;
  spec.rated_power_kw = 5000.0;
  spec.swept_area_m2 = 3959.0;
  spec.cut_in = 0.0;
  spec.cut_out = 30.0;
  spec.cp_curve.v = {0.0, 30.0};
  spec.cp_curve.y = {0.4, 0.4};
  spec.power_curve.v = {0.0, 30.0};
  spec.power_curve.y = {0.0, 5000.0};
  const double p = power_from_cp(spec, 10.0, 1.225, InterpolationMethod::linear);
  if (std::abs(p - 969.96) > 0.01) {
    ok = false;
    detail += "power_from_cp=" + std::to_string(p);
  }
  report(1, "physics oracles (density, Tetens, kinetic relation)", ok, detail);
}

// ---------------------------------------------------------------- criterion 2
void criterion_interpolation() {
  std::mt19937_64 rng(20260708);
  std::uniform_int_distribution<int> n_knots(2, 14);
  std::uniform_real_distribution<double> gap(0.2, 2.5);
  std::uniform_real_distribution<double> val(0.0, 2500.0);
  bool ok = true;
  for (int table_i = 0; table_i < 100 && ok; ++table_i) {
    CurveTable t;
    const int n = n_knots(rng);
    double v = gap(rng);
    for (int i = 0; i < n; ++i) {
      t.v.push_back(v);
      t.y.push_back(val(rng));
      v += gap(rng);
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (interpolate_table(t, t.v[i], InterpolationMethod::linear) != t.y[i] ||
          interpolate_table(t, t.v[i], InterpolationMethod::cubic) != t.y[i]) {
        ok = false;
        break;
      }
    }
    // dense sweep: 1e4 points per table, cubic stays within the local range
    const double lo_v = t.v.front();
    const double hi_v = t.v.back();
    for (int i = 0; i <= 10000 && ok; ++i) {
      const double x = lo_v + (hi_v - lo_v) * i / 10000.0;
      std::size_t seg = 0;
      while (seg + 2 < t.size() && t.v[seg + 1] < x) ++seg;
      const double lo = std::min(t.y[seg], t.y[seg + 1]);
      const double hi = std::max(t.y[seg], t.y[seg + 1]);
      const double y = interpolate_table(t, x, InterpolationMethod::cubic);
      if (y < lo - 1e-9 || y > hi + 1e-9) ok = false;
    }
  }
  report(2, "interpolation exact at knots, monotone cubic bounded (100 tables x 1e4)", ok);
}

// ---------------------------------------------------------------- criterion 3
void criterion_gradients() {
  TrainingConfig c;
  c.lag = 4;
  c.layer_units = {5, 3, 1};
  c.lstm_warmup_h = 8;
  double worst_dnn = 0.0, worst_lstm = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    worst_dnn = std::max(worst_dnn, gradient_check(ModelKind::dnn, c, 8, seed));
    worst_lstm = std::max(worst_lstm, gradient_check(ModelKind::lstm, c, 8, seed));
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "max rel err dnn=%.3g lstm=%.3g", worst_dnn, worst_lstm);
  report(3, "analytic gradients vs central differences (10 seeds)",
         worst_dnn < 1e-4 && worst_lstm < 1e-4, detail);
}

// ------------------------------------------------------------- criteria 4..7
struct PipelineRuns {
  fs::path dir_a, dir_b;
  RunConfig config_a, config_b;
  bool ok = false;
};

PipelineRuns run_pipelines_twice(const fs::path& work) {
  PipelineRuns runs;
  runs.dir_a = work / "run_a";
  runs.dir_b = work / "run_b";
  fs::remove_all(runs.dir_a);
  fs::remove_all(runs.dir_b);
  const SynthConfig synth_config;  // frozen defaults
  runs.config_a = pipeline::run_synth(synth_config, runs.dir_a);
  pipeline::run_all(runs.config_a);
  runs.config_b = pipeline::run_synth(synth_config, runs.dir_b);
  pipeline::run_all(runs.config_b);
  runs.ok = true;
  return runs;
}

bool trees_identical(const fs::path& a, const fs::path& b, std::string& mismatch) {
  std::set<fs::path> rel_a, rel_b;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) rel_a.insert(fs::relative(e.path(), a));
  }
  for (const auto& e : fs::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) rel_b.insert(fs::relative(e.path(), b));
  }
  if (rel_a != rel_b) {
    mismatch = "file sets differ";
    return false;
  }
  for (const auto& rel : rel_a) {
    if (read_file_bytes(a / rel) != read_file_bytes(b / rel)) {
      mismatch = rel.string();
      return false;
    }
  }
  return true;
}

void criterion_determinism(const PipelineRuns& runs) {
  std::string mismatch;
  const bool ok = trees_identical(runs.dir_a, runs.dir_b, mismatch);
  report(4, "identical seed + config give byte-identical pipeline outputs", ok, mismatch);
}

// report CSV -> model -> lead -> nrmse
std::map<std::string, std::map<int, double>> read_report(const fs::path& path) {
  std::map<std::string, std::map<int, double>> out;
  CsvReader csv(path);
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    out[row[1]][static_cast<int>(*parse_int(row[0]))] = *parse_double(row[2]);
  }
  return out;
}

void criterion_qualitative(const PipelineRuns& runs) {
  const RunConfig& cfg = runs.config_a;
  const auto reports_dir = cfg.resolve(cfg.reports_dir);
  const auto farm_report = read_report(reports_dir / "report" / "report_FARM.csv");

  const std::string simra_dry = "simra_like_rhodry_curve_cubic_cap";
  const std::string simra_const = "simra_like_rhoconst_curve_cubic_cap";
  const std::string meps_dry = "meps_like_rhodry_curve_cubic_cap";
  const std::string meps_const = "meps_like_rhoconst_curve_cubic_cap";
  const std::string meps_humid = "meps_like_rhohumid_curve_cubic_cap";

  // (a) DNN has the lowest farm NRMSE at lead 1
  {
    bool ok = farm_report.count("dnn") && farm_report.at("dnn").count(1);
    double dnn1 = ok ? farm_report.at("dnn").at(1) : 1e9;
    std::string detail = "dnn@1=" + (ok ? fmt_g6(dnn1) : "missing");
    for (const auto& [model, leads] : farm_report) {
      if (model == "dnn") continue;
      const auto it = leads.find(1);
      if (it != leads.end()) {
        detail += " " + model + "@1=" + fmt_g6(it->second);
        if (it->second <= dnn1) ok = false;
      }
    }
    report(5, "(a) DNN lowest farm NRMSE at lead 1", ok, detail);
  }

  // (b) fine-grid source overtakes the DNN by lead <= 6; DNN error grows
  // monotonically over leads 1..10
  {
    bool overtaken = false;
    int overtake_lead = -1;
    for (int lead = 1; lead <= 6; ++lead) {
      const auto& simra = farm_report.at(simra_dry);
      const auto& dnn = farm_report.at("dnn");
      if (simra.count(lead) && dnn.count(lead) && simra.at(lead) < dnn.at(lead)) {
        overtaken = true;
        overtake_lead = lead;
        break;
      }
    }
    bool monotone = true;
    for (int lead = 2; lead <= 10; ++lead) {
      if (farm_report.at("dnn").at(lead) <= farm_report.at("dnn").at(lead - 1)) monotone = false;
    }
    report(5, "(b) fine source overtakes DNN by lead <= 6; DNN error monotone on 1..10",
           overtaken && monotone,
           overtaken ? ("overtake at lead " + std::to_string(overtake_lead)) : "no overtake");
  }

  // (c) the coarse source model covers and wins every lead > 18
  {
    std::map<int, std::string> schedule;
    CsvReader csv(reports_dir / "schedule.csv");
    std::vector<std::string> row;
    std::size_t lineno = 0;
    while (csv.next(row, lineno)) {
      schedule[static_cast<int>(*parse_int(row[0]))] = row[1];
    }
    bool ok = !schedule.empty();
    std::string offender;
    for (const auto& [lead, model] : schedule) {
      if (lead > 18 && model.rfind("meps_like", 0) != 0) {
        ok = false;
        offender = std::to_string(lead) + "->" + model;
      }
    }
    report(5, "(c) coarse-source model selected for all leads > 18", ok, offender);
  }

  // (d) farm NRMSE below the mean per-turbine NRMSE at every lead
  {
    const FarmLayout layout = load_layout(cfg.resolve(cfg.layout));
    std::vector<std::map<std::string, std::map<int, double>>> turbine_reports;
    for (const auto& t : layout.turbines) {
      turbine_reports.push_back(
          read_report(reports_dir / "report" / ("report_" + t.id + ".csv")));
    }
    bool ok = true;
    std::string offender;
    for (const auto& [model, leads] : farm_report) {
      for (const auto& [lead, farm_score] : leads) {
        double sum = 0.0;
        int n = 0;
        for (const auto& tr : turbine_reports) {
          const auto mit = tr.find(model);
          if (mit == tr.end()) continue;
          const auto lit = mit->second.find(lead);
          if (lit == mit->second.end()) continue;
          sum += lit->second;
          ++n;
        }
        if (n == 0) continue;
        if (farm_score >= sum / n) {
          ok = false;
          offender = model + "@" + std::to_string(lead);
        }
      }
    }
    report(5, "(d) farm NRMSE below mean turbine NRMSE at every lead", ok, offender);
  }

  // (e) dynamic density beats constant density (temperature cycle spans
  // 40 K). Scored on the selection period: the physics variants have no
  // training, and its per-lead samples are several times larger.
  {
    const auto selection = read_report(reports_dir / "selection" / "report_FARM.csv");
    bool ok = true;
    std::string offender;
    auto compare = [&](const std::string& dynamic, const std::string& constant) {
      for (const auto& [lead, score] : selection.at(dynamic)) {
        const double cscore = selection.at(constant).at(lead);
        if (score >= cscore) {
          ok = false;
          offender = dynamic + "@" + std::to_string(lead);
        }
      }
    };
    compare(simra_dry, simra_const);
    compare(meps_dry, meps_const);
    compare(meps_humid, meps_const);
    report(5, "(e) dynamic-density variants beat constant density at every lead", ok, offender);
  }
}

void criterion_hybrid(const PipelineRuns& runs) {
  const RunConfig& cfg = runs.config_a;
  const auto reports_dir = cfg.resolve(cfg.reports_dir);
  const auto selection = read_report(reports_dir / "selection" / "report_FARM.csv");
  const auto hybrid = read_report(reports_dir / "selection" / "report_hybrid.csv");
  bool ok = hybrid.count("hybrid") && !hybrid.at("hybrid").empty();
  std::string offender;
  if (ok) {
    for (const auto& [lead, score] : hybrid.at("hybrid")) {
      double best = 1e300;
      for (const auto& [model, leads] : selection) {
        const auto it = leads.find(lead);
        if (it != leads.end()) best = std::min(best, it->second);
      }
      if (!(score <= best)) {
        ok = false;
        offender = "lead " + std::to_string(lead);
      }
    }
  }
  report(6, "hybrid NRMSE <= component minimum at every selection lead", ok, offender);
}

// Fully independent persistence oracle: raw CSV parsing, own hourly mean,
// own NRMSE.
void criterion_persistence(const PipelineRuns& runs) {
  const RunConfig& cfg = runs.config_a;
  // 1) hourly means per turbine from the raw SCADA file
  std::map<std::string, std::map<Timestamp, std::pair<double, int>>> acc;
  {
    CsvReader csv(cfg.resolve(cfg.scada));
    std::vector<std::string> row;
    std::size_t lineno = 0;
    while (csv.next(row, lineno)) {
      if (row[2] != "active_power") continue;
      const Timestamp t = *parse_iso8601(row[1]);
      const Timestamp hour = hour_floor(t);
      auto& slot = acc[row[0]][hour];
      slot.first += *parse_double(row[3]);
      slot.second += 1;
    }
  }
  std::map<std::string, std::map<Timestamp, double>> hourly;
  for (const auto& [turbine, hours] : acc) {
    for (const auto& [hour, sum_n] : hours) {
      hourly[turbine][hour] = sum_n.first / sum_n.second;
    }
  }
  // 2) persistence predictions from 6-hourly origins, farm = sum
  const int horizon = cfg.lead_max;
  const Timestamp step = static_cast<Timestamp>(cfg.origin_step_h) * kSecondsPerHour;
  // per lead: squared error sum and count, farm-level, report period
  std::map<int, std::pair<double, std::size_t>> farm_sq;
  std::vector<std::string> turbines;
  for (const auto& [turbine, series] : hourly) turbines.push_back(turbine);
  const Timestamp first_hour = hourly.begin()->second.begin()->first;
  const Timestamp last_hour = hourly.begin()->second.rbegin()->first;
  Timestamp first_origin = first_hour;
  if (first_origin % step != 0) first_origin += step - (first_origin % step);
  for (Timestamp origin = first_origin; origin <= last_hour; origin += step) {
    // last measured value per turbine at or before the origin
    std::map<std::string, double> last_value;
    bool all_have = true;
    for (const auto& turbine : turbines) {
      const auto& series = hourly.at(turbine);
      auto it = series.upper_bound(origin);
      if (it == series.begin()) {
        all_have = false;
        break;
      }
      --it;
      last_value[turbine] = it->second;
    }
    if (!all_have) continue;
    for (int lead = 1; lead <= horizon; ++lead) {
      const Timestamp target = origin + static_cast<Timestamp>(lead) * kSecondsPerHour;
      if (!cfg.report_period.contains(target)) continue;
      double farm_pred = 0.0, farm_meas = 0.0;
      bool complete = true;
      for (const auto& turbine : turbines) {
        const auto it = hourly.at(turbine).find(target);
        if (it == hourly.at(turbine).end()) {
          complete = false;
          break;
        }
        farm_pred += last_value.at(turbine);
        farm_meas += it->second;
      }
      if (!complete) continue;
      const double e = farm_pred - farm_meas;
      farm_sq[lead].first += e * e;
      farm_sq[lead].second += 1;
    }
  }
  const TurbineSpec spec = load_turbine_spec(cfg.resolve(cfg.turbine_spec));
  const double norm = spec.rated_power_kw * static_cast<double>(turbines.size());

  // 3) pipeline-side values recomputed at full precision from its own files
  const auto matrices = pipeline::load_predictions(cfg, "persistence");
  const auto power = pipeline::load_store_power(cfg);
  std::vector<PredictionMatrix> ordered;
  std::vector<MeasuredSeries> measured;
  for (const auto& turbine : turbines) {
    PredictionMatrix m = matrices.at(turbine);
    PredictionMatrix clipped;
    clipped.model_id = m.model_id;
    clipped.scope = m.scope;
    for (const auto& [lead, entries] : m.by_lead) {
      for (const auto& [target, v] : entries) {
        if (cfg.report_period.contains(target)) clipped.by_lead[lead][target] = v;
      }
    }
    ordered.push_back(std::move(clipped));
    MeasuredSeries ms;
    for (const auto& [t, v] : power.at(turbine)) {
      if (cfg.report_period.contains(t)) ms[t] = v;
    }
    measured.push_back(std::move(ms));
  }
  const LeadTimeReport pipeline_report =
      evaluate_by_lead(farm_aggregate(ordered), sum_measured(measured), norm);

  bool ok = true;
  double max_diff = 0.0;
  for (const auto& [lead, sq_n] : farm_sq) {
    if (sq_n.second == 0) continue;
    const double oracle = std::sqrt(sq_n.first / static_cast<double>(sq_n.second)) / norm;
    const auto it = pipeline_report.nrmse.find(lead);
    if (it == pipeline_report.nrmse.end()) {
      ok = false;
      continue;
    }
    max_diff = std::max(max_diff, std::abs(oracle - it->second));
  }
  if (max_diff >= 1e-10) ok = false;
  char detail[64];
  std::snprintf(detail, sizeof(detail), "max |diff| = %.3g", max_diff);
  report(7, "brute-force persistence NRMSE matches the pipeline to 1e-10", ok, detail);
}

// ---------------------------------------------------------------- criterion 8
void criterion_terrain() {
  bool ok = true;
  std::string detail;
  // quantization error <= scale/2 over 1e6 random cells
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> height(-400.0, 2000.0);
  HeightGrid g;
  g.width = 1000;
  g.height = 1000;
  g.cell_size = 1.0;
  g.values.resize(1000000);
  for (auto& v : g.values) v = height(rng);
  const double scale = 0.1;
  QuantizedChunkSet set = quantize_int16(g, scale);
  const HeightGrid back = chunk_reassemble(set);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (std::abs(*back.values[i] - *g.values[i]) > scale / 2.0 + 1e-12) {
      ok = false;
      detail = "quantization error above scale/2";
      break;
    }
  }
  // chunk round trip identity
  const std::vector<std::int16_t> before = set.counts;
  chunk_split(set, 64);
  if (reassemble_counts(set) != before) {
    ok = false;
    detail = "chunk round trip broke counts";
  }
  // bathymetry merge leaves onshore cells bit-identical
  HeightGrid coastal;
  coastal.width = 80;
  coastal.height = 60;
  coastal.cell_size = 1.0;
  coastal.values.resize(80 * 60);
  std::uniform_real_distribution<double> onshore(0.0, 300.0);
  for (std::size_t r = 0; r < 60; ++r) {
    for (std::size_t c = 0; c < 80; ++c) {
      if (c >= 40) {
        coastal.values[r * 80 + c] = std::nullopt;
      } else {
        coastal.values[r * 80 + c] = onshore(rng);
      }
    }
  }
  std::vector<DepthContour> contours;
  for (double depth : {-3.0, -15.0, -40.0}) {
    DepthContour c;
    c.depth = depth;
    for (int i = 0; i < 40; ++i) {
      c.vertices.emplace_back(42.0 - depth, 1.5 * i);
    }
    contours.push_back(c);
  }
  const HeightGrid merged = merge_bathymetry(coastal, contours);
  for (std::size_t i = 0; i < coastal.values.size(); ++i) {
    if (coastal.values[i]) {
      if (!merged.values[i] || *merged.values[i] != *coastal.values[i]) {
        ok = false;
        detail = "merge altered an onshore cell";
      }
    } else if (!merged.values[i] || *merged.values[i] > 0.0) {
      ok = false;
      detail = "merge left a hole or positive depth";
    }
  }
  report(8, "terrain round trips (quantization, chunks, bathymetry merge)", ok, detail);
}

}  // namespace

int main() {
  criterion_physics_oracles();
  criterion_interpolation();
  criterion_gradients();

  const fs::path work = fs::current_path() / "acceptance_work";
  fs::create_directories(work);
  PipelineRuns runs;
  try {
    runs = run_pipelines_twice(work);
  } catch (const std::exception& e) {
    report(4, "pipeline runs", false, e.what());
    report(5, "qualitative reproduction", false, "pipeline did not complete");
    report(6, "hybrid optimality", false, "pipeline did not complete");
    report(7, "persistence oracle", false, "pipeline did not complete");
    criterion_terrain();
    return g_failures;
  }
  criterion_determinism(runs);
  try {
    criterion_qualitative(runs);
  } catch (const std::exception& e) {
    report(5, "qualitative reproduction", false, e.what());
  }
  try {
    criterion_hybrid(runs);
  } catch (const std::exception& e) {
    report(6, "hybrid optimality", false, e.what());
  }
  try {
    criterion_persistence(runs);
  } catch (const std::exception& e) {
    report(7, "persistence oracle", false, e.what());
  }
  criterion_terrain();

  std::printf("%s: %d failure(s)\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures);
  return g_failures;
}
