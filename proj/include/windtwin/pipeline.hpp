#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "windtwin/ddm.hpp"
#include "windtwin/evaluation.hpp"
#include "windtwin/nwp.hpp"
#include "windtwin/power_model.hpp"
#include "windtwin/synth.hpp"

namespace windtwin {

struct ForecastInput {
  std::string name;  // source id, referenced by variant.source
  std::string file;  // relative to the config directory
  ForecastSource source;
  SamplingStrategy strategy = SamplingStrategy::nearest;
};

struct PeriodRange {
  Timestamp begin = 0;
  Timestamp end = 0;  // half-open [begin, end)

  bool contains(Timestamp t) const { return t >= begin && t < end; }
};

// One batch run, loaded from / saved to JSON. Paths are kept as written and
// resolved against the config directory.
struct RunConfig {
  std::filesystem::path root;  // directory the config was loaded from
  std::uint64_t seed = 0;

  std::string scada = "scada.csv";
  std::string layout = "layout.json";
  std::string turbine_spec = "turbine_spec.json";
  std::string store_dir = "store";
  std::string models_dir = "models";
  std::string predictions_dir = "predictions";
  std::string reports_dir = "reports";

  std::vector<ForecastInput> forecasts;
  PeriodRange selection_period;  // hybrid selection / training span
  PeriodRange report_period;     // held-out reporting span

  std::vector<ModelVariant> variants;
  std::vector<ModelKind> ddm_kinds{ModelKind::persistence, ModelKind::dnn, ModelKind::lstm};
  TrainingConfig training;
  int origin_step_h = 6;  // DDM forecast origin cadence

  int lead_min = 1;
  int lead_max = 61;
  std::vector<std::string> priority;  // hybrid tie-break order

  std::optional<SynthConfig> synth;

  std::filesystem::path resolve(const std::string& p) const;
  std::vector<std::string> model_ids() const;  // DDM kinds then variants
};

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

// FNV-1a over the canonical JSON dump; stable across load/save round trips.
std::string config_hash(const RunConfig& config);

// Comment lines embedded in every output file: config hash and seed.
std::vector<std::string> provenance(const RunConfig& config);

namespace pipeline {

// Generates the dataset under out_dir and writes a ready-to-run
// runconfig.json next to it. Returns the loaded config.
RunConfig run_synth(const SynthConfig& synth_config, const std::filesystem::path& out_dir);

void run_ingest(const RunConfig& config);
void run_train(const RunConfig& config);
void run_predict(const RunConfig& config);
void run_evaluate(const RunConfig& config);
void run_hybrid(const RunConfig& config);

// ingest + train + predict + evaluate + hybrid.
void run_all(const RunConfig& config);

// Hourly measured power per turbine from the ingest store, missing hours
// absent. Turbine order follows the layout.
std::map<std::string, MeasuredSeries> load_store_power(const RunConfig& config);

// Equidistant hourly series (missing placeholders included) for one turbine.
TimeSeries store_power_series(const MeasuredSeries& measured);

// Prediction matrices per turbine for one model id, as written by
// run_predict.
std::map<std::string, PredictionMatrix> load_predictions(const RunConfig& config,
                                                         const std::string& model_id);

}  // namespace pipeline

}  // namespace windtwin
