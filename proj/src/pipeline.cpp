#include "windtwin/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "windtwin/csv.hpp"
#include "windtwin/errors.hpp"
#include "windtwin/layout.hpp"

namespace windtwin {

using nlohmann::json;

namespace {

std::string density_name(DensityMode m) {
  switch (m) {
    case DensityMode::constant: return "constant";
    case DensityMode::dry: return "dry";
    case DensityMode::humid: return "humid";
  }
  return "?";
}

DensityMode density_from(const std::string& s) {
  if (s == "constant") return DensityMode::constant;
  if (s == "dry") return DensityMode::dry;
  if (s == "humid") return DensityMode::humid;
  throw ConfigError("unknown density mode '" + s + "'");
}

std::string mapping_name(MappingMode m) {
  return m == MappingMode::power_curve ? "power_curve" : "power_coefficient";
}

MappingMode mapping_from(const std::string& s) {
  if (s == "power_curve") return MappingMode::power_curve;
  if (s == "power_coefficient") return MappingMode::power_coefficient;
  throw ConfigError("unknown mapping mode '" + s + "'");
}

std::string interp_name(InterpolationMethod m) {
  return m == InterpolationMethod::linear ? "linear" : "cubic";
}

InterpolationMethod interp_from(const std::string& s) {
  if (s == "linear") return InterpolationMethod::linear;
  if (s == "cubic") return InterpolationMethod::cubic;
  throw ConfigError("unknown interpolation method '" + s + "'");
}

std::string strategy_name(SamplingStrategy s) {
  return s == SamplingStrategy::nearest ? "nearest" : "idw4";
}

SamplingStrategy strategy_from(const std::string& s) {
  if (s == "nearest") return SamplingStrategy::nearest;
  if (s == "idw4") return SamplingStrategy::idw4;
  throw ConfigError("unknown sampling strategy '" + s + "'");
}

ModelKind kind_from(const std::string& s) {
  if (s == "persistence") return ModelKind::persistence;
  if (s == "dnn") return ModelKind::dnn;
  if (s == "lstm") return ModelKind::lstm;
  throw ConfigError("unknown model kind '" + s + "'");
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& label) {
  std::uint64_t x = seed ^ fnv1a(label);
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

json run_config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["paths"] = {{"scada", c.scada},
                {"layout", c.layout},
                {"turbine_spec", c.turbine_spec},
                {"store", c.store_dir},
                {"models", c.models_dir},
                {"predictions", c.predictions_dir},
                {"reports", c.reports_dir}};
  j["forecasts"] = json::array();
  for (const auto& f : c.forecasts) {
    j["forecasts"].push_back({{"name", f.name},
                              {"file", f.file},
                              {"issuance_period_h", f.source.issuance_period_h},
                              {"lead_min_h", f.source.lead_min_h},
                              {"lead_max_h", f.source.lead_max_h},
                              {"step_h", f.source.step_h},
                              {"horizontal_resolution_m", f.source.horizontal_resolution_m},
                              {"has_humidity", f.source.has_humidity},
                              {"strategy", strategy_name(f.strategy)}});
  }
  j["periods"] = {
      {"selection",
       {format_iso8601(c.selection_period.begin), format_iso8601(c.selection_period.end)}},
      {"report", {format_iso8601(c.report_period.begin), format_iso8601(c.report_period.end)}}};
  j["variants"] = json::array();
  for (const auto& v : c.variants) {
    j["variants"].push_back({{"source", v.source},
                             {"density", density_name(v.density)},
                             {"mapping", mapping_name(v.mapping)},
                             {"interpolation", interp_name(v.interpolation)},
                             {"cap", v.cap}});
  }
  json kinds = json::array();
  for (auto k : c.ddm_kinds) kinds.push_back(model_kind_name(k));
  j["ddm"] = {{"kinds", kinds},
              {"origin_step_h", c.origin_step_h},
              {"training", training_config_to_json(c.training)}};
  j["evaluation"] = {
      {"lead_min", c.lead_min}, {"lead_max", c.lead_max}, {"priority", c.priority}};
  if (c.synth) j["synth"] = synth_config_to_json(*c.synth);
  return j;
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& root) {
  RunConfig c;
  c.root = root;
  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    const auto& p = j.at("paths");
    c.scada = p.at("scada").get<std::string>();
    c.layout = p.at("layout").get<std::string>();
    c.turbine_spec = p.at("turbine_spec").get<std::string>();
    c.store_dir = p.at("store").get<std::string>();
    c.models_dir = p.at("models").get<std::string>();
    c.predictions_dir = p.at("predictions").get<std::string>();
    c.reports_dir = p.at("reports").get<std::string>();
    c.forecasts.clear();
    for (const auto& f : j.at("forecasts")) {
      ForecastInput fi;
      fi.name = f.at("name").get<std::string>();
      fi.file = f.at("file").get<std::string>();
      fi.source.name = fi.name;
      fi.source.issuance_period_h = f.at("issuance_period_h").get<int>();
      fi.source.lead_min_h = f.at("lead_min_h").get<int>();
      fi.source.lead_max_h = f.at("lead_max_h").get<int>();
      fi.source.step_h = f.at("step_h").get<int>();
      fi.source.horizontal_resolution_m = f.at("horizontal_resolution_m").get<double>();
      fi.source.has_humidity = f.at("has_humidity").get<bool>();
      fi.strategy = strategy_from(f.at("strategy").get<std::string>());
      c.forecasts.push_back(fi);
    }
    const auto& periods = j.at("periods");
    c.selection_period.begin =
        parse_iso8601_or_throw(periods.at("selection").at(0).get<std::string>(), "config");
    c.selection_period.end =
        parse_iso8601_or_throw(periods.at("selection").at(1).get<std::string>(), "config");
    c.report_period.begin =
        parse_iso8601_or_throw(periods.at("report").at(0).get<std::string>(), "config");
    c.report_period.end =
        parse_iso8601_or_throw(periods.at("report").at(1).get<std::string>(), "config");
    c.variants.clear();
    for (const auto& v : j.at("variants")) {
      ModelVariant mv;
      mv.source = v.at("source").get<std::string>();
      mv.density = density_from(v.at("density").get<std::string>());
      mv.mapping = mapping_from(v.at("mapping").get<std::string>());
      mv.interpolation = interp_from(v.at("interpolation").get<std::string>());
      mv.cap = v.at("cap").get<bool>();
      c.variants.push_back(mv);
    }
    const auto& ddm = j.at("ddm");
    c.ddm_kinds.clear();
    for (const auto& k : ddm.at("kinds")) c.ddm_kinds.push_back(kind_from(k.get<std::string>()));
    c.origin_step_h = ddm.at("origin_step_h").get<int>();
    c.training = training_config_from_json(ddm.at("training"));
    const auto& ev = j.at("evaluation");
    c.lead_min = ev.at("lead_min").get<int>();
    c.lead_max = ev.at("lead_max").get<int>();
    c.priority = ev.at("priority").get<std::vector<std::string>>();
    if (j.contains("synth")) c.synth = synth_config_from_json(j.at("synth"));
  } catch (const json::exception& e) {
    throw ConfigError("run config: " + std::string(e.what()));
  }
  return c;
}

void validate_run_config(const RunConfig& c) {
  if (c.selection_period.begin >= c.selection_period.end) {
    throw ConfigError("run config: empty selection period");
  }
  if (c.report_period.begin >= c.report_period.end) {
    throw ConfigError("run config: empty report period");
  }
  if (c.selection_period.end > c.report_period.begin &&
      c.report_period.end > c.selection_period.begin) {
    throw ConfigError("run config: selection and report periods overlap");
  }
  if (c.lead_min < 1 || c.lead_max < c.lead_min) {
    throw ConfigError("run config: bad lead range");
  }
  if (c.origin_step_h < 1) throw ConfigError("run config: origin_step_h must be >= 1");
  std::set<std::string> source_names;
  for (const auto& f : c.forecasts) source_names.insert(f.name);
  for (const auto& v : c.variants) {
    if (!source_names.count(v.source)) {
      throw ConfigError("run config: variant source '" + v.source + "' has no forecast input");
    }
  }
}

}  // namespace

std::filesystem::path RunConfig::resolve(const std::string& p) const {
  const std::filesystem::path fp(p);
  return fp.is_absolute() ? fp : root / fp;
}

std::vector<std::string> RunConfig::model_ids() const {
  std::vector<std::string> ids;
  for (auto k : ddm_kinds) ids.push_back(model_kind_name(k));
  for (const auto& v : variants) ids.push_back(v.id());
  return ids;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j, std::filesystem::absolute(path).parent_path());
  validate_run_config(c);
  return c;
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << run_config_to_json(config).dump(2) << "\n";
}

std::string config_hash(const RunConfig& config) {
  const std::string dump = run_config_to_json(config).dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(dump)));
  return buf;
}

std::vector<std::string> provenance(const RunConfig& config) {
  return {"config_hash=" + config_hash(config), "seed=" + std::to_string(config.seed)};
}

namespace pipeline {

RunConfig run_synth(const SynthConfig& synth_config, const std::filesystem::path& out_dir) {
  RunConfig c;
  c.root = std::filesystem::absolute(out_dir);
  c.seed = synth_config.seed;
  c.synth = synth_config;
  c.training.seed = synth_config.seed;

  // up to a full training year, keeping at least a quarter (capped at 120
  // days) held out for reporting
  const int report_days = std::clamp(synth_config.duration_days / 4, 1, 120);
  const int train_days = std::min(365, synth_config.duration_days - report_days);
  const Timestamp split = synth_config.start + static_cast<Timestamp>(train_days) * kSecondsPerDay;
  c.selection_period = {synth_config.start, split};
  c.report_period = {split, synth_config.start +
                                static_cast<Timestamp>(synth_config.duration_days) * kSecondsPerDay};

  ForecastInput meps;
  meps.name = "meps_like";
  meps.file = "forecast_meps_like.csv";
  meps.source = ForecastSource::meps("meps_like");
  meps.source.horizontal_resolution_m = 5000.0;
  meps.strategy = SamplingStrategy::idw4;
  ForecastInput simra;
  simra.name = "simra_like";
  simra.file = "forecast_simra_like.csv";
  simra.source = ForecastSource::simra("simra_like");
  simra.strategy = SamplingStrategy::nearest;
  c.forecasts = {meps, simra};

  auto add_variant = [&c](const std::string& source, DensityMode d, MappingMode m,
                          InterpolationMethod i, bool cap) {
    ModelVariant v;
    v.source = source;
    v.density = d;
    v.mapping = m;
    v.interpolation = i;
    v.cap = cap;
    c.variants.push_back(v);
  };
  add_variant("simra_like", DensityMode::constant, MappingMode::power_curve,
              InterpolationMethod::cubic, true);
  add_variant("simra_like", DensityMode::dry, MappingMode::power_curve,
              InterpolationMethod::cubic, true);
  add_variant("meps_like", DensityMode::constant, MappingMode::power_curve,
              InterpolationMethod::cubic, true);
  add_variant("meps_like", DensityMode::dry, MappingMode::power_curve,
              InterpolationMethod::cubic, true);
  add_variant("meps_like", DensityMode::humid, MappingMode::power_curve,
              InterpolationMethod::cubic, true);
  add_variant("meps_like", DensityMode::dry, MappingMode::power_coefficient,
              InterpolationMethod::cubic, true);

  c.priority = c.model_ids();
  validate_run_config(c);

  generate(synth_config, out_dir, provenance(c));
  save_run_config(c, out_dir / "runconfig.json");
  // sidecar provenance for the JSON outputs that carry no comment lines
  json sidecar;
  sidecar["config_hash"] = config_hash(c);
  sidecar["seed"] = c.seed;
  sidecar["files"] = {"layout.json", "turbine_spec.json"};
  auto prov = open_output(out_dir / "provenance.json");
  prov << sidecar.dump(2) << "\n";
  return load_run_config(out_dir / "runconfig.json");
}

void run_ingest(const RunConfig& config) {
  const ScadaData data = load_scada(config.resolve(config.scada));
  const FarmLayout layout = load_layout(config.resolve(config.layout));
  for (const auto& [id, channels] : data.turbines) {
    if (!layout.find(id)) {
      throw ValidationError("ingest: scada turbine " + id + " is not in the farm layout");
    }
    (void)channels;
  }
  const auto store = config.resolve(config.store_dir);
  auto out = open_output(store / "hourly.csv");
  for (const auto& line : provenance(config)) out << "# " << line << "\n";
  out << "turbine,channel,time,value\n";
  std::size_t hourly_rows = 0;
  for (const auto& [id, channels] : data.turbines) {
    for (const auto& [channel, series] : channels) {
      const TimeSeries hourly = resample_hourly(series, ResamplePolicy::mean);
      for (const auto& s : hourly.samples) {
        if (!s.value) continue;
        out << id << ',' << channel_name(channel) << ',' << format_iso8601(s.timestamp) << ','
            << fmt_double(*s.value) << "\n";
        ++hourly_rows;
      }
    }
  }
  json summary;
  summary["config_hash"] = config_hash(config);
  summary["seed"] = config.seed;
  summary["scada_rows"] = data.summary.rows;
  summary["missing_values"] = data.summary.missing_count;
  summary["series_count"] = data.summary.series_count;
  summary["hourly_rows"] = hourly_rows;
  auto sum_out = open_output(store / "ingest_summary.json");
  sum_out << summary.dump(2) << "\n";
}

std::map<std::string, MeasuredSeries> load_store_power(const RunConfig& config) {
  const auto path = config.resolve(config.store_dir) / "hourly.csv";
  CsvReader csv(path);
  const std::vector<std::string> expected = {"turbine", "channel", "time", "value"};
  if (csv.header() != expected) {
    throw FormatError("store " + path.string() + ": unexpected header");
  }
  std::map<std::string, MeasuredSeries> out;
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    if (row.size() != 4) {
      throw FormatError("store " + path.string() + " row " + std::to_string(lineno) +
                        ": expected 4 fields");
    }
    if (row[1] != "active_power") continue;
    const Timestamp t = parse_iso8601_or_throw(row[2], "store row " + std::to_string(lineno));
    const auto v = parse_double(row[3]);
    if (!v) {
      throw FormatError("store " + path.string() + " row " + std::to_string(lineno) +
                        ": bad value");
    }
    out[row[0]][t] = *v;
  }
  return out;
}

TimeSeries store_power_series(const MeasuredSeries& measured) {
  TimeSeries series;
  series.channel = Channel::active_power;
  if (measured.empty()) return series;
  const Timestamp first = measured.begin()->first;
  const Timestamp last = measured.rbegin()->first;
  for (Timestamp t = first; t <= last; t += kSecondsPerHour) {
    Sample s;
    s.timestamp = t;
    const auto it = measured.find(t);
    if (it != measured.end()) s.value = it->second;
    series.samples.push_back(s);
  }
  return series;
}

namespace {

MeasuredSeries clip_period(const MeasuredSeries& m, const PeriodRange& p) {
  MeasuredSeries out;
  for (const auto& [t, v] : m) {
    if (p.contains(t)) out[t] = v;
  }
  return out;
}

PredictionMatrix clip_period(const PredictionMatrix& m, const PeriodRange& p) {
  PredictionMatrix out;
  out.model_id = m.model_id;
  out.scope = m.scope;
  for (const auto& [lead, entries] : m.by_lead) {
    for (const auto& [target, v] : entries) {
      if (p.contains(target)) out.by_lead[lead][target] = v;
    }
  }
  return out;
}

}  // namespace

void run_train(const RunConfig& config) {
  const FarmLayout layout = load_layout(config.resolve(config.layout));
  const TurbineSpec spec = load_turbine_spec(config.resolve(config.turbine_spec));
  const auto power = load_store_power(config);
  const auto models_dir = config.resolve(config.models_dir);
  const auto comments = provenance(config);

  json sidecar;
  sidecar["config_hash"] = config_hash(config);
  sidecar["seed"] = config.seed;
  sidecar["files"] = json::array();
  for (const auto& turbine : layout.turbines) {
    const auto it = power.find(turbine.id);
    if (it == power.end()) {
      throw ValidationError("train: no measured power for turbine " + turbine.id);
    }
    const TimeSeries series = store_power_series(clip_period(it->second, config.selection_period));
    for (ModelKind kind : config.ddm_kinds) {
      if (kind == ModelKind::persistence) continue;
      TrainingConfig tc = config.training;
      tc.seed = mix_seed(config.seed, "train/" + model_kind_name(kind) + "/" + turbine.id);
      const int lag = (kind == ModelKind::lstm) ? tc.lstm_warmup_h : tc.lag;
      const SupervisedDataset dataset =
          make_supervised(series, lag, tc.validation_fraction);
      const TrainResult result = train(dataset, kind, tc, spec.rated_power_kw);
      const std::string stem = model_kind_name(kind) + "_" + turbine.id;
      save_model(result.model, models_dir / (stem + ".json"));
      sidecar["files"].push_back(stem + ".json");
      auto log = open_output(models_dir / (stem + "_log.csv"));
      for (const auto& line : comments) log << "# " << line << "\n";
      log << "epoch,train_loss,val_loss\n";
      for (const auto& e : result.log) {
        log << e.epoch << ',' << fmt_double(e.train_loss) << ',' << fmt_double(e.val_loss)
            << "\n";
      }
    }
  }
  auto prov = open_output(models_dir / "provenance.json");
  prov << sidecar.dump(2) << "\n";
}

namespace {

std::vector<Timestamp> forecast_origins(const TimeSeries& series, int window, int step_h) {
  std::vector<Timestamp> out;
  if (series.empty()) return out;
  const Timestamp step = static_cast<Timestamp>(step_h) * kSecondsPerHour;
  Timestamp first = series.samples.front().timestamp +
                    static_cast<Timestamp>(window - 1) * kSecondsPerHour;
  if (first % step != 0) first += step - (first % step);
  const Timestamp last = series.samples.back().timestamp;
  for (Timestamp t = first; t <= last; t += step) out.push_back(t);
  return out;
}

// History window (normalized hours) ending at origin inclusive; nullopt when
// any hour is missing.
std::optional<std::vector<double>> window_ending_at(const TimeSeries& series, Timestamp origin,
                                                    int window) {
  const Timestamp first = series.samples.front().timestamp;
  const auto end_idx = (origin - first) / kSecondsPerHour;
  const auto start_idx = end_idx - (window - 1);
  if (start_idx < 0 || end_idx >= static_cast<Timestamp>(series.samples.size())) {
    return std::nullopt;
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(window));
  for (Timestamp i = start_idx; i <= end_idx; ++i) {
    const auto& s = series.samples[static_cast<std::size_t>(i)];
    if (!s.value) return std::nullopt;
    out.push_back(*s.value);
  }
  return out;
}

}  // namespace

void run_predict(const RunConfig& config) {
  const FarmLayout layout = load_layout(config.resolve(config.layout));
  const TurbineSpec spec = load_turbine_spec(config.resolve(config.turbine_spec));
  const auto power = load_store_power(config);
  const auto predictions_dir = config.resolve(config.predictions_dir);
  const auto comments = provenance(config);
  const int horizon = config.lead_max;

  auto open_matrix_csv = [&](const std::string& model_id) {
    auto out = open_output(predictions_dir / (model_id + ".csv"));
    for (const auto& line : comments) out << "# " << line << "\n";
    out << "turbine,target,lead,power_kw\n";
    return out;
  };

  // Data-driven forecasters from every aligned origin.
  for (ModelKind kind : config.ddm_kinds) {
    auto out = open_matrix_csv(model_kind_name(kind));
    for (const auto& turbine : layout.turbines) {
      const auto it = power.find(turbine.id);
      if (it == power.end()) {
        throw ValidationError("predict: no measured power for turbine " + turbine.id);
      }
      const TimeSeries series = store_power_series(it->second);
      ForecastModel model;
      if (kind != ModelKind::persistence) {
        model = load_model(config.resolve(config.models_dir) /
                           (model_kind_name(kind) + "_" + turbine.id + ".json"));
      }
      const int window = (kind == ModelKind::persistence) ? 1 : model.input_window;
      for (Timestamp origin : forecast_origins(series, window, config.origin_step_h)) {
        std::vector<double> forecast;
        if (kind == ModelKind::persistence) {
          const auto lastv = value_at(series, origin, QueryMode::realtime);
          if (!lastv) continue;
          forecast.assign(static_cast<std::size_t>(horizon), *lastv);
        } else {
          const auto window_values = window_ending_at(series, origin, window);
          if (!window_values) continue;
          forecast = rollout(model, *window_values, horizon);
        }
        for (int lead = 1; lead <= horizon; ++lead) {
          const Timestamp target = origin + static_cast<Timestamp>(lead) * kSecondsPerHour;
          out << turbine.id << ',' << format_iso8601(target) << ',' << lead << ','
              << fmt_double(forecast[static_cast<std::size_t>(lead - 1)]) << "\n";
        }
      }
    }
  }

  // Physics-based variants, one sampling pass per (source, turbine).
  for (const auto& input : config.forecasts) {
    std::vector<const ModelVariant*> variants;
    for (const auto& v : config.variants) {
      if (v.source == input.name) variants.push_back(&v);
    }
    if (variants.empty()) continue;
    for (const auto* v : variants) {
      if (v->density == DensityMode::humid && !input.source.has_humidity) {
        throw ConfigError("predict: variant " + v->id() + " needs humidity but source " +
                          input.name + " does not provide it");
      }
    }
    const ForecastSet fcst = load_forecast(config.resolve(input.file), input.source);
    std::vector<HubWeatherSeries> sampled;
    for (const auto& turbine : layout.turbines) {
      sampled.push_back(sample_at_hub(fcst, turbine, input.strategy));
    }
    for (const auto* v : variants) {
      auto out = open_matrix_csv(v->id());
      for (std::size_t i = 0; i < layout.turbines.size(); ++i) {
        for (const auto& e : sampled[i].entries) {
          const Timestamp target =
              e.issuance + static_cast<Timestamp>(e.lead_h) * kSecondsPerHour;
          out << layout.turbines[i].id << ',' << format_iso8601(target) << ',' << e.lead_h
              << ',' << fmt_double(predict_power(spec, e.weather, *v)) << "\n";
        }
      }
    }
  }
}

std::map<std::string, PredictionMatrix> load_predictions(const RunConfig& config,
                                                         const std::string& model_id) {
  const auto path = config.resolve(config.predictions_dir) / (model_id + ".csv");
  CsvReader csv(path);
  const std::vector<std::string> expected = {"turbine", "target", "lead", "power_kw"};
  if (csv.header() != expected) {
    throw FormatError("predictions " + path.string() + ": unexpected header");
  }
  std::map<std::string, PredictionMatrix> out;
  std::vector<std::string> row;
  std::size_t lineno = 0;
  while (csv.next(row, lineno)) {
    const std::string where = "predictions " + path.string() + " row " + std::to_string(lineno);
    if (row.size() != 4) throw FormatError(where + ": expected 4 fields");
    const Timestamp target = parse_iso8601_or_throw(row[1], where);
    const auto lead = parse_int(row[2]);
    const auto value = parse_double(row[3]);
    if (!lead || !value) throw FormatError(where + ": unparseable row");
    PredictionMatrix& m = out[row[0]];
    m.model_id = model_id;
    m.scope = row[0];
    m.by_lead[static_cast<int>(*lead)][target] = *value;
  }
  return out;
}

namespace {

struct PeriodReports {
  std::vector<LeadTimeReport> farm;                       // per model
  std::map<std::string, std::vector<LeadTimeReport>> turbine;  // turbine -> per model
};

}  // namespace

void run_evaluate(const RunConfig& config) {
  const FarmLayout layout = load_layout(config.resolve(config.layout));
  const TurbineSpec spec = load_turbine_spec(config.resolve(config.turbine_spec));
  const auto power = load_store_power(config);
  const auto reports_dir = config.resolve(config.reports_dir);
  const auto comments = provenance(config);

  const double turbine_norm = spec.rated_power_kw;
  const double farm_norm = spec.rated_power_kw * static_cast<double>(layout.turbines.size());

  const std::vector<std::pair<std::string, PeriodRange>> periods = {
      {"selection", config.selection_period}, {"report", config.report_period}};

  std::map<std::string, PeriodReports> by_period;
  for (const std::string& model_id : config.model_ids()) {
    const auto matrices = load_predictions(config, model_id);
    std::vector<const PredictionMatrix*> ordered;
    std::vector<MeasuredSeries> measured_ordered;
    for (const auto& turbine : layout.turbines) {
      const auto mit = matrices.find(turbine.id);
      const auto pit = power.find(turbine.id);
      if (mit == matrices.end() || pit == power.end()) {
        throw ValidationError("evaluate: model " + model_id + " lacks predictions for " +
                              turbine.id);
      }
      ordered.push_back(&mit->second);
      measured_ordered.push_back(pit->second);
    }
    for (const auto& [label, range] : periods) {
      PeriodReports& slot = by_period[label];
      std::vector<PredictionMatrix> clipped;
      std::vector<MeasuredSeries> measured_clipped;
      for (std::size_t i = 0; i < ordered.size(); ++i) {
        clipped.push_back(clip_period(*ordered[i], range));
        measured_clipped.push_back(clip_period(measured_ordered[i], range));
      }
      std::vector<LeadTimeReport> turbine_reports;
      for (std::size_t i = 0; i < clipped.size(); ++i) {
        LeadTimeReport r = evaluate_by_lead(clipped[i], measured_clipped[i], turbine_norm);
        slot.turbine[layout.turbines[i].id].push_back(r);
        turbine_reports.push_back(std::move(r));
      }
      const PredictionMatrix farm = farm_aggregate(clipped);
      const MeasuredSeries farm_measured = sum_measured(measured_clipped);
      slot.farm.push_back(evaluate_by_lead(farm, farm_measured, farm_norm));

      write_spread_csv(reports_dir / label / ("spread_" + model_id + ".csv"),
                       turbine_spread(turbine_reports), comments);
    }
  }
  for (const auto& [label, slot] : by_period) {
    write_report_csv(reports_dir / label / "report_FARM.csv", slot.farm, comments);
    for (const auto& [turbine_id, reports] : slot.turbine) {
      write_report_csv(reports_dir / label / ("report_" + turbine_id + ".csv"), reports,
                       comments);
    }
  }
}

void run_hybrid(const RunConfig& config) {
  const FarmLayout layout = load_layout(config.resolve(config.layout));
  const TurbineSpec spec = load_turbine_spec(config.resolve(config.turbine_spec));
  const auto power = load_store_power(config);
  const auto reports_dir = config.resolve(config.reports_dir);
  const auto comments = provenance(config);
  const double farm_norm = spec.rated_power_kw * static_cast<double>(layout.turbines.size());

  std::vector<MeasuredSeries> measured_ordered;
  for (const auto& turbine : layout.turbines) {
    const auto pit = power.find(turbine.id);
    if (pit == power.end()) {
      throw ValidationError("hybrid: no measured power for turbine " + turbine.id);
    }
    measured_ordered.push_back(pit->second);
  }
  const MeasuredSeries farm_measured = sum_measured(measured_ordered);

  std::map<std::string, PredictionMatrix> farm_by_model;
  std::vector<LeadTimeReport> selection_reports;
  for (const std::string& model_id : config.model_ids()) {
    const auto matrices = load_predictions(config, model_id);
    std::vector<PredictionMatrix> ordered;
    for (const auto& turbine : layout.turbines) {
      const auto mit = matrices.find(turbine.id);
      if (mit == matrices.end()) {
        throw ValidationError("hybrid: model " + model_id + " lacks predictions for " +
                              turbine.id);
      }
      ordered.push_back(mit->second);
    }
    PredictionMatrix farm = farm_aggregate(ordered);
    selection_reports.push_back(
        evaluate_by_lead(clip_period(farm, config.selection_period),
                         clip_period(farm_measured, config.selection_period), farm_norm));
    farm_by_model[model_id] = std::move(farm);
  }

  const HybridSchedule schedule = select_hybrid(selection_reports, config.priority,
                                                config.lead_min, config.lead_max, "selection");
  write_schedule_csv(reports_dir / "schedule.csv", schedule, comments);

  // Stitch the scheduled model's farm predictions per lead.
  PredictionMatrix hybrid;
  hybrid.model_id = "hybrid";
  hybrid.scope = kFarmScope;
  for (const auto& [lead, model_id] : schedule.model_by_lead) {
    const auto& src = farm_by_model.at(model_id);
    const auto lit = src.by_lead.find(lead);
    if (lit != src.by_lead.end()) hybrid.by_lead[lead] = lit->second;
  }
  const std::vector<std::pair<std::string, PeriodRange>> periods = {
      {"selection", config.selection_period}, {"report", config.report_period}};
  for (const auto& [label, range] : periods) {
    const LeadTimeReport r = evaluate_by_lead(clip_period(hybrid, range),
                                              clip_period(farm_measured, range), farm_norm);
    write_report_csv(reports_dir / label / "report_hybrid.csv", {r}, comments);
  }
}

void run_all(const RunConfig& config) {
  run_ingest(config);
  run_train(config);
  run_predict(config);
  run_evaluate(config);
  run_hybrid(config);
}

}  // namespace pipeline

}  // namespace windtwin
