#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "windtwin/errors.hpp"
#include "windtwin/pipeline.hpp"
#include "windtwin/terrain.hpp"

namespace {

constexpr const char* kVersion = "windtwin 0.1.0";

// Exit codes: 0 ok, 2 config, 3 data validation, 4 numeric/training, 5 I/O.
int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const windtwin::ConfigError& e) {
    std::cerr << "error code=2 kind=config message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const windtwin::ValidationError& e) {
    std::cerr << "error code=3 kind=validation message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const windtwin::NumericError& e) {
    std::cerr << "error code=4 kind=numeric message=\"" << e.what() << "\"\n";
    return 4;
  } catch (const windtwin::IoError& e) {
    std::cerr << "error code=5 kind=io message=\"" << e.what() << "\"\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error code=4 kind=internal message=\"" << e.what() << "\"\n";
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wind-farm power forecasting pipeline"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic farm dataset");
  std::string synth_out = "dataset";
  std::optional<std::uint64_t> synth_seed;
  std::optional<int> synth_days;
  std::optional<int> synth_turbines;
  synth->add_option("--out", synth_out, "Output directory");
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--days", synth_days, "Duration in days");
  synth->add_option("--turbines", synth_turbines, "Number of turbines");

  // config-driven subcommands
  std::string config_path;
  auto add_config = [&config_path](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run config JSON")->required();
  };
  auto* ingest = app.add_subcommand("ingest", "Validate and resample SCADA data");
  add_config(ingest);
  auto* train = app.add_subcommand("train", "Train the data-driven forecasters");
  add_config(train);
  auto* predict = app.add_subcommand("predict", "Produce prediction matrices");
  add_config(predict);
  auto* evaluate = app.add_subcommand("evaluate", "Score models per lead time");
  add_config(evaluate);
  auto* hybrid = app.add_subcommand("hybrid", "Select and score the hybrid schedule");
  add_config(hybrid);
  auto* runall = app.add_subcommand("run", "ingest + train + predict + evaluate + hybrid");
  add_config(runall);

  // ---- terrain ----
  auto* terrain = app.add_subcommand("terrain", "Quantize and chunk a height grid");
  std::string terrain_grid, terrain_contours, terrain_out = "chunks";
  double terrain_scale = 0.1;
  std::size_t terrain_chunk = 64;
  double terrain_radius = 5000.0;
  terrain->add_option("--grid", terrain_grid, "ESRI ASCII height grid")->required();
  terrain->add_option("--contours", terrain_contours, "Depth contour CSV (optional)");
  terrain->add_option("--out", terrain_out, "Chunk output directory");
  terrain->add_option("--scale", terrain_scale, "Quantization scale, m per count");
  terrain->add_option("--chunk-size", terrain_chunk, "Chunk edge length in cells");
  terrain->add_option("--radius", terrain_radius, "Bathymetry search radius, m");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    return run_guarded([&] {
      windtwin::SynthConfig cfg;
      if (synth_seed) cfg.seed = *synth_seed;
      if (synth_days) cfg.duration_days = *synth_days;
      if (synth_turbines) cfg.n_turbines = *synth_turbines;
      windtwin::pipeline::run_synth(cfg, synth_out);
      std::cout << "dataset written to " << synth_out << "\n";
    });
  }
  if (terrain->parsed()) {
    return run_guarded([&] {
      windtwin::HeightGrid grid = windtwin::load_height_grid(terrain_grid);
      if (!terrain_contours.empty()) {
        const auto contours = windtwin::load_contours(terrain_contours);
        windtwin::MergeOptions opts;
        opts.search_radius = terrain_radius;
        grid = windtwin::merge_bathymetry(grid, contours, opts);
      }
      windtwin::QuantizedChunkSet set = windtwin::quantize_int16(grid, terrain_scale);
      windtwin::chunk_split(set, terrain_chunk);
      windtwin::save_chunk_set(set, terrain_out);
      std::cout << "chunk set written to " << terrain_out << " (" << set.chunks_x << "x"
                << set.chunks_y << " chunks)\n";
    });
  }

  return run_guarded([&] {
    const windtwin::RunConfig cfg = windtwin::load_run_config(config_path);
    if (ingest->parsed()) {
      windtwin::pipeline::run_ingest(cfg);
    } else if (train->parsed()) {
      windtwin::pipeline::run_train(cfg);
    } else if (predict->parsed()) {
      windtwin::pipeline::run_predict(cfg);
    } else if (evaluate->parsed()) {
      windtwin::pipeline::run_evaluate(cfg);
    } else if (hybrid->parsed()) {
      windtwin::pipeline::run_hybrid(cfg);
    } else if (runall->parsed()) {
      windtwin::pipeline::run_all(cfg);
    }
  });
}
