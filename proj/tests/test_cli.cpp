#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "windtwin/csv.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WINDTWIN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help exit cleanly") {
  CHECK(run_cli("--version") == 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("synth --help") == 0);
}

TEST_CASE("missing config file exits with the I/O code") {
  CHECK(run_cli("ingest --config /nonexistent/runconfig.json") == 5);
}

TEST_CASE("evaluate before predict reports missing inputs") {
  const auto dir = temp_dir("cli_missing_inputs");
  REQUIRE(run_cli("synth --out " + dir.string() + " --seed 5 --days 8") == 0);
  // ingest works, evaluate must fail: no prediction files yet
  REQUIRE(run_cli("ingest --config " + (dir / "runconfig.json").string()) == 0);
  CHECK(run_cli("evaluate --config " + (dir / "runconfig.json").string()) == 5);
}

TEST_CASE("synth twice with one seed is byte-identical") {
  const auto dir_a = temp_dir("cli_synth_a");
  const auto dir_b = temp_dir("cli_synth_b");
  REQUIRE(run_cli("synth --out " + dir_a.string() + " --seed 7 --days 6") == 0);
  REQUIRE(run_cli("synth --out " + dir_b.string() + " --seed 7 --days 6") == 0);
  for (const char* name : {"scada.csv", "truth.csv", "forecast_meps_like.csv",
                           "forecast_simra_like.csv", "layout.json", "turbine_spec.json",
                           "runconfig.json"}) {
    CHECK(windtwin::read_file_bytes(dir_a / name) == windtwin::read_file_bytes(dir_b / name));
  }
}

TEST_CASE("terrain subcommand round trip") {
  const auto dir = temp_dir("cli_terrain");
  std::filesystem::create_directories(dir);
  {
    std::ofstream grid(dir / "grid.asc");
    grid << "ncols 4\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -99999\n";
    grid << "1 2 3 4\n5 6 -99999 8\n9 10 11 12\n";
    std::ofstream contours(dir / "contours.csv");
    contours << "depth,x,y,polyline_id\n-5,2.5,1.5,a\n-5,3.0,1.5,a\n";
  }
  CHECK(run_cli("terrain --grid " + (dir / "grid.asc").string() + " --contours " +
                (dir / "contours.csv").string() + " --out " + (dir / "chunks").string() +
                " --chunk-size 2") == 0);
  CHECK(std::filesystem::exists(dir / "chunks" / "chunks.json"));
  CHECK(std::filesystem::exists(dir / "chunks" / "chunk_0_0.i16"));
  // grid with no contours but missing cells fails with a validation code
  CHECK(run_cli("terrain --grid " + (dir / "grid.asc").string() + " --out " +
                (dir / "chunks2").string()) == 3);
}

}  // TEST_SUITE
