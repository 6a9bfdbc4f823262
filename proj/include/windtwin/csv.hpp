#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace windtwin {

// Splits one CSV line on commas. Fields are plain (no quoting) in every
// format this project reads or writes.
std::vector<std::string> split_csv_line(const std::string& line);

std::string trim(const std::string& s);

// nullopt when the field does not parse as a finite double; "nan"/"" count
// as unparseable so callers can treat them as missing.
std::optional<double> parse_double(const std::string& field);

std::optional<long long> parse_int(const std::string& field);

// Shortest round-trip formatting for machine-facing files.
std::string fmt_double(double v);

// 6 significant digits for report files.
std::string fmt_g6(double v);

// Reads a whole CSV file. Leading lines starting with '#' are collected as
// comments; the first non-comment line is the header.
struct CsvFile {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;  // 1-based physical line numbers
};

CsvFile read_csv(const std::filesystem::path& path);

// Streaming row reader for large files; same comment/header conventions as
// read_csv without materializing the whole file.
class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path);

  // Empty when the file had no non-comment lines at all.
  const std::vector<std::string>& header() const { return header_; }
  bool empty_input() const { return empty_; }

  // False at end of input; otherwise fills `row` and its 1-based line number.
  bool next(std::vector<std::string>& row, std::size_t& lineno);

 private:
  std::ifstream in_;
  std::vector<std::string> header_;
  std::size_t lineno_ = 0;
  bool empty_ = true;
};

// Opens for writing, throws IoError on failure, creates parent directories.
std::ofstream open_output(const std::filesystem::path& path);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace windtwin
