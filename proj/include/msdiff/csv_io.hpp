#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "msdiff/common.hpp"

namespace msdiff {

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string hex16(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Table writer that emits a CSV file and a gnuplot-friendly whitespace twin
// (.dat) with identical content. Every file starts with comment lines naming
// the config hash and the column units.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& csv_path, std::uint64_t config_hash,
              const std::string& units_note, const std::vector<std::string>& columns)
      : csv_(csv_path), dat_(std::filesystem::path(csv_path).replace_extension(".dat")) {
    if (!csv_) throw validation_error("cannot open output file '" + csv_path.string() + "'");
    if (!dat_) throw validation_error("cannot open output file for '" + csv_path.string() + "'");
    const std::string hash_line = "# config_hash=" + hex16(config_hash);
    const std::string units_line = "# units: " + units_note;
    csv_ << hash_line << "\n" << units_line << "\n";
    dat_ << hash_line << "\n" << units_line << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) csv_ << (i ? "," : "") << columns[i];
    csv_ << "\n";
    dat_ << "#";
    for (const std::string& c : columns) dat_ << " " << c;
    dat_ << "\n";
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string s = format_g17(values[i]);
      csv_ << (i ? "," : "") << s;
      dat_ << (i ? " " : "") << s;
    }
    csv_ << "\n";
    dat_ << "\n";
  }

  void row_mixed(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      csv_ << (i ? "," : "") << values[i];
      dat_ << (i ? " " : "") << values[i];
    }
    csv_ << "\n";
    dat_ << "\n";
  }

 private:
  std::ofstream csv_;
  std::ofstream dat_;
};

}  // namespace msdiff
