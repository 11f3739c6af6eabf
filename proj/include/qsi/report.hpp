#pragma once
// Report emission: deterministic CSV/JSON formatting, content hashing, and
// the output bundle with its manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qsi {

inline constexpr std::string_view kVersion = "0.1.0";

// Round-trip-exact decimal rendering ("%.17g", locale-independent).
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view bytes);

std::string content_hash(std::string_view bytes);

struct ReportFile {
  std::string name;
  std::string bytes;
};

// A run's outputs. Files are accumulated in memory and written in one pass
// at the end of the run, followed by manifest.json (version, resolved
// config echo, content hash per file). The capture timestamp stays on the
// bundle only: emitted bytes depend on nothing but config and seed.
struct ReportBundle {
  std::vector<ReportFile> files;
  nlohmann::json config_echo;
  std::string timestamp;
  int exit_code = 0;

  void add(std::string name, std::string bytes);
  nlohmann::json manifest() const;
  // Writes all files plus manifest.json into out_dir; creates directories.
  void write(const std::filesystem::path& out_dir) const;
};

// Minimal CSV assembly; cells are pre-rendered strings.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::string header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }

 private:
  std::string out_;
};

std::string current_timestamp_utc();

}  // namespace qsi
