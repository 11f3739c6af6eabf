#include "qsi/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include "qsi/errors.hpp"

namespace qsi {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string content_hash(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return std::string(buf);
}

void ReportBundle::add(std::string name, std::string bytes) {
  files.push_back(ReportFile{std::move(name), std::move(bytes)});
}

nlohmann::json ReportBundle::manifest() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const ReportFile& f : files)
    entries.push_back(nlohmann::json{{"name", f.name},
                                     {"bytes", f.bytes.size()},
                                     {"hash", content_hash(f.bytes)}});
  return nlohmann::json{
      {"version", std::string(kVersion)},
      {"config", config_echo},
      {"files", entries},
  };
}

void ReportBundle::write(const std::filesystem::path& out_dir) const {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("report: cannot create directory " + out_dir.string() +
                  ": " + ec.message());
  auto emit = [&](const std::string& name, const std::string& bytes) {
    const std::filesystem::path path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("report: cannot open " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("report: short write to " + path.string());
  };
  for (const ReportFile& f : files) emit(f.name, f.bytes);
  emit("manifest.json", manifest().dump(2) + "\n");
}

CsvBuilder::CsvBuilder(std::string header) : out_(std::move(header)) {
  out_ += '\n';
}

void CsvBuilder::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

std::string current_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return std::string(buf);
}

}  // namespace qsi
