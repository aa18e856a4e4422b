#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agekin {

/// FNV-1a 64-bit digest of a file's bytes (hex string). Throws on I/O error.
std::string file_content_hash(const std::string& path);

struct ManifestEntry {
  std::string file;
  std::string hash;
};

struct RunManifest {
  std::string subcommand;
  std::string config_echo_json;  // resolved configuration, JSON text
  std::uint64_t seed = 0;
  std::string rng;
  unsigned threads = 0;
  double wall_seconds = 0.0;
  std::vector<ManifestEntry> artifacts;
  std::vector<std::pair<std::string, double>> numeric_settings;  // tolerances, grids
};

/// Serializes the manifest and writes it atomically (tmp file + rename).
void write_manifest(const RunManifest& manifest, const std::string& path);

/// Opens path for writing and prints rows with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);
  void row_prefix(const std::vector<std::int64_t>& ints,
                  const std::vector<double>& values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  void* stream_ = nullptr;  // FILE*
};

}  // namespace agekin
