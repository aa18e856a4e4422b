#include "agekin/manifest.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace agekin {

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[8192];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (got < static_cast<std::streamsize>(sizeof buf)) break;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["seed"] = m.seed;
  j["rng"] = m.rng;
  j["threads"] = m.threads;
  j["wall_seconds"] = m.wall_seconds;
  if (!m.config_echo_json.empty()) {
    j["config"] = nlohmann::json::parse(m.config_echo_json);
  }
  auto& arts = j["artifacts"] = nlohmann::json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"file", a.file}, {"hash", a.hash}});
  auto& num = j["settings"] = nlohmann::json::object();
  for (const auto& [k, v] : m.numeric_settings) num[k] = v;

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot write " + tmp);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("csv: cannot open " + path);
  stream_ = f;
  for (std::size_t i = 0; i < header.size(); ++i)
    std::fprintf(f, "%s%s", header[i].c_str(), i + 1 < header.size() ? "," : "\n");
}

CsvWriter::~CsvWriter() { close(); }

void CsvWriter::close() {
  if (stream_) {
    std::fclose(static_cast<FILE*>(stream_));
    stream_ = nullptr;
  }
}

void CsvWriter::row(const std::vector<double>& values) {
  FILE* f = static_cast<FILE*>(stream_);
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(f, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
}

void CsvWriter::row_prefix(const std::vector<std::int64_t>& ints,
                           const std::vector<double>& values) {
  FILE* f = static_cast<FILE*>(stream_);
  for (std::size_t i = 0; i < ints.size(); ++i)
    std::fprintf(f, "%lld%s", static_cast<long long>(ints[i]),
                 (i + 1 < ints.size() || !values.empty()) ? "," : "\n");
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(f, "%.17g%s", values[i], i + 1 < values.size() ? "," : "\n");
}

}  // namespace agekin
