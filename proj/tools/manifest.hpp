#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace adaptens::cli {

// FNV-1a 64 digest over the file bytes, as "fnv1a64:<hex>".
std::string file_digest(const std::filesystem::path& path);

/// Provenance record written next to every command's outputs: the command,
/// its fully resolved configuration, seeds, code version, input digests and
/// produced files. A rerun from the same manifest reproduces the outputs.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;
  std::vector<std::uint64_t> seeds;
  std::string version;
  std::map<std::string, std::string> input_digests;
  std::vector<std::string> outputs;

  std::string json() const;
  // Writes <dir>/manifest.json.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace adaptens::cli
