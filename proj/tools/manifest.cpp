#include "manifest.hpp"

#include <fstream>
#include <json.hpp>

#include "adaptens/errors.hpp"

namespace adaptens::cli {

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "' for digest");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[8192];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[20];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

std::string RunManifest::json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["config"] = config;
  doc["seeds"] = seeds;
  doc["version"] = version;
  doc["input_digests"] = input_digests;
  doc["outputs"] = outputs;
  return doc.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "manifest.json");
  if (!out) throw DataError("cannot write manifest in '" + dir.string() + "'");
  out << json();
}

}  // namespace adaptens::cli
