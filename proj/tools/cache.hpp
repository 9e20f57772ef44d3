#pragma once

// Versioned, content-addressed JSON cache for the command-line tool.

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace kurihara::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kCacheSchema = "kurihara-cache";
inline constexpr int kCacheVersion = 1;

std::string sha256_hex(const std::string& data);

/// Key of a cached object: hash of the schema version, the kind and the inputs.
std::string cache_key(const std::string& kind, const Json& inputs);

class Cache {
 public:
  /// An empty directory disables caching.
  explicit Cache(std::filesystem::path dir = {});

  bool enabled() const { return !dir_.empty(); }
  const std::filesystem::path& dir() const { return dir_; }

  /// Payload stored under (kind, key); nullopt when absent, from another version,
  /// or failing its payload hash. Stale entries are removed.
  std::optional<Json> load(const std::string& kind, const std::string& key) const;
  /// Writes through a temporary file and a rename.
  void store(const std::string& kind, const std::string& key, const Json& payload) const;

  std::filesystem::path path_of(const std::string& kind, const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace kurihara::cli
