#include "cache.hpp"

#include "kurihara/error.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

namespace kurihara::cli {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Io, "sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string cache_key(const std::string& kind, const Json& inputs) {
  Json j;
  j["schema"] = kCacheSchema;
  j["version"] = kCacheVersion;
  j["kind"] = kind;
  j["inputs"] = inputs;
  return sha256_hex(j.dump());
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path Cache::path_of(const std::string& kind, const std::string& key) const {
  return dir_ / kind / (key + ".json");
}

std::optional<Json> Cache::load(const std::string& kind, const std::string& key) const {
  if (!enabled()) return std::nullopt;
  const auto path = path_of(kind, key);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  Json j = Json::parse(ss.str(), nullptr, false);
  const bool valid = !j.is_discarded() && j.is_object() && j.value("schema", "") == kCacheSchema &&
                     j.value("version", 0) == kCacheVersion && j.value("kind", "") == kind &&
                     j.value("key", "") == key && j.contains("payload") &&
                     j.value("payload_sha256", "") == sha256_hex(j["payload"].dump());
  if (!valid) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    return std::nullopt;
  }
  return j["payload"];
}

void Cache::store(const std::string& kind, const std::string& key, const Json& payload) const {
  if (!enabled()) return;
  const auto path = path_of(kind, key);
  std::filesystem::create_directories(path.parent_path());
  Json j;
  j["schema"] = kCacheSchema;
  j["version"] = kCacheVersion;
  j["kind"] = kind;
  j["key"] = key;
  j["payload_sha256"] = sha256_hex(payload.dump());
  j["payload"] = payload;
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out << j.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace kurihara::cli
