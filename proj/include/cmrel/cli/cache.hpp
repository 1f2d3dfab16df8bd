#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "cmrel/cache.hpp"

namespace cmrel::cli {

inline constexpr int kCacheSchemaVersion = 1;
inline constexpr const char* kCacheDirEnv = "CMREL_CACHE_DIR";

/// One JSON object per line, {"version", "key", "payload"}, in a file per kind
/// ("anplus.jsonl", "modpoly.jsonl", "classpoly.jsonl"). Records with another
/// version are ignored; a later line for the same key wins.
class JsonlCache : public PersistentCache {
 public:
  explicit JsonlCache(std::filesystem::path dir);

  std::optional<std::string> load(const std::string& kind, const std::string& key) override;
  void store(const std::string& kind, const std::string& key, const std::string& payload) override;

  const std::filesystem::path& dir() const { return dir_; }
  static std::string file_name(const std::string& kind);

 private:
  void read_kind(const std::string& kind);

  std::filesystem::path dir_;
  std::mutex mutex_;
  std::map<std::string, std::map<std::string, std::string>> loaded_;
};

/// The directory named by CMREL_CACHE_DIR, or empty.
std::string default_cache_dir();

}  // namespace cmrel::cli
