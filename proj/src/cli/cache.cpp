#include "cmrel/cli/cache.hpp"

#include <cstdlib>
#include <fstream>

#include "cmrel/error.hpp"
#include "json.hpp"

namespace cmrel::cli {

JsonlCache::JsonlCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw InvalidInput("cannot use cache directory " + dir_.string());
}

std::string JsonlCache::file_name(const std::string& kind) {
  if (kind == "an") return "anplus.jsonl";
  return kind + ".jsonl";
}

void JsonlCache::read_kind(const std::string& kind) {
  if (loaded_.count(kind)) return;
  auto& table = loaded_[kind];
  std::ifstream in(dir_ / file_name(kind));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (j.value("version", -1) != kCacheSchemaVersion) continue;
      table[j.at("key").get<std::string>()] = j.at("payload").dump();
    } catch (const std::exception&) {
      // a torn or foreign line is skipped; the value is recomputed
    }
  }
}

std::optional<std::string> JsonlCache::load(const std::string& kind, const std::string& key) {
  std::lock_guard lock(mutex_);
  read_kind(kind);
  const auto& table = loaded_[kind];
  auto it = table.find(key);
  if (it == table.end()) return std::nullopt;
  // payloads are stored as JSON; strings come back unquoted
  auto j = nlohmann::json::parse(it->second);
  return j.is_string() ? j.get<std::string>() : it->second;
}

void JsonlCache::store(const std::string& kind, const std::string& key, const std::string& payload) {
  std::lock_guard lock(mutex_);
  read_kind(kind);
  nlohmann::json rec;
  rec["version"] = kCacheSchemaVersion;
  rec["key"] = key;
  auto parsed = nlohmann::json::parse(payload, nullptr, false);
  rec["payload"] = parsed.is_discarded() ? nlohmann::json(payload) : parsed;
  std::ofstream out(dir_ / file_name(kind), std::ios::app);
  out << rec.dump() << '\n';
  loaded_[kind][key] = rec["payload"].dump();
}

std::string default_cache_dir() {
  const char* v = std::getenv(kCacheDirEnv);
  return v ? std::string(v) : std::string();
}

}  // namespace cmrel::cli
