#include "cmrel/cache.hpp"

#include <mutex>

namespace cmrel {

namespace {
std::mutex g_cache_mutex;
std::shared_ptr<PersistentCache> g_cache;
}  // namespace

void set_persistent_cache(std::shared_ptr<PersistentCache> cache) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  g_cache = std::move(cache);
}

std::shared_ptr<PersistentCache> persistent_cache() {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  return g_cache;
}

}  // namespace cmrel
