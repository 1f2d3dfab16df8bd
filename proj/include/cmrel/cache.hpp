#pragma once

#include <memory>
#include <optional>
#include <string>

namespace cmrel {

/// Optional on-disk store for expensive exact results (class polynomials,
/// modular polynomials, newform coefficients). The library works without one.
class PersistentCache {
 public:
  virtual ~PersistentCache() = default;
  virtual std::optional<std::string> load(const std::string& kind, const std::string& key) = 0;
  virtual void store(const std::string& kind, const std::string& key,
                     const std::string& payload) = 0;
};

void set_persistent_cache(std::shared_ptr<PersistentCache> cache);
std::shared_ptr<PersistentCache> persistent_cache();

}  // namespace cmrel
