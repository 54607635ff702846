#include "cns/gauss.hpp"

#include <map>
#include <mutex>

namespace cns {

const GaussLegendre& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, GaussLegendre(order)).first;
    return it->second;
}

}  // namespace cns
