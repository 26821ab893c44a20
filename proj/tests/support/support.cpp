#include "support.hpp"

#include <map>
#include <mutex>
#include <set>
#include <string>

namespace iltlab::test {

std::filesystem::path cache_dir() { return ILTLAB_TEST_CACHE_DIR; }

const GreenOracle& oracle(int dim, int box) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, GreenOracle> tables;
  std::lock_guard lock(mu);
  const auto key = std::pair{dim, box};
  auto it = tables.find(key);
  if (it == tables.end()) {
    std::filesystem::create_directories(cache_dir());
    const auto file = cache_dir() / ("green-d" + std::to_string(dim) + "-b" + std::to_string(box) + ".bin");
    it = tables.emplace(key, GreenOracle::cached_box(dim, box, file)).first;
  }
  return it->second;
}

SiteList random_connected_set(int dim, std::size_t size, StreamRng& rng) {
  std::set<LatticePoint> in{LatticePoint(dim)};
  SiteList order{LatticePoint(dim)};
  const auto moves = lazy_moves(dim);
  while (in.size() < size) {
    const LatticePoint& from = order[rng.below(static_cast<std::uint32_t>(order.size()))];
    const LatticePoint next = from + moves[rng.below(static_cast<std::uint32_t>(2 * dim))];
    if (in.insert(next).second) order.push_back(next);
  }
  return SiteList(in.begin(), in.end());
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("iltlab-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace iltlab::test
