#pragma once

#include <filesystem>

#include "iltlab/green.hpp"
#include "iltlab/lattice.hpp"
#include "iltlab/rng.hpp"

namespace iltlab::test {

// Box-solved Green tables, solved once per process and cached on disk in the build tree.
const GreenOracle& oracle(int dim, int box);

std::filesystem::path cache_dir();

// Nearest-neighbour connected set of `size` sites grown from the origin, sorted.
SiteList random_connected_set(int dim, std::size_t size, StreamRng& rng);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

}  // namespace iltlab::test
