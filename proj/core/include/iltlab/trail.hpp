#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "iltlab/capacity.hpp"
#include "iltlab/green.hpp"
#include "iltlab/lattice.hpp"

namespace iltlab {

using BigInt = boost::multiprecision::cpp_int;

// Oriented consecutive-visit counts of a path watched on L (loops included).
// Sites are stored sorted; first/last are indices into `sites`.
struct EdgeOccupation {
  SiteList sites;
  std::vector<std::uint32_t> counts;  // row-major |L| x |L|
  int first = -1;
  int last = -1;

  std::size_t size() const noexcept { return sites.size(); }
  std::uint32_t at(std::size_t from, std::size_t to) const { return counts[from * sites.size() + to]; }
  std::uint32_t& at(std::size_t from, std::size_t to) { return counts[from * sites.size() + to]; }
  std::uint64_t out_degree(std::size_t from) const;
  // n(z) = sum_x E(z, x) + 1{z = last}.
  std::uint64_t visits(std::size_t z) const;
  // t = number of visits to L.
  std::uint64_t total_visits() const;
  int index_of(const LatticePoint& z) const;

  friend bool operator==(const EdgeOccupation&, const EdgeOccupation&) = default;
  friend auto operator<=>(const EdgeOccupation&, const EdgeOccupation&) = default;
};

// Counts from the subsequence of path positions lying in L. Throws "path never visits L".
EdgeOccupation edge_occupation(const SiteList& path, const SiteList& lambda);
// Same, from a sequence of indices into the (sorted) site list.
EdgeOccupation occupation_from_visits(const SiteList& sorted_sites, const std::vector<int>& visits);

// prod_z (sum_x E(z,x))! / prod_x E(z,x)!.
BigInt multinomial_count_bound(const EdgeOccupation& e);

// Single-linkage coalescence of L under the Euclidean distance. Level k has k clusters,
// each a sorted list of site indices; clusters are ordered by their smallest index.
struct CoalescenceLevel {
  std::vector<std::vector<int>> clusters;
  std::vector<int> cluster_of;  // site index -> cluster index
  // Squared pseudo-distance d_k^2 between clusters (min over representatives).
  std::vector<std::int64_t> d2;  // k x k
  // Pair merged to go from this level to the next one down (a < a_tilde); -1 at k = 1.
  int a = -1;
  int a_tilde = -1;

  std::size_t size() const noexcept { return clusters.size(); }
  std::int64_t dist2(int x, int y) const { return d2[static_cast<std::size_t>(x) * clusters.size() + static_cast<std::size_t>(y)]; }
};

struct CoalescenceHierarchy {
  SiteList sites;  // sorted
  // levels[k] has k clusters, k = 1..N; levels[0] unused.
  std::vector<CoalescenceLevel> levels;
  // Distance of the merge performed at level k (k = 2..N), nondecreasing in N - k.
  double merge_distance(int k) const;
};

CoalescenceHierarchy coalesce(const SiteList& lambda);

// Occupation counts aggregated over the clusters of one level.
std::vector<std::uint64_t> cluster_occupation(const EdgeOccupation& e, const CoalescenceLevel& level);

struct LevelCheck {
  int level = 0;
  bool holds = false;
};

struct TrailStock {
  SiteList sites;
  // Trail as a vertex sequence (site indices) starting at z1; edges are consecutive pairs.
  std::vector<int> trail;
  // stock_head[z] = head of the unique stock edge out of z, or -1.
  std::vector<int> stock_head;
  // |L|! prod_S d(e) and prod_T d(e) in floating point; `holds` is the exact comparison.
  double certificate_lhs = 0.0;
  double certificate_rhs = 0.0;
  bool holds = false;
  // The induction inequality at every level 2..N.
  std::vector<LevelCheck> levels;

  std::vector<std::pair<int, int>> trail_edges() const;
  std::vector<std::pair<int, int>> stock_edges() const;
};

// Builds a trail from z1 and an E-stock satisfying |L|! prod d^S >= prod_T d. Throws
// "inconsistent occupation" when E is not the trace of a path covering L.
TrailStock extract_trail_stock(const EdgeOccupation& e);

// Checks that E is the trace of a path from `first` to `last` visiting every site.
bool occupation_consistent(const EdgeOccupation& e);

// E_S: stock edges removed and turned into loops.
EdgeOccupation stock_transfer(const EdgeOccupation& e, const TrailStock& stock);

struct LoopTransfer {
  BigInt lhs;          // multinomial of E
  BigInt rhs;          // nbar^|L| * multinomial of E_S
  bool holds = false;  // lhs <= rhs
};

LoopTransfer loop_transfer_check(const EdgeOccupation& e, const TrailStock& stock);

// --- enumeration -----------------------------------------------------------

// Minimal number of lazy steps from x to y whose intermediate positions avoid L
// (y = x costs one step, staying put). Rows: sites of L, then the origin.
struct AvoidingCosts {
  SiteList sites;
  std::vector<int> cost;  // (|L| + 1) x |L|; -1 when unreachable within the bound
  int origin_row = 0;
  bool origin_in_lambda = false;
  int origin_index = -1;  // index of the origin in sites when present

  int at(int from, int to) const { return cost[static_cast<std::size_t>(from) * sites.size() + static_cast<std::size_t>(to)]; }
};

AvoidingCosts avoiding_costs(const SiteList& sorted_sites, int max_steps);

// Calls fn(visits) for every L-visit sequence of a lazy path from the origin of length
// <= max_steps (sequences realised by such a path, each once). Only sequences
// visiting every site are reported when cover_all is set.
void enumerate_visit_sequences(const AvoidingCosts& costs, int max_steps, bool cover_all,
                               const std::function<void(const std::vector<int>&)>& fn);

// Same set by literal enumeration of all (2d+1)^steps paths; for cross-checks.
void enumerate_visit_sequences_literal(const SiteList& sorted_sites, int max_steps, bool cover_all,
                                       const std::function<void(const std::vector<int>&)>& fn);

// Subsets of B(0, radius) (l1 ball) with 1..max_size sites. With anchored, only sets
// containing the origin; with symmetric, one representative per hyperoctahedral orbit.
std::vector<SiteList> enumerate_small_sets(int dim, int radius, int max_size, bool anchored, bool symmetric);

// --- decomposition and level-set bounds -----------------------------------

// P_0(l(z) = n(z) on L) from the harmonic measure: sum over visit sequences with the
// given profile of entrance * prod q * escape. By dynamic programming over counts.
double profile_probability(const HarmonicMeasure& h, const std::vector<int>& profile);
// Same sum by explicit enumeration of sequences (small t only).
double profile_probability_enumerated(const HarmonicMeasure& h, const std::vector<int>& profile);

struct LevelSetBound {
  double log_bound = 0.0;
  double log_prefactor = 0.0;  // |L| log(c nbar) + d log |L|!
  double capacity = 0.0;
  int n_min = 0;
  int n_max = 0;
  double log_path_sum = 0.0;
  // False when the path sum was replaced by an upper bound.
  bool exact_path_sum = true;

  double bound() const;
};

// Right side of the level-set inequality, on log scale.
LevelSetBound level_set_prob_bound(const SiteList& lambda, const std::vector<int>& n, const GreenOracle& oracle,
                                   double c_d);

struct IntersectionConstants {
  double c_upper = 1.0;  // C_d
  double kappa = 1.0;    // kappa_d
  double epsilon = 0.1;
};

struct IntersectionBounds {
  double log_upper = 0.0;
  double log_lower = 0.0;
  // (n + m) / L^{2/d}; the upper form is informative when this is large.
  double regime_ratio = 0.0;
  bool upper_regime = false;
};

IntersectionBounds intersection_bound_evaluators(int n, int m, int L, int dim, const IntersectionConstants& c);

// --- serialization ---------------------------------------------------------

nlohmann::json to_json(const EdgeOccupation& e);
EdgeOccupation occupation_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrailStock& t);

}  // namespace iltlab
