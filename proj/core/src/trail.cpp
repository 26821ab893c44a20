#include "iltlab/trail.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <tuple>

#include <absl/container/flat_hash_map.h>
#include <absl/container/flat_hash_set.h>

#include "iltlab/error.hpp"

namespace iltlab {

// --- occupation ------------------------------------------------------------

std::uint64_t EdgeOccupation::out_degree(std::size_t from) const {
  std::uint64_t s = 0;
  for (std::size_t to = 0; to < size(); ++to) s += at(from, to);
  return s;
}

std::uint64_t EdgeOccupation::visits(std::size_t z) const {
  return out_degree(z) + (static_cast<int>(z) == last ? 1 : 0);
}

std::uint64_t EdgeOccupation::total_visits() const {
  std::uint64_t s = 0;
  for (std::size_t z = 0; z < size(); ++z) s += visits(z);
  return s;
}

int EdgeOccupation::index_of(const LatticePoint& z) const {
  const auto it = std::lower_bound(sites.begin(), sites.end(), z);
  return it != sites.end() && *it == z ? static_cast<int>(it - sites.begin()) : -1;
}

EdgeOccupation occupation_from_visits(const SiteList& sorted_sites, const std::vector<int>& visits) {
  if (visits.empty()) throw InvalidInput("path never visits L");
  EdgeOccupation e;
  e.sites = sorted_sites;
  e.counts.assign(sorted_sites.size() * sorted_sites.size(), 0);
  for (std::size_t i = 0; i + 1 < visits.size(); ++i) {
    ++e.at(static_cast<std::size_t>(visits[i]), static_cast<std::size_t>(visits[i + 1]));
  }
  e.first = visits.front();
  e.last = visits.back();
  return e;
}

EdgeOccupation edge_occupation(const SiteList& path, const SiteList& lambda) {
  const SiteList sorted = normalized(lambda);
  if (sorted.size() != lambda.size()) throw InvalidInput("edge_occupation: duplicate sites in L");
  std::vector<int> visits;
  for (const auto& z : path) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), z);
    if (it != sorted.end() && *it == z) visits.push_back(static_cast<int>(it - sorted.begin()));
  }
  return occupation_from_visits(sorted, visits);
}

namespace {

BigInt big_factorial(std::uint64_t n) {
  BigInt f = 1;
  for (std::uint64_t k = 2; k <= n; ++k) f *= k;
  return f;
}

BigInt multinomial_rows(std::size_t n, const std::function<std::uint64_t(std::size_t, std::size_t)>& count) {
  BigInt total = 1;
  for (std::size_t z = 0; z < n; ++z) {
    std::uint64_t row = 0;
    BigInt denom = 1;
    for (std::size_t x = 0; x < n; ++x) {
      row += count(z, x);
      denom *= big_factorial(count(z, x));
    }
    total *= big_factorial(row) / denom;
  }
  return total;
}

}  // namespace

BigInt multinomial_count_bound(const EdgeOccupation& e) {
  return multinomial_rows(e.size(), [&](std::size_t z, std::size_t x) { return std::uint64_t{e.at(z, x)}; });
}

bool occupation_consistent(const EdgeOccupation& e) {
  const std::size_t n = e.size();
  if (n == 0 || e.counts.size() != n * n) return false;
  if (e.first < 0 || e.last < 0 || e.first >= static_cast<int>(n) || e.last >= static_cast<int>(n)) return false;
  for (std::size_t z = 0; z < n; ++z) {
    std::uint64_t in = 0;
    for (std::size_t x = 0; x < n; ++x) in += e.at(x, z);
    const std::uint64_t out = e.out_degree(z);
    const std::uint64_t visits = out + (static_cast<int>(z) == e.last);
    if (visits == 0) return false;
    if (in + (static_cast<int>(z) == e.first) != visits) return false;
  }
  // Every site reachable from the first one along occupied edges.
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{static_cast<std::size_t>(e.first)};
  seen[static_cast<std::size_t>(e.first)] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      if (e.at(u, v) > 0 && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

// --- coalescence -----------------------------------------------------------

double CoalescenceHierarchy::merge_distance(int k) const {
  const auto& level = levels.at(static_cast<std::size_t>(k));
  if (level.a < 0) return 0.0;
  return std::sqrt(static_cast<double>(level.dist2(level.a, level.a_tilde)));
}

CoalescenceHierarchy coalesce(const SiteList& lambda) {
  if (lambda.size() < 1) throw InvalidInput("coalesce: empty set");
  CoalescenceHierarchy h;
  h.sites = normalized(lambda);
  if (h.sites.size() != lambda.size()) throw InvalidInput("coalesce: duplicate sites");
  const int n = static_cast<int>(h.sites.size());
  h.levels.resize(static_cast<std::size_t>(n) + 1);

  CoalescenceLevel top;
  top.clusters.resize(static_cast<std::size_t>(n));
  top.cluster_of.resize(static_cast<std::size_t>(n));
  top.d2.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    top.clusters[static_cast<std::size_t>(i)] = {i};
    top.cluster_of[static_cast<std::size_t>(i)] = i;
    for (int j = 0; j < n; ++j) {
      top.d2[static_cast<std::size_t>(i * n + j)] =
          squared_distance(h.sites[static_cast<std::size_t>(i)], h.sites[static_cast<std::size_t>(j)]);
    }
  }
  h.levels[static_cast<std::size_t>(n)] = std::move(top);

  for (int k = n; k >= 2; --k) {
    auto& cur = h.levels[static_cast<std::size_t>(k)];
    // Closest pair; ties go to the lexicographically smallest (cluster, cluster) pair,
    // clusters being ordered by their smallest site.
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (int x = 0; x < k; ++x) {
      for (int y = x + 1; y < k; ++y) {
        if (cur.dist2(x, y) < best) {
          best = cur.dist2(x, y);
          cur.a = x;
          cur.a_tilde = y;
        }
      }
    }
    std::vector<std::vector<int>> next;
    for (int x = 0; x < k; ++x) {
      if (x == cur.a_tilde) continue;
      auto c = cur.clusters[static_cast<std::size_t>(x)];
      if (x == cur.a) {
        const auto& other = cur.clusters[static_cast<std::size_t>(cur.a_tilde)];
        c.insert(c.end(), other.begin(), other.end());
        std::sort(c.begin(), c.end());
      }
      next.push_back(std::move(c));
    }
    std::sort(next.begin(), next.end(), [](const auto& p, const auto& q) { return p.front() < q.front(); });
    CoalescenceLevel lower;
    lower.clusters = std::move(next);
    lower.cluster_of.resize(static_cast<std::size_t>(n));
    const std::size_t m = lower.clusters.size();
    for (std::size_t c = 0; c < m; ++c) {
      for (int s : lower.clusters[c]) lower.cluster_of[static_cast<std::size_t>(s)] = static_cast<int>(c);
    }
    lower.d2.assign(m * m, std::numeric_limits<std::int64_t>::max());
    const auto& base = h.levels[static_cast<std::size_t>(n)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        auto& slot = lower.d2[static_cast<std::size_t>(lower.cluster_of[static_cast<std::size_t>(i)]) * m +
                              static_cast<std::size_t>(lower.cluster_of[static_cast<std::size_t>(j)])];
        slot = std::min(slot, base.dist2(i, j));
      }
    }
    for (std::size_t c = 0; c < m; ++c) lower.d2[c * m + c] = 0;
    h.levels[static_cast<std::size_t>(k - 1)] = std::move(lower);
  }
  return h;
}

std::vector<std::uint64_t> cluster_occupation(const EdgeOccupation& e, const CoalescenceLevel& level) {
  const std::size_t k = level.size();
  std::vector<std::uint64_t> out(k * k, 0);
  for (std::size_t x = 0; x < e.size(); ++x) {
    for (std::size_t y = 0; y < e.size(); ++y) {
      out[static_cast<std::size_t>(level.cluster_of[x]) * k + static_cast<std::size_t>(level.cluster_of[y])] +=
          e.at(x, y);
    }
  }
  return out;
}

// --- trail and stock ---------------------------------------------------------

std::vector<std::pair<int, int>> TrailStock::trail_edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i + 1 < trail.size(); ++i) out.emplace_back(trail[i], trail[i + 1]);
  return out;
}

std::vector<std::pair<int, int>> TrailStock::stock_edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t z = 0; z < stock_head.size(); ++z) {
    if (stock_head[z] >= 0) out.emplace_back(static_cast<int>(z), stock_head[z]);
  }
  return out;
}

namespace {

// (N! / (N-k+1)!)^2 prod_S d_k^2 >= prod_T d_k^2, exactly.
bool level_inequality(int n_total, int k, const CoalescenceLevel& level, const std::vector<int>& trail,
                      const std::vector<int>& stock_head) {
  BigInt lhs = 1;
  for (int f = n_total - k + 2; f <= n_total; ++f) lhs *= f;
  lhs *= lhs;
  for (std::size_t x = 0; x < stock_head.size(); ++x) {
    if (stock_head[x] >= 0) lhs *= level.dist2(static_cast<int>(x), stock_head[x]);
  }
  BigInt rhs = 1;
  for (std::size_t i = 0; i + 1 < trail.size(); ++i) rhs *= level.dist2(trail[i], trail[i + 1]);
  return lhs >= rhs;
}

[[noreturn]] void not_realizable() { throw InvalidInput("not path-realizable"); }

}  // namespace

TrailStock extract_trail_stock(const EdgeOccupation& e) {
  if (!occupation_consistent(e)) throw InvalidInput("inconsistent occupation");
  const int n = static_cast<int>(e.size());
  TrailStock out;
  out.sites = e.sites;
  if (n == 1) {
    out.trail = {0};
    out.stock_head = {-1};
    out.certificate_lhs = out.certificate_rhs = 1.0;
    out.holds = true;
    return out;
  }
  const CoalescenceHierarchy h = coalesce(e.sites);

  // Level 2: orient from the cluster holding z1.
  std::vector<int> trail;
  std::vector<int> stock(2, -1);
  {
    const auto& l2 = h.levels[2];
    const auto occ = cluster_occupation(e, l2);
    const int c1 = l2.cluster_of[static_cast<std::size_t>(e.first)];
    const int c2 = 1 - c1;
    if (occ[static_cast<std::size_t>(c1 * 2 + c2)] == 0) not_realizable();
    trail = {c1, c2};
    stock[static_cast<std::size_t>(c1)] = c2;
    out.levels.push_back({2, level_inequality(n, 2, l2, trail, stock)});
  }

  for (int k = 3; k <= n; ++k) {
    const auto& lk = h.levels[static_cast<std::size_t>(k)];
    const auto& lp = h.levels[static_cast<std::size_t>(k - 1)];
    const int a = lk.a;
    const int at = lk.a_tilde;
    const auto occ = cluster_occupation(e, lk);
    auto e_k = [&](int x, int y) { return occ[static_cast<std::size_t>(x * k + y)]; };
    std::vector<int> parent(static_cast<std::size_t>(k));
    std::vector<int> child(static_cast<std::size_t>(k - 1), -1);
    for (int c = 0; c < k; ++c) {
      parent[static_cast<std::size_t>(c)] = lp.cluster_of[static_cast<std::size_t>(lk.clusters[static_cast<std::size_t>(c)].front())];
      if (c != a && c != at) child[static_cast<std::size_t>(parent[static_cast<std::size_t>(c)])] = c;
    }
    const int psi = parent[static_cast<std::size_t>(a)];

    // Split the previous stock across the two halves of psi.
    std::vector<int> next(static_cast<std::size_t>(k), -1);
    for (int u = 0; u < k - 1; ++u) {
      const int v = stock[static_cast<std::size_t>(u)];
      if (v < 0) continue;
      int tail, head;
      if (u != psi) {
        tail = child[static_cast<std::size_t>(u)];
        if (v != psi) {
          head = child[static_cast<std::size_t>(v)];
        } else if (e_k(tail, a) > 0) {
          head = a;
        } else if (e_k(tail, at) > 0) {
          head = at;
        } else {
          not_realizable();
        }
      } else {
        head = child[static_cast<std::size_t>(v)];
        if (e_k(a, head) > 0) {
          tail = a;
        } else if (e_k(at, head) > 0) {
          tail = at;
        } else {
          not_realizable();
        }
      }
      next[static_cast<std::size_t>(tail)] = head;
    }

    // New stock edge: out of a vertex without stock, along an occupied non-loop edge,
    // shortest first, then lexicographic.
    std::tuple<std::int64_t, int, int> best{std::numeric_limits<std::int64_t>::max(), -1, -1};
    for (int x = 0; x < k; ++x) {
      if (next[static_cast<std::size_t>(x)] >= 0) continue;
      for (int z = 0; z < k; ++z) {
        if (z == x || e_k(x, z) == 0) continue;
        best = std::min(best, std::tuple<std::int64_t, int, int>{lk.dist2(x, z), x, z});
      }
    }
    if (std::get<1>(best) < 0) not_realizable();
    next[static_cast<std::size_t>(std::get<1>(best))] = std::get<2>(best);

    // Splice psi open in the trail.
    const auto pos = static_cast<std::size_t>(std::find(trail.begin(), trail.end(), psi) - trail.begin());
    int first;
    if (pos == 0) {
      first = lk.cluster_of[static_cast<std::size_t>(e.first)];
    } else {
      const int b = child[static_cast<std::size_t>(trail[pos - 1])];
      const std::int64_t da = lk.dist2(b, a);
      const std::int64_t dat = lk.dist2(b, at);
      if (da != dat) {
        first = da < dat ? a : at;
      } else if (pos + 1 < trail.size()) {
        const int bp = child[static_cast<std::size_t>(trail[pos + 1])];
        first = lk.dist2(at, bp) <= lk.dist2(a, bp) ? a : at;
      } else {
        first = a;
      }
    }
    const int second = first == a ? at : a;
    std::vector<int> spliced;
    spliced.reserve(static_cast<std::size_t>(k));
    for (int u : trail) {
      if (u == psi) {
        spliced.push_back(first);
        spliced.push_back(second);
      } else {
        spliced.push_back(child[static_cast<std::size_t>(u)]);
      }
    }
    trail = std::move(spliced);
    stock = std::move(next);
    out.levels.push_back({k, level_inequality(n, k, lk, trail, stock)});
  }

  // At level N clusters are singletons ordered like the sites.
  out.trail = trail;
  out.stock_head = stock;
  const auto& top = h.levels[static_cast<std::size_t>(n)];
  double lhs = 1.0, rhs = 1.0;
  for (int f = 2; f <= n; ++f) lhs *= f;
  for (int x = 0; x < n; ++x) {
    if (stock[static_cast<std::size_t>(x)] >= 0) lhs *= std::sqrt(static_cast<double>(top.dist2(x, stock[static_cast<std::size_t>(x)])));
  }
  for (std::size_t i = 0; i + 1 < trail.size(); ++i) rhs *= std::sqrt(static_cast<double>(top.dist2(trail[i], trail[i + 1])));
  out.certificate_lhs = lhs;
  out.certificate_rhs = rhs;
  BigInt l = big_factorial(static_cast<std::uint64_t>(n));
  l *= l;
  for (int x = 0; x < n; ++x) {
    if (stock[static_cast<std::size_t>(x)] >= 0) l *= top.dist2(x, stock[static_cast<std::size_t>(x)]);
  }
  BigInt r = 1;
  for (std::size_t i = 0; i + 1 < trail.size(); ++i) r *= top.dist2(trail[i], trail[i + 1]);
  out.holds = l >= r;
  return out;
}

EdgeOccupation stock_transfer(const EdgeOccupation& e, const TrailStock& stock) {
  EdgeOccupation out = e;
  for (const auto& [x, y] : stock.stock_edges()) {
    const auto ux = static_cast<std::size_t>(x);
    --out.at(ux, static_cast<std::size_t>(y));
    ++out.at(ux, ux);
  }
  return out;
}

LoopTransfer loop_transfer_check(const EdgeOccupation& e, const TrailStock& stock) {
  const EdgeOccupation es = stock_transfer(e, stock);
  std::uint64_t nbar = 0;
  for (std::size_t z = 0; z < e.size(); ++z) nbar = std::max(nbar, e.visits(z));
  LoopTransfer out;
  out.lhs = multinomial_count_bound(e);
  out.rhs = multinomial_count_bound(es);
  for (std::size_t z = 0; z < e.size(); ++z) out.rhs *= nbar;
  out.holds = out.lhs <= out.rhs;
  return out;
}

// --- enumeration -------------------------------------------------------------

namespace {

// Shortest lazy path from x to y with every intermediate position outside L, or -1
// if longer than budget. Staying put is never useful for avoidance, so only the
// 2d axis moves are explored; the direct step cost is the l1 distance.
int avoiding_distance(const LatticePoint& x, const LatticePoint& y, const absl::flat_hash_set<LatticePoint>& lambda,
                      int budget) {
  if (x == y) return 1;
  const int dim = x.dim();
  const int direct = static_cast<int>((y - x).l1_norm());
  if (direct > budget) return -1;
  // Monotone paths first: DP over the box spanned by x and y.
  {
    std::array<int, kMaxDim> span{}, step{};
    std::size_t cells = 1;
    for (int i = 0; i < dim; ++i) {
      span[static_cast<std::size_t>(i)] = std::abs(y[i] - x[i]);
      step[static_cast<std::size_t>(i)] = y[i] >= x[i] ? 1 : -1;
      cells *= static_cast<std::size_t>(span[static_cast<std::size_t>(i)] + 1);
    }
    std::vector<char> ok(cells, 0);
    std::array<int, kMaxDim> off{};
    // Cells in mixed-radix order; every predecessor has a smaller index.
    for (std::size_t idx = 0; idx < cells; ++idx) {
      std::size_t r = idx;
      LatticePoint p = x;
      int moved = 0;
      for (int i = 0; i < dim; ++i) {
        const auto base = static_cast<std::size_t>(span[static_cast<std::size_t>(i)] + 1);
        off[static_cast<std::size_t>(i)] = static_cast<int>(r % base);
        r /= base;
        p[i] += step[static_cast<std::size_t>(i)] * off[static_cast<std::size_t>(i)];
        moved += off[static_cast<std::size_t>(i)];
      }
      if (moved == 0) {
        ok[idx] = 1;
        continue;
      }
      if (moved < direct && lambda.contains(p)) continue;
      std::size_t stride = 1;
      for (int i = 0; i < dim; ++i) {
        if (off[static_cast<std::size_t>(i)] > 0 && ok[idx - stride]) {
          ok[idx] = 1;
          break;
        }
        stride *= static_cast<std::size_t>(span[static_cast<std::size_t>(i)] + 1);
      }
    }
    if (ok[cells - 1]) return direct;
  }
  // Breadth-first search pruned by the l1 lower bound to y.
  absl::flat_hash_map<LatticePoint, int> depth;
  std::vector<LatticePoint> frontier{x};
  depth[x] = 0;
  for (int d = 0; d < budget && !frontier.empty(); ++d) {
    std::vector<LatticePoint> next;
    for (const auto& p : frontier) {
      for (int i = 0; i < dim; ++i) {
        for (int s = -1; s <= 1; s += 2) {
          LatticePoint q = p;
          q[i] += s;
          if (q == y) return d + 1;
          if (lambda.contains(q)) continue;
          if (d + 1 + (y - q).l1_norm() > budget) continue;
          if (depth.emplace(q, d + 1).second) next.push_back(q);
        }
      }
    }
    frontier = std::move(next);
  }
  return -1;
}

}  // namespace

AvoidingCosts avoiding_costs(const SiteList& sorted_sites, int max_steps) {
  if (sorted_sites.empty()) throw InvalidInput("avoiding_costs: empty set");
  AvoidingCosts c;
  c.sites = sorted_sites;
  const std::size_t n = sorted_sites.size();
  const LatticePoint origin(sorted_sites.front().dim());
  absl::flat_hash_set<LatticePoint> lambda(sorted_sites.begin(), sorted_sites.end());
  c.origin_in_lambda = lambda.contains(origin);
  if (c.origin_in_lambda) {
    c.origin_index = static_cast<int>(std::lower_bound(sorted_sites.begin(), sorted_sites.end(), origin) -
                                      sorted_sites.begin());
  }
  c.origin_row = static_cast<int>(n);
  c.cost.assign((n + 1) * n, -1);
  for (std::size_t i = 0; i <= n; ++i) {
    const LatticePoint& from = i < n ? sorted_sites[i] : origin;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == n && c.origin_in_lambda) {
        c.cost[i * n + j] = static_cast<int>(j) == c.origin_index ? 0 : -1;
        continue;
      }
      c.cost[i * n + j] = avoiding_distance(from, sorted_sites[j], lambda, max_steps);
    }
  }
  return c;
}

void enumerate_visit_sequences(const AvoidingCosts& costs, int max_steps, bool cover_all,
                               const std::function<void(const std::vector<int>&)>& fn) {
  const int n = static_cast<int>(costs.sites.size());
  std::vector<int> seq;
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  int covered = 0;
  auto rec = [&](auto&& self, int used) -> void {
    if (!cover_all || covered == n) fn(seq);
    const int from = seq.back();
    for (int y = 0; y < n; ++y) {
      const int c = costs.at(from, y);
      if (c < 0 || used + c > max_steps) continue;
      seq.push_back(y);
      if (seen[static_cast<std::size_t>(y)]++ == 0) ++covered;
      self(self, used + c);
      if (--seen[static_cast<std::size_t>(y)] == 0) --covered;
      seq.pop_back();
    }
  };
  for (int y = 0; y < n; ++y) {
    const int c = costs.at(costs.origin_row, y);
    if (c < 0 || c > max_steps) continue;
    seq = {y};
    seen.assign(static_cast<std::size_t>(n), 0);
    seen[static_cast<std::size_t>(y)] = 1;
    covered = 1;
    rec(rec, c);
  }
}

void enumerate_visit_sequences_literal(const SiteList& sorted_sites, int max_steps, bool cover_all,
                                       const std::function<void(const std::vector<int>&)>& fn) {
  if (sorted_sites.empty()) throw InvalidInput("enumerate: empty set");
  const int dim = sorted_sites.front().dim();
  const auto moves = lazy_moves(dim);
  std::set<std::vector<int>> found;
  std::vector<int> seq;
  auto index = [&](const LatticePoint& p) {
    const auto it = std::lower_bound(sorted_sites.begin(), sorted_sites.end(), p);
    return it != sorted_sites.end() && *it == p ? static_cast<int>(it - sorted_sites.begin()) : -1;
  };
  auto rec = [&](auto&& self, const LatticePoint& p, int steps) -> void {
    const int i = index(p);
    if (i >= 0) seq.push_back(i);
    if (!seq.empty()) found.insert(seq);
    if (steps < max_steps) {
      for (const auto& m : moves) self(self, p + m, steps + 1);
    }
    if (i >= 0) seq.pop_back();
  };
  rec(rec, LatticePoint(dim), 0);
  const std::size_t n = sorted_sites.size();
  for (const auto& s : found) {
    if (cover_all) {
      std::vector<char> seen(n, 0);
      for (int v : s) seen[static_cast<std::size_t>(v)] = 1;
      if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n)) continue;
    }
    fn(s);
  }
}

std::vector<SiteList> enumerate_small_sets(int dim, int radius, int max_size, bool anchored, bool symmetric) {
  const SiteList ball = l1_ball(dim, radius);
  const LatticePoint origin(dim);
  SiteList pool;
  for (const auto& z : ball) {
    if (!anchored || !z.is_origin()) pool.push_back(z);
  }
  const auto group = symmetric ? hyperoctahedral_group(dim) : std::vector<SignedPermutation>{};
  std::vector<SiteList> out;
  SiteList current;
  if (anchored) current.push_back(origin);
  auto emit = [&] {
    SiteList s = normalized(current);
    if (symmetric) {
      for (const auto& g : group) {
        SiteList t;
        t.reserve(s.size());
        for (const auto& z : s) t.push_back(g.apply(z));
        std::sort(t.begin(), t.end());
        if (t < s) return;
      }
    }
    out.push_back(std::move(s));
  };
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (!current.empty()) emit();
    if (static_cast<int>(current.size()) == max_size) return;
    for (std::size_t i = start; i < pool.size(); ++i) {
      current.push_back(pool[i]);
      self(self, i + 1);
      current.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

// --- decomposition -----------------------------------------------------------

double profile_probability(const HarmonicMeasure& h, const std::vector<int>& profile) {
  const auto n = static_cast<std::size_t>(h.q.cols());
  if (profile.size() != n) throw InvalidInput("profile_probability: profile size differs from L");
  const auto origin_row = static_cast<Eigen::Index>(n);
  std::vector<std::size_t> radix(n), stride(n);
  std::size_t states = 1;
  int t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (profile[i] < 0) throw InvalidInput("profile_probability: negative count");
    radix[i] = static_cast<std::size_t>(profile[i]) + 1;
    stride[i] = states;
    states *= radix[i];
    t += profile[i];
  }
  if (t == 0) return h.escape(origin_row);
  std::vector<double> f(states * n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (profile[s] > 0) f[stride[s] * n + s] = h.q(origin_row, static_cast<Eigen::Index>(s));
  }
  for (std::size_t c = 0; c < states; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const double v = f[c * n + i];
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if ((c / stride[j]) % radix[j] + 1 >= radix[j]) continue;
        f[(c + stride[j]) * n + j] += v * h.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) p += f[(states - 1) * n + i] * h.escape(static_cast<Eigen::Index>(i));
  return p;
}

double profile_probability_enumerated(const HarmonicMeasure& h, const std::vector<int>& profile) {
  const auto n = static_cast<std::size_t>(h.q.cols());
  if (profile.size() != n) throw InvalidInput("profile_probability: profile size differs from L");
  const auto origin_row = static_cast<Eigen::Index>(n);
  const int t = std::accumulate(profile.begin(), profile.end(), 0);
  if (t == 0) return h.escape(origin_row);
  if (t > 12) throw InvalidInput("profile_probability_enumerated: at most 12 visits");
  std::vector<int> left = profile;
  double total = 0.0;
  auto rec = [&](auto&& self, Eigen::Index prev, double weight, int placed) -> void {
    if (placed == t) {
      total += weight * h.escape(prev);
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (left[j] == 0) continue;
      --left[j];
      self(self, static_cast<Eigen::Index>(j), weight * h.q(prev, static_cast<Eigen::Index>(j)), placed + 1);
      ++left[j];
    }
  };
  rec(rec, origin_row, 1.0, 0);
  return total;
}

// --- level-set bounds --------------------------------------------------------

double LevelSetBound::bound() const { return std::exp(log_bound); }

LevelSetBound level_set_prob_bound(const SiteList& lambda, const std::vector<int>& n, const GreenOracle& oracle,
                                   double c_d) {
  if (lambda.empty()) throw InvalidInput("level_set_prob_bound: empty set");
  if (n.size() != lambda.size()) throw InvalidInput("level_set_prob_bound: one level per site required");
  if (!(c_d > 0.0)) throw InvalidInput("level_set_prob_bound: c_d must be positive");
  LevelSetBound out;
  out.n_min = *std::min_element(n.begin(), n.end());
  out.n_max = *std::max_element(n.begin(), n.end());
  if (out.n_min < 1) throw InvalidInput("level_set_prob_bound: levels must be positive");
  const auto size = static_cast<double>(lambda.size());
  out.capacity = equilibrium_solve(lambda, oracle).capacity;
  out.log_prefactor = size * std::log(c_d * out.n_max) + oracle.dim() * std::lgamma(size + 1.0);

  SiteList rest;
  for (const auto& z : lambda) {
    if (!z.is_origin()) rest.push_back(z);
  }
  const std::size_t m = rest.size();
  const LatticePoint origin(oracle.dim());
  auto hit = [&](const LatticePoint& from, const LatticePoint& to) {
    return hitting_probability(from, to, oracle).probability;
  };
  constexpr std::size_t kExact = 20;
  if (m == 0) {
    out.log_path_sum = 0.0;
  } else if (m <= kExact) {
    // Sum over orderings by dynamic programming over (visited set, last site).
    const std::size_t full = (std::size_t{1} << m) - 1;
    std::vector<double> dp((full + 1) * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) dp[(std::size_t{1} << i) * m + i] = hit(origin, rest[i]);
    std::vector<std::vector<double>> p(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) p[i][j] = hit(rest[i], rest[j]);
    }
    for (std::size_t mask = 1; mask <= full; ++mask) {
      for (std::size_t last = 0; last < m; ++last) {
        const double v = dp[mask * m + last];
        if (v == 0.0) continue;
        for (std::size_t j = 0; j < m; ++j) {
          if (mask >> j & 1) continue;
          dp[(mask | std::size_t{1} << j) * m + j] += v * p[last][j];
        }
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += dp[full * m + i];
    out.log_path_sum = std::log(total);
  } else {
    // Upper bound: all length-m sequences without immediate repetition.
    out.exact_path_sum = false;
    Eigen::MatrixXd p(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    Eigen::RowVectorXd v(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
      v(static_cast<Eigen::Index>(i)) = hit(origin, rest[i]);
      for (std::size_t j = 0; j < m; ++j) {
        p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = i == j ? 0.0 : hit(rest[i], rest[j]);
      }
    }
    double log_scale = 0.0;
    for (std::size_t step = 1; step < m; ++step) {
      v = v * p;
      const double s = v.sum();
      log_scale += std::log(s);
      v /= s;
    }
    out.log_path_sum = log_scale + std::log(v.sum());
  }
  out.log_bound = out.log_prefactor - out.n_min * out.capacity + out.log_path_sum;
  return out;
}

IntersectionBounds intersection_bound_evaluators(int n, int m, int L, int dim, const IntersectionConstants& c) {
  if (n < 1 || m < 1 || L < 1) throw InvalidInput("intersection bounds: n, m, L must be >= 1");
  if (dim < 3) throw InvalidInput("intersection bounds: dimension must be >= 3");
  if (!(c.epsilon > 0.0 && c.epsilon < 2.0 / dim)) throw InvalidInput("intersection bounds: epsilon outside (0, 2/d)");
  if (!(c.c_upper > 0.0) || !(c.kappa > 0.0)) throw InvalidInput("intersection bounds: constants must be positive");
  const double d = dim;
  const double l = L;
  IntersectionBounds out;
  out.log_upper = l * std::log(c.c_upper * n * m) + 2.0 * d * std::lgamma(l + 1.0) -
                  c.kappa * (n + m) * std::pow(l, 1.0 - 2.0 / d);
  out.log_lower = -(n + m) * std::pow(l, 1.0 - 2.0 / d + c.epsilon);
  out.regime_ratio = (n + m) / std::pow(l, 2.0 / d);
  out.upper_regime = out.regime_ratio >= 10.0;
  return out;
}

// --- serialization -----------------------------------------------------------

namespace {

nlohmann::json coords(const LatticePoint& z) { return nlohmann::json(std::vector<int>(z.coords().begin(), z.coords().end())); }

LatticePoint point_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<LatticePoint::Coord>>();
  return LatticePoint::from_coords(v);
}

}  // namespace

nlohmann::json to_json(const EdgeOccupation& e) {
  nlohmann::json sites = nlohmann::json::array();
  for (const auto& z : e.sites) sites.push_back(coords(z));
  nlohmann::json counts = nlohmann::json::array();
  for (std::size_t x = 0; x < e.size(); ++x) {
    for (std::size_t y = 0; y < e.size(); ++y) {
      if (e.at(x, y) > 0) counts.push_back({coords(e.sites[x]), coords(e.sites[y]), e.at(x, y)});
    }
  }
  return {{"sites", sites},
          {"counts", counts},
          {"first", coords(e.sites.at(static_cast<std::size_t>(e.first)))},
          {"last", coords(e.sites.at(static_cast<std::size_t>(e.last)))}};
}

EdgeOccupation occupation_from_json(const nlohmann::json& j) {
  try {
    EdgeOccupation e;
    for (const auto& s : j.at("sites")) e.sites.push_back(point_from(s));
    const SiteList sorted = normalized(e.sites);
    if (sorted.size() != e.sites.size()) throw InvalidInput("occupation: duplicate sites");
    e.sites = sorted;
    e.counts.assign(e.size() * e.size(), 0);
    for (const auto& c : j.at("counts")) {
      const int x = e.index_of(point_from(c.at(0)));
      const int y = e.index_of(point_from(c.at(1)));
      if (x < 0 || y < 0) throw InvalidInput("occupation: edge endpoint outside the site list");
      e.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = c.at(2).get<std::uint32_t>();
    }
    e.first = e.index_of(point_from(j.at("first")));
    e.last = e.index_of(point_from(j.at("last")));
    if (e.first < 0 || e.last < 0) throw InvalidInput("occupation: first/last outside the site list");
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidInput(std::string("occupation json: ") + ex.what());
  }
}

nlohmann::json to_json(const TrailStock& t) {
  nlohmann::json trail = nlohmann::json::array();
  for (const auto& [x, y] : t.trail_edges()) {
    trail.push_back({coords(t.sites[static_cast<std::size_t>(x)]), coords(t.sites[static_cast<std::size_t>(y)])});
  }
  nlohmann::json stock = nlohmann::json::array();
  for (const auto& [x, y] : t.stock_edges()) {
    stock.push_back({coords(t.sites[static_cast<std::size_t>(x)]), coords(t.sites[static_cast<std::size_t>(y)]), 1});
  }
  return {{"trail", trail},
          {"stock", stock},
          {"certificate", {{"lhs", t.certificate_lhs}, {"rhs", t.certificate_rhs}, {"holds", t.holds}}}};
}

}  // namespace iltlab
