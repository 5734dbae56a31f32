#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/graph.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/macrostructure.hpp"

namespace bowtie {

//! Seeded generator with a platform-independent output sequence:
//! std::mt19937_64 (whose sequence the standard fixes) plus rejection
//! sampling for bounded integers, instead of the implementation-defined
//! standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  // Uniform in [lo, hi).
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo); }

  bool chance(std::uint64_t numerator, std::uint64_t denominator) { return below(denominator) < numerator; }

 private:
  std::mt19937_64 engine_;
};

//! Uniform simple digraph on nodes with IDs 0..n-1 and exactly m arcs.
//! Floyd's subset sampling over the n(n-1) possible arcs, so the result is a
//! pure function of (n, m, seed).
inline Graph random_digraph(std::uint32_t n, std::uint64_t m, std::uint64_t seed) {
  const std::uint64_t possible = std::uint64_t{n} * (n == 0 ? 0 : n - 1);
  if (m > possible)
    throw ContractViolation("random_digraph: " + std::to_string(m) + " arcs do not fit in a simple digraph on " +
                            std::to_string(n) + " nodes");
  Rng rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(m);
  for (std::uint64_t j = possible - m; j < possible; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> codes(chosen.begin(), chosen.end());
  std::sort(codes.begin(), codes.end());
  ArcList arcs;
  for (std::uint32_t u = 0; u < n; ++u) arcs.add_node(u);
  for (std::uint64_t code : codes) {
    const std::uint64_t u = code / (n - 1);
    const std::uint64_t r = code % (n - 1);
    arcs.add(u, r < u ? r : r + 1);
  }
  return build_graph<std::uint32_t>(std::move(arcs));
}

//! Sizes and shape of a planted macrostructure.
struct PlantSpec {
  std::array<std::uint64_t, kLabelCount> sizes{};
  // Random arcs added inside the LSC on top of its Hamiltonian cycle.
  std::uint64_t extra_lsc_arcs = 0;
  // Number of levels for IN, OUT, IN_TENDRILS and OUT_TENDRILS (capped by size).
  std::array<std::uint32_t, kLabelCount> depth{1, 1, 1, 1, 1, 1, 1, 1};
  // Arcs from each chained node to random nodes of the previous level.
  std::uint32_t fanout = 1;
  std::uint64_t seed = 1;

  std::uint64_t& size(ComponentLabel l) { return sizes[to_index(l)]; }
  std::uint64_t size(ComponentLabel l) const { return sizes[to_index(l)]; }
  std::uint64_t total() const { return std::accumulate(sizes.begin(), sizes.end(), std::uint64_t{0}); }
};

struct PlantedNode {
  ExternalId id;
  ComponentLabel label;
  std::uint32_t level;
  std::uint32_t level2;
};

//! Deterministic construction of a graph with a known macrostructure. The
//! LSC is a directed cycle plus extra internal arcs; everything else is
//! acyclic, so the LSC is the unique largest SCC whenever it has at least
//! two nodes. IN/OUT/tendrils are chains of levels, each node hooked to
//! `fanout` random nodes of the previous level; BRIDGES take one arc from IN
//! and give one to OUT; OTHER points into an IN-tendril (or, lacking those,
//! hangs off an OUT-tendril); DISCONNECTED nodes form short separate paths.
class BowtiePlanter {
 public:
  explicit BowtiePlanter(PlantSpec spec) : spec_(std::move(spec)) {
    validate();
    layout();
  }

  const PlantSpec& spec() const noexcept { return spec_; }
  // Planted nodes in construction order.
  const std::vector<PlantedNode>& nodes() const noexcept { return nodes_; }

  // Emits every planted arc (possibly with repeats) as f(src_id, dst_id).
  template <class F>
  void for_each_arc(F&& f) const {
    using L = ComponentLabel;
    Rng rng(spec_.seed ^ 0x9e3779b97f4a7c15ULL);
    auto id = [&](std::uint64_t local) { return nodes_[local].id; };
    auto pick = [&](const Range& r) { return r.first + rng.below(r.second - r.first); };

    const Range lsc = block(L::LSC);
    const std::uint64_t lsc_size = lsc.second - lsc.first;
    if (lsc_size >= 2) {
      for (std::uint64_t i = 0; i < lsc_size; ++i) f(id(lsc.first + i), id(lsc.first + (i + 1) % lsc_size));
      for (std::uint64_t e = 0; e < spec_.extra_lsc_arcs; ++e) {
        const std::uint64_t a = pick(lsc);
        std::uint64_t b = lsc.first + rng.below(lsc_size - 1);
        if (b >= a) ++b;
        f(id(a), id(b));
      }
    }

    // Chained sets: level 1 hangs off `anchor`, level k off level k-1.
    auto chain = [&](L label, const Range& anchor, bool toward_anchor) {
      const auto& levels = levels_[to_index(label)];
      for (std::size_t k = 0; k < levels.size(); ++k) {
        const Range parent = k == 0 ? anchor : levels[k - 1];
        for (std::uint64_t x = levels[k].first; x < levels[k].second; ++x) {
          for (std::uint32_t j = 0; j < spec_.fanout; ++j) {
            const std::uint64_t p = pick(parent);
            if (toward_anchor) {
              f(id(x), id(p));
            } else {
              f(id(p), id(x));
            }
          }
        }
      }
    };
    chain(L::OUT, lsc, false);
    chain(L::IN, lsc, true);
    chain(L::IN_TENDRILS, block(L::IN), false);
    chain(L::OUT_TENDRILS, block(L::OUT), true);

    const Range bridges = block(L::BRIDGES);
    for (std::uint64_t x = bridges.first; x < bridges.second; ++x) {
      f(id(pick(block(L::IN))), id(x));
      f(id(x), id(pick(block(L::OUT))));
    }
    const Range other = block(L::OTHER);
    for (std::uint64_t x = other.first; x < other.second; ++x) {
      if (spec_.size(L::IN_TENDRILS) > 0) {
        f(id(x), id(pick(block(L::IN_TENDRILS))));
      } else {
        f(id(pick(block(L::OUT_TENDRILS))), id(x));
      }
    }
    const Range disc = block(L::DISCONNECTED);
    if (lsc_size >= 2) {
      for (std::uint64_t x = disc.first; x < disc.second; ++x)
        if ((x - disc.first) % 3 != 2 && x + 1 < disc.second) f(id(x), id(x + 1));
    }
  }

 private:
  using Range = std::pair<std::uint64_t, std::uint64_t>;

  void validate() const {
    using L = ComponentLabel;
    const PlantSpec& s = spec_;
    const bool attached = s.size(L::OUT) + s.size(L::IN) + s.size(L::IN_TENDRILS) + s.size(L::OUT_TENDRILS) +
                              s.size(L::BRIDGES) + s.size(L::OTHER) > 0;
    if (attached && s.size(L::LSC) < 2) throw ContractViolation("plant: LSC needs at least 2 nodes");
    if (s.size(L::DISCONNECTED) > 0 && s.size(L::LSC) < 1) throw ContractViolation("plant: DISCONNECTED needs an LSC");
    if ((s.size(L::IN_TENDRILS) > 0 || s.size(L::BRIDGES) > 0) && s.size(L::IN) == 0)
      throw ContractViolation("plant: IN_TENDRILS and BRIDGES need IN nodes");
    if ((s.size(L::OUT_TENDRILS) > 0 || s.size(L::BRIDGES) > 0) && s.size(L::OUT) == 0)
      throw ContractViolation("plant: OUT_TENDRILS and BRIDGES need OUT nodes");
    if (s.size(L::OTHER) > 0 && s.size(L::IN_TENDRILS) == 0 && s.size(L::OUT_TENDRILS) == 0)
      throw ContractViolation("plant: OTHER needs IN_TENDRILS or OUT_TENDRILS nodes");
    if (s.fanout == 0) throw ContractViolation("plant: fanout must be at least 1");
    if (s.total() >= Graph::kNone) throw ContractViolation("plant: too many nodes");
  }

  Range block(ComponentLabel l) const { return blocks_[to_index(l)]; }

  void layout() {
    using L = ComponentLabel;
    const std::uint64_t n = spec_.total();
    std::uint64_t next = 0;
    for (L l : kAllLabels) {
      blocks_[to_index(l)] = {next, next + spec_.size(l)};
      next += spec_.size(l);
    }
    for (L l : {L::IN, L::OUT, L::IN_TENDRILS, L::OUT_TENDRILS}) {
      const std::uint64_t size = spec_.size(l);
      const std::uint64_t depth = std::min<std::uint64_t>(std::max<std::uint32_t>(spec_.depth[to_index(l)], 1), size);
      std::uint64_t start = block(l).first;
      for (std::uint64_t k = 0; k < depth; ++k) {
        const std::uint64_t count = size / depth + (k < size % depth ? 1 : 0);
        levels_[to_index(l)].push_back({start, start + count});
        start += count;
      }
    }

    // External IDs: a seeded permutation of 1..n, unless the LSC is a single
    // node, which must then own the smallest ID to win the size tie.
    std::vector<ExternalId> ids(n);
    std::iota(ids.begin(), ids.end(), ExternalId{1});
    if (spec_.size(L::LSC) >= 2) {
      Rng rng(spec_.seed);
      for (std::uint64_t i = n; i > 1; --i) std::swap(ids[i - 1], ids[rng.below(i)]);
    }

    nodes_.resize(n);
    for (L l : kAllLabels) {
      const Range r = block(l);
      for (std::uint64_t x = r.first; x < r.second; ++x)
        nodes_[x] = PlantedNode{ids[x], l, Classification::kNoLevel, Classification::kNoLevel};
    }
    for (L l : {L::IN, L::OUT, L::IN_TENDRILS, L::OUT_TENDRILS}) {
      const auto& levels = levels_[to_index(l)];
      for (std::size_t k = 0; k < levels.size(); ++k)
        for (std::uint64_t x = levels[k].first; x < levels[k].second; ++x)
          nodes_[x].level = static_cast<std::uint32_t>(k + 1);
    }
    for (std::uint64_t x = block(L::BRIDGES).first; x < block(L::BRIDGES).second; ++x) {
      nodes_[x].level = 1;
      nodes_[x].level2 = 1;
    }
  }

  PlantSpec spec_;
  std::array<Range, kLabelCount> blocks_{};
  std::array<std::vector<Range>, kLabelCount> levels_{};
  std::vector<PlantedNode> nodes_;
};

struct PlantedGraph {
  Graph graph;
  // The planted labels and levels, indexed like `graph`.
  Classification expected;
};

Classification oracle_classify(const Graph& g);

inline constexpr std::uint32_t kOracleMaxNodes = 5000;

//! Builds the planted graph and its expected classification. Instances of
//! at most kOracleMaxNodes nodes are also confirmed against the oracle.
inline PlantedGraph planted_bowtie(const PlantSpec& spec) {
  BowtiePlanter planter(spec);
  ArcList arcs;
  for (const PlantedNode& node : planter.nodes()) arcs.add_node(node.id);
  planter.for_each_arc([&](ExternalId u, ExternalId v) { arcs.add(u, v); });
  PlantedGraph out{build_graph<std::uint32_t>(std::move(arcs)), {}};
  const std::uint32_t n = out.graph.node_count();
  out.expected.label.resize(n);
  out.expected.level.resize(n);
  out.expected.level2.resize(n);
  for (const PlantedNode& node : planter.nodes()) {
    const std::uint32_t u = *out.graph.find(node.id);
    out.expected.label[u] = node.label;
    out.expected.level[u] = node.level;
    out.expected.level2[u] = node.level2;
  }
  // Every node outside the LSC is its own SCC, so under canonical numbering
  // the LSC's component id equals the index of its first member.
  for (std::uint32_t u = 0; u < n; ++u) {
    if (out.expected.label[u] == ComponentLabel::LSC) {
      out.expected.lsc_component = u;
      break;
    }
  }
  if (n > 0 && n <= kOracleMaxNodes) {
    const Classification oracle = oracle_classify(out.graph);
    if (oracle.label != out.expected.label || oracle.level != out.expected.level ||
        oracle.level2 != out.expected.level2)
      throw ContractViolation("planted_bowtie: oracle disagrees with the planted labels");
  }
  return out;
}

//! Self-consistent synthetic metadata: API degrees equal graph degrees,
//! creation dates uniform between 2006-03-21 and 2012-07-31.
inline std::vector<NodeMeta> synthetic_metadata(const Graph& g, std::uint64_t seed) {
  using namespace std::chrono;
  Rng rng(seed ^ 0x5bd1e995ULL);
  const auto first = sys_days{year{2006} / March / 21};
  const auto last = sys_days{year{2012} / July / 31};
  const auto span = static_cast<std::uint64_t>((last - first).count()) + 1;
  std::vector<NodeMeta> meta(g.node_count());
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    NodeMeta& m = meta[u];
    m.has_record = true;
    m.created_at = Date{first + days{static_cast<int>(rng.below(span))}};
    m.tweet_count = rng.chance(1, 4) ? 0 : rng.below(1000);
    m.api_followers = g.in_degree(u);
    m.api_followings = g.out_degree(u);
    m.status = rng.chance(1, 100) ? AccountStatus::suspended : AccountStatus::active;
    m.verified = rng.chance(1, 1000);
  }
  return meta;
}

// The 11-node, 11-arc instance exercising every component:
// LSC {1,2}, OUT {3}, IN {4}, IN_TENDRILS {5}, OUT_TENDRILS {6,8},
// BRIDGES {7}, OTHER {9}, DISCONNECTED {10,11}.
inline std::vector<Arc> canon11_arcs() {
  return {{1, 2}, {2, 1}, {1, 3}, {4, 1}, {4, 5}, {4, 7}, {7, 3}, {6, 3}, {8, 6}, {9, 5}, {10, 11}};
}

inline PlantSpec canon11_spec(std::uint64_t seed = 1) {
  using L = ComponentLabel;
  PlantSpec spec;
  spec.size(L::LSC) = 2;
  spec.size(L::OUT) = 1;
  spec.size(L::IN) = 1;
  spec.size(L::IN_TENDRILS) = 1;
  spec.size(L::OUT_TENDRILS) = 2;
  spec.size(L::BRIDGES) = 1;
  spec.size(L::OTHER) = 1;
  spec.size(L::DISCONNECTED) = 2;
  spec.depth[to_index(L::OUT_TENDRILS)] = 2;
  spec.seed = seed;
  return spec;
}

//! Brute-force classification straight from the set definitions, for
//! differential testing. Builds its own adjacency, finds SCCs as
//! mutual-reachability classes of a full reachability matrix, takes levels
//! from all-pairs distances between classes, and decides OTHER by undirected
//! connectivity to any categorized node (union-find). Refuses graphs above
//! kOracleMaxNodes nodes.
inline Classification oracle_classify(const Graph& g) {
  using L = ComponentLabel;
  const std::size_t n = g.node_count();
  if (n > kOracleMaxNodes) throw ContractViolation("oracle_classify: graph too large for the oracle");
  Classification out;
  if (n == 0) return out;

  std::vector<std::vector<std::size_t>> fwd(n);
  g.for_each_arc([&](std::uint32_t u, std::uint32_t v) { fwd[u].push_back(v); });

  // reach[u][v]: v reachable from u by a path of length >= 0.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> todo{s};
    reach[s][s] = true;
    while (!todo.empty()) {
      const std::size_t u = todo.back();
      todo.pop_back();
      for (std::size_t v : fwd[u])
        if (!reach[s][v]) {
          reach[s][v] = true;
          todo.push_back(v);
        }
    }
  }

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cls(n, kNone);
  std::vector<std::size_t> class_size;
  for (std::size_t u = 0; u < n; ++u) {
    if (cls[u] != kNone) continue;
    const std::size_t id = class_size.size();
    class_size.push_back(0);
    for (std::size_t v = u; v < n; ++v)
      if (reach[u][v] && reach[v][u]) {
        cls[v] = id;
        ++class_size[id];
      }
  }
  const std::size_t k = class_size.size();
  std::size_t lsc = 0;
  for (std::size_t c = 0; c < k; ++c)
    if (class_size[c] > class_size[lsc]) lsc = c;
  std::size_t lsc_member = 0;
  while (cls[lsc_member] != lsc) ++lsc_member;

  std::vector<L> label(n, L::DISCONNECTED);
  std::vector<bool> categorized(n, false);
  std::vector<bool> in_set(n, false), out_set(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (cls[v] == lsc) {
      label[v] = L::LSC;
    } else if (reach[lsc_member][v]) {
      label[v] = L::OUT;
      out_set[v] = true;
    } else if (reach[v][lsc_member]) {
      label[v] = L::IN;
      in_set[v] = true;
    } else {
      continue;
    }
    categorized[v] = true;
  }
  std::vector<bool> from_in(n, false), to_out(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (categorized[v]) continue;
    for (std::size_t w = 0; w < n; ++w) {
      if (in_set[w] && reach[w][v]) from_in[v] = true;
      if (out_set[w] && reach[v][w]) to_out[v] = true;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (categorized[v]) continue;
    if (from_in[v] && to_out[v]) {
      label[v] = L::BRIDGES;
    } else if (from_in[v]) {
      label[v] = L::IN_TENDRILS;
    } else if (to_out[v]) {
      label[v] = L::OUT_TENDRILS;
    } else {
      continue;
    }
    categorized[v] = true;
  }

  // Undirected connectivity by union-find over the raw arcs.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : fwd[u]) parent[root(u)] = root(v);
  std::vector<bool> touches_categorized(n, false);
  for (std::size_t v = 0; v < n; ++v)
    if (categorized[v]) touches_categorized[root(v)] = true;
  for (std::size_t v = 0; v < n; ++v)
    if (!categorized[v] && touches_categorized[root(v)]) label[v] = L::OTHER;

  // All-pairs class distances (hops in the condensation).
  constexpr std::uint32_t kFar = Classification::kNoLevel;
  std::vector<std::vector<std::size_t>> class_adj(k);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : fwd[u])
      if (cls[u] != cls[v]) class_adj[cls[u]].push_back(cls[v]);
  std::vector<std::vector<std::uint32_t>> dist(k, std::vector<std::uint32_t>(k, kFar));
  for (std::size_t s = 0; s < k; ++s) {
    std::vector<std::size_t> queue{s};
    dist[s][s] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t c = queue[head];
      for (std::size_t d : class_adj[c])
        if (dist[s][d] == kFar) {
          dist[s][d] = dist[s][c] + 1;
          queue.push_back(d);
        }
    }
  }
  std::vector<bool> in_class(k, false), out_class(k, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (label[v] == L::IN) in_class[cls[v]] = true;
    if (label[v] == L::OUT) out_class[cls[v]] = true;
  }
  auto nearest_from_in = [&](std::size_t c) {
    std::uint32_t best = kFar;
    for (std::size_t a = 0; a < k; ++a)
      if (in_class[a]) best = std::min(best, dist[a][c]);
    return best;
  };
  auto nearest_to_out = [&](std::size_t c) {
    std::uint32_t best = kFar;
    for (std::size_t b = 0; b < k; ++b)
      if (out_class[b]) best = std::min(best, dist[c][b]);
    return best;
  };

  out.label = label;
  out.level.assign(n, kFar);
  out.level2.assign(n, kFar);
  out.lsc_component = lsc;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t c = cls[v];
    switch (label[v]) {
      case L::OUT: out.level[v] = dist[lsc][c]; break;
      case L::IN: out.level[v] = dist[c][lsc]; break;
      case L::IN_TENDRILS: out.level[v] = nearest_from_in(c); break;
      case L::OUT_TENDRILS: out.level[v] = nearest_to_out(c); break;
      case L::BRIDGES:
        out.level[v] = nearest_from_in(c);
        out.level2[v] = nearest_to_out(c);
        break;
      default: break;
    }
  }
  return out;
}

struct OracleCheckResult {
  std::uint64_t trials = 0;
  std::uint64_t matched = 0;
  // Seed of the first disagreeing instance, for reproduction.
  std::optional<std::uint64_t> first_mismatch_seed;
};

//! Differential test of the production pipeline against oracle_classify on
//! seeded random digraphs: n uniform in [2, max_n], density m/n cycling
//! through 0.5, 1, 2 and 4 (capped at the simple-digraph maximum). Labels and
//! levels must agree exactly.
inline OracleCheckResult oracle_check(std::uint64_t trials, std::uint32_t max_n, std::uint64_t seed) {
  require(max_n >= 2 && max_n <= kOracleMaxNodes, "oracle_check: max_n must be in [2, 5000]");
  constexpr std::array<double, 4> kDensities = {0.5, 1.0, 2.0, 4.0};
  Rng rng(seed);
  OracleCheckResult r;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto n = static_cast<std::uint32_t>(2 + rng.below(max_n - 1));
    const std::uint64_t cap = std::uint64_t{n} * (n - 1);
    const auto m = std::min<std::uint64_t>(cap, static_cast<std::uint64_t>(kDensities[t % 4] * n + 0.5));
    const std::uint64_t instance_seed = rng.next();
    const Graph g = random_digraph(n, m, instance_seed);
    const Classification got = decompose(g);
    const Classification want = oracle_classify(g);
    ++r.trials;
    if (got.label == want.label && got.level == want.level && got.level2 == want.level2) {
      ++r.matched;
    } else if (!r.first_mismatch_seed) {
      r.first_mismatch_seed = instance_seed;
    }
  }
  return r;
}

}  // namespace bowtie
