#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <limits>
#include <new>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bowtie/error.hpp"

namespace bowtie {

// Account/node identifier as it appears in input files. No density or
// ordering is assumed.
using ExternalId = std::uint64_t;

struct Arc {
  ExternalId src;
  ExternalId dst;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

enum class Direction { in, out };

// Append-only arc storage in fixed-size chunks, so growth never needs a
// second copy of the whole list. Also carries node IDs that must exist even
// without arcs (adjacency lines such as "3:", metadata-only accounts).
class ArcList {
 public:
  static constexpr std::size_t kChunk = std::size_t{1} << 22;

  void add(ExternalId src, ExternalId dst) {
    if (chunks_.empty() || chunks_.back().size() == kChunk) {
      chunks_.emplace_back();
      // The first chunk grows geometrically so small inputs stay small.
      if (chunks_.size() > 1) chunks_.back().reserve(kChunk);
    }
    chunks_.back().push_back(Arc{src, dst});
    ++size_;
  }

  void add_node(ExternalId id) { nodes_.push_back(id); }

  // Moves the other list's chunks to the end of this one.
  void append(ArcList&& other) {
    for (auto& chunk : other.chunks_) {
      if (!chunk.empty()) chunks_.push_back(std::move(chunk));
    }
    nodes_.insert(nodes_.end(), other.nodes_.begin(), other.nodes_.end());
    size_ += other.size_;
    other.clear();
  }

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0 && nodes_.empty(); }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& chunk : chunks_)
      for (const Arc& a : chunk) f(a);
  }

  std::vector<Arc> to_vector() const {
    std::vector<Arc> out;
    out.reserve(size_);
    for_each([&](const Arc& a) { out.push_back(a); });
    return out;
  }

  std::vector<std::vector<Arc>>& chunks() noexcept { return chunks_; }
  const std::vector<std::vector<Arc>>& chunks() const noexcept { return chunks_; }
  std::vector<ExternalId>& nodes() noexcept { return nodes_; }
  const std::vector<ExternalId>& nodes() const noexcept { return nodes_; }

  void clear() {
    chunks_.clear();
    nodes_.clear();
    size_ = 0;
  }

 private:
  std::vector<std::vector<Arc>> chunks_;
  std::vector<ExternalId> nodes_;
  std::size_t size_ = 0;
};

// What the builder threw away.
struct BuildStats {
  std::uint64_t input_arcs = 0;
  std::uint64_t dropped_duplicates = 0;
  std::uint64_t dropped_self_loops = 0;
};

template <class Index>
class Digraph;

template <class Index>
Digraph<Index> build_graph(ArcList&& arcs);

//! Immutable directed graph in compressed sparse row form, with forward
//! (followings) and reverse (followers) adjacency. Internal indices are dense
//! in [0, N) and ordered by external ID, so the layout is a pure function of
//! the arc set. An arc (u, v) means "u follows v".
//! \tparam Index unsigned integer wide enough for N; uint32_t covers ~4e9 nodes.
template <class Index = std::uint32_t>
class Digraph {
  static_assert(std::is_unsigned_v<Index>);

 public:
  using index_type = Index;
  static constexpr Index kNone = std::numeric_limits<Index>::max();

  Digraph() : out_offsets_(1, 0), in_offsets_(1, 0) {}

  Index node_count() const noexcept { return static_cast<Index>(ids_.size()); }
  std::uint64_t arc_count() const noexcept { return out_targets_.size(); }

  std::span<const Index> out_neighbors(Index u) const noexcept {
    return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
  }
  std::span<const Index> in_neighbors(Index u) const noexcept {
    return {in_targets_.data() + in_offsets_[u], in_targets_.data() + in_offsets_[u + 1]};
  }
  std::uint64_t out_degree(Index u) const noexcept { return out_offsets_[u + 1] - out_offsets_[u]; }
  std::uint64_t in_degree(Index u) const noexcept { return in_offsets_[u + 1] - in_offsets_[u]; }

  // Checked accessor: in = followers, out = followings.
  std::uint64_t degree(Index u, Direction dir) const {
    require(u < node_count(), "degree: node index out of range");
    return dir == Direction::out ? out_degree(u) : in_degree(u);
  }

  ExternalId external_id(Index u) const noexcept { return ids_[u]; }
  std::span<const ExternalId> external_ids() const noexcept { return ids_; }

  std::optional<Index> find(ExternalId id) const noexcept {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<Index>(it - ids_.begin());
  }

  std::span<const std::uint64_t> out_offsets() const noexcept { return out_offsets_; }
  std::span<const Index> out_targets() const noexcept { return out_targets_; }
  std::span<const std::uint64_t> in_offsets() const noexcept { return in_offsets_; }
  std::span<const Index> in_targets() const noexcept { return in_targets_; }

  const BuildStats& build_stats() const noexcept { return stats_; }

  template <class F>
  void for_each_arc(F&& f) const {
    for (Index u = 0; u < node_count(); ++u)
      for (Index v : out_neighbors(u)) f(u, v);
  }

  // Assembles a graph from sorted unique IDs and a forward CSR whose
  // per-source target runs are sorted and duplicate-free. The reverse view is
  // derived here.
  static Digraph from_forward(std::vector<ExternalId> ids, std::vector<std::uint64_t> out_offsets,
                              std::vector<Index> out_targets, BuildStats stats) {
    Digraph g;
    g.ids_ = std::move(ids);
    g.out_offsets_ = std::move(out_offsets);
    g.out_targets_ = std::move(out_targets);
    g.stats_ = stats;
    g.build_reverse();
    return g;
  }

 private:
  template <class I>
  friend Digraph<I> build_graph(ArcList&& arcs);

  void build_reverse() {
    const Index n = node_count();
    try {
      in_offsets_.assign(std::size_t{n} + 1, 0);
      for (Index v : out_targets_) ++in_offsets_[std::size_t{v} + 1];
      std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
      in_targets_.resize(out_targets_.size());
      std::vector<std::uint64_t> cursor(in_offsets_.begin(), in_offsets_.end() - 1);
      // Sources are visited in increasing order, so each reverse run ends up sorted.
      for (Index u = 0; u < n; ++u)
        for (Index v : out_neighbors(u)) in_targets_[cursor[v]++] = u;
    } catch (const std::bad_alloc&) {
      throw ResourceError("build_graph: reverse adjacency", "out of memory");
    }
  }

  std::vector<std::uint64_t> out_offsets_;
  std::vector<Index> out_targets_;
  std::vector<std::uint64_t> in_offsets_;
  std::vector<Index> in_targets_;
  std::vector<ExternalId> ids_;
  BuildStats stats_;
};

using Graph = Digraph<std::uint32_t>;

namespace detail {

// Sorted, duplicate-free union of every ID mentioned by the arc list.
inline std::vector<ExternalId> collect_ids(const ArcList& arcs) {
  std::vector<ExternalId> ids(arcs.nodes().begin(), arcs.nodes().end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<ExternalId> batch, merged;
  for (const auto& chunk : arcs.chunks()) {
    batch.clear();
    batch.reserve(chunk.size() * 2);
    for (const Arc& a : chunk) {
      batch.push_back(a.src);
      batch.push_back(a.dst);
    }
    std::sort(batch.begin(), batch.end());
    batch.erase(std::unique(batch.begin(), batch.end()), batch.end());
    merged.clear();
    merged.reserve(ids.size() + batch.size());
    std::set_union(ids.begin(), ids.end(), batch.begin(), batch.end(), std::back_inserter(merged));
    ids.swap(merged);
  }
  std::vector<ExternalId>().swap(merged);
  ids.shrink_to_fit();
  return ids;
}

// Maps external IDs to dense indices, with a shortcut when the IDs form one
// contiguous range.
template <class Index>
class IdIndexer {
 public:
  explicit IdIndexer(const std::vector<ExternalId>& ids)
      : ids_(ids), contiguous_(!ids.empty() && ids.back() - ids.front() + 1 == ids.size()) {}

  Index operator()(ExternalId id) const noexcept {
    if (contiguous_) return static_cast<Index>(id - ids_.front());
    return static_cast<Index>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
  }

 private:
  const std::vector<ExternalId>& ids_;
  bool contiguous_;
};

}  // namespace detail

//! Builds a graph from an arc multiset, consuming the list chunk by chunk.
//! Every endpoint and every declared node becomes a node. Self-loops and
//! duplicate arcs are dropped and counted in build_stats(). The result does
//! not depend on arc order.
template <class Index = std::uint32_t>
Digraph<Index> build_graph(ArcList&& arcs) {
  Digraph<Index> g;
  BuildStats stats;
  stats.input_arcs = arcs.size();
  const char* phase = "build_graph: id map";
  try {
    g.ids_ = detail::collect_ids(arcs);
    if (g.ids_.size() >= Digraph<Index>::kNone)
      throw ResourceError("build_graph: id map",
                          "node count " + std::to_string(g.ids_.size()) + " exceeds index width");
    const std::size_t n = g.ids_.size();
    detail::IdIndexer<Index> index_of(g.ids_);

    // Re-encode chunk by chunk into dense pairs, releasing the wide arcs as we go.
    phase = "build_graph: arc encoding";
    std::vector<std::vector<std::pair<Index, Index>>> dense;
    dense.reserve(arcs.chunks().size());
    for (auto& chunk : arcs.chunks()) {
      std::vector<std::pair<Index, Index>> out;
      out.reserve(chunk.size());
      for (const Arc& a : chunk) {
        if (a.src == a.dst) {
          ++stats.dropped_self_loops;
          continue;
        }
        out.emplace_back(index_of(a.src), index_of(a.dst));
      }
      std::vector<Arc>().swap(chunk);
      dense.push_back(std::move(out));
    }
    arcs.clear();

    phase = "build_graph: forward adjacency";
    g.out_offsets_.assign(n + 1, 0);
    for (const auto& chunk : dense)
      for (const auto& [u, v] : chunk) ++g.out_offsets_[std::size_t{u} + 1];
    std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
    g.out_targets_.resize(g.out_offsets_.back());
    {
      std::vector<std::uint64_t> cursor(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
      for (auto& chunk : dense) {
        for (const auto& [u, v] : chunk) g.out_targets_[cursor[u]++] = v;
        std::vector<std::pair<Index, Index>>().swap(chunk);
      }
    }
    dense.clear();

    // Sort each run and squeeze out duplicates in place.
    std::uint64_t write = 0;
    std::uint64_t run_begin = g.out_offsets_[0];
    for (std::size_t u = 0; u < n; ++u) {
      const std::uint64_t run_end = g.out_offsets_[u + 1];
      auto first = g.out_targets_.begin() + static_cast<std::ptrdiff_t>(run_begin);
      auto last = g.out_targets_.begin() + static_cast<std::ptrdiff_t>(run_end);
      std::sort(first, last);
      auto unique_end = std::unique(first, last);
      stats.dropped_duplicates += static_cast<std::uint64_t>(last - unique_end);
      g.out_offsets_[u] = write;
      write = static_cast<std::uint64_t>(
          std::copy(first, unique_end, g.out_targets_.begin() + static_cast<std::ptrdiff_t>(write)) -
          g.out_targets_.begin());
      run_begin = run_end;
    }
    g.out_offsets_[n] = write;
    g.out_targets_.resize(write);
    g.out_targets_.shrink_to_fit();
  } catch (const std::bad_alloc&) {
    throw ResourceError(phase, "out of memory");
  }
  g.stats_ = stats;
  g.build_reverse();
  return g;
}

template <class Index = std::uint32_t>
Digraph<Index> build_graph(std::span<const Arc> arcs, std::span<const ExternalId> extra_nodes = {}) {
  ArcList list;
  for (const Arc& a : arcs) list.add(a.src, a.dst);
  for (ExternalId id : extra_nodes) list.add_node(id);
  return build_graph<Index>(std::move(list));
}

//! Subgraph induced by the nodes satisfying `keep`. External IDs survive,
//! internal indices are re-densified in the same (ID) order.
template <class Index, class Keep>
Digraph<Index> induced_subgraph(const Digraph<Index>& g, Keep&& keep) {
  const Index n = g.node_count();
  std::vector<Index> remap(n, Digraph<Index>::kNone);
  std::vector<ExternalId> ids;
  for (Index u = 0; u < n; ++u) {
    if (keep(u)) {
      remap[u] = static_cast<Index>(ids.size());
      ids.push_back(g.external_id(u));
    }
  }
  std::vector<std::uint64_t> offsets(ids.size() + 1, 0);
  std::vector<Index> targets;
  for (Index u = 0; u < n; ++u) {
    if (remap[u] == Digraph<Index>::kNone) continue;
    for (Index v : g.out_neighbors(u))
      if (remap[v] != Digraph<Index>::kNone) targets.push_back(remap[v]);
    offsets[std::size_t{remap[u]} + 1] = targets.size();
  }
  BuildStats stats;
  stats.input_arcs = targets.size();
  return Digraph<Index>::from_forward(std::move(ids), std::move(offsets), std::move(targets), stats);
}

}  // namespace bowtie
