#pragma once

#include <algorithm>
#include <cstdint>
#include <new>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bowtie/error.hpp"
#include "bowtie/graph.hpp"

namespace bowtie {

//! Strongly connected components of a graph. Component ids are canonical:
//! components are numbered in increasing order of their smallest member
//! index, so component 0 always contains node 0.
template <class Index = std::uint32_t>
struct SccPartition {
  std::vector<Index> component_of;
  std::vector<std::uint64_t> component_sizes;

  Index component_count() const noexcept { return static_cast<Index>(component_sizes.size()); }
  Index node_count() const noexcept { return static_cast<Index>(component_of.size()); }
};

// Tarjan's algorithm driven by an explicit frame stack, so path length is
// bounded by heap memory instead of the call stack.
template <class Index>
SccPartition<Index> compute_scc(const Digraph<Index>& g) {
  constexpr Index kUnvisited = Digraph<Index>::kNone;
  const Index n = g.node_count();
  SccPartition<Index> out;
  try {
    std::vector<Index> order(n, kUnvisited);  // discovery index
    std::vector<Index> low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<Index> scc_stack;
    struct Frame {
      Index node;
      std::uint64_t next;  // position in the out-target array
    };
    std::vector<Frame> frames;
    const auto offsets = g.out_offsets();
    const auto targets = g.out_targets();

    // Raw component ids are in completion order; they get renumbered below.
    std::vector<Index>& raw = out.component_of;
    raw.assign(n, kUnvisited);
    Index next_order = 0;
    Index raw_count = 0;

    auto discover = [&](Index v) {
      order[v] = low[v] = next_order++;
      scc_stack.push_back(v);
      on_stack[v] = true;
      frames.push_back(Frame{v, offsets[v]});
    };

    for (Index root = 0; root < n; ++root) {
      if (order[root] != kUnvisited) continue;
      discover(root);
      while (!frames.empty()) {
        Frame& f = frames.back();
        const Index u = f.node;
        if (f.next < offsets[std::size_t{u} + 1]) {
          const Index v = targets[f.next++];
          if (order[v] == kUnvisited) {
            discover(v);  // invalidates f
          } else if (on_stack[v]) {
            low[u] = std::min(low[u], order[v]);
          }
          continue;
        }
        frames.pop_back();
        if (low[u] == order[u]) {
          Index w;
          do {
            w = scc_stack.back();
            scc_stack.pop_back();
            on_stack[w] = false;
            raw[w] = raw_count;
          } while (w != u);
          ++raw_count;
        }
        if (!frames.empty()) {
          const Index parent = frames.back().node;
          low[parent] = std::min(low[parent], low[u]);
        }
      }
    }

    std::vector<Index> canonical(raw_count, kUnvisited);
    Index next_id = 0;
    out.component_sizes.assign(raw_count, 0);
    for (Index u = 0; u < n; ++u) {
      Index& c = canonical[raw[u]];
      if (c == kUnvisited) c = next_id++;
      raw[u] = c;
      ++out.component_sizes[c];
    }
  } catch (const std::bad_alloc&) {
    throw ResourceError("compute_scc", "out of memory");
  }
  return out;
}

//! Condensation of a graph: one super-node per SCC, arcs between distinct
//! SCCs merged into a single arc weighted by how many original arcs it
//! replaces. Forward runs are sorted by target; a reverse view (unweighted)
//! is kept for backward traversals.
template <class Index = std::uint32_t>
struct CondensedDag {
  std::vector<std::uint64_t> original_sizes;
  std::vector<std::uint64_t> out_offsets;
  std::vector<Index> out_targets;
  std::vector<std::uint64_t> weights;
  std::vector<std::uint64_t> in_offsets;
  std::vector<Index> in_targets;
  // Original arcs whose endpoints share a component.
  std::uint64_t intra_arcs = 0;

  Index node_count() const noexcept { return static_cast<Index>(original_sizes.size()); }
  std::uint64_t arc_count() const noexcept { return out_targets.size(); }

  std::span<const Index> successors(Index c) const noexcept {
    return {out_targets.data() + out_offsets[c], out_targets.data() + out_offsets[c + 1]};
  }
  std::span<const std::uint64_t> successor_weights(Index c) const noexcept {
    return {weights.data() + out_offsets[c], weights.data() + out_offsets[c + 1]};
  }
  std::span<const Index> predecessors(Index c) const noexcept {
    return {in_targets.data() + in_offsets[c], in_targets.data() + in_offsets[c + 1]};
  }

  std::uint64_t total_weight() const noexcept {
    return std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  }
};

template <class Index>
CondensedDag<Index> condense(const Digraph<Index>& g, const SccPartition<Index>& p) {
  require(p.node_count() == g.node_count(), "condense: partition does not match graph");
  const Index n = g.node_count();
  const Index c = p.component_count();
  CondensedDag<Index> dag;
  try {
    dag.original_sizes = p.component_sizes;
    std::vector<std::uint64_t> raw_offsets(std::size_t{c} + 1, 0);
    for (Index u = 0; u < n; ++u) {
      const Index cu = p.component_of[u];
      for (Index v : g.out_neighbors(u)) {
        if (p.component_of[v] == cu) {
          ++dag.intra_arcs;
        } else {
          ++raw_offsets[std::size_t{cu} + 1];
        }
      }
    }
    std::partial_sum(raw_offsets.begin(), raw_offsets.end(), raw_offsets.begin());
    std::vector<Index> raw(raw_offsets.back());
    {
      std::vector<std::uint64_t> cursor(raw_offsets.begin(), raw_offsets.end() - 1);
      for (Index u = 0; u < n; ++u) {
        const Index cu = p.component_of[u];
        for (Index v : g.out_neighbors(u)) {
          const Index cv = p.component_of[v];
          if (cv != cu) raw[cursor[cu]++] = cv;
        }
      }
    }

    // Run-length encode each sorted run into (target, weight), compacting
    // `raw` in place into the final target array.
    auto run = [&](Index cu) {
      return std::pair{raw.begin() + static_cast<std::ptrdiff_t>(raw_offsets[cu]),
                       raw.begin() + static_cast<std::ptrdiff_t>(raw_offsets[std::size_t{cu} + 1])};
    };
    std::uint64_t distinct = 0;
    for (Index cu = 0; cu < c; ++cu) {
      auto [first, last] = run(cu);
      std::sort(first, last);
      for (auto it = first; it != last; ++it)
        if (it == first || *it != *(it - 1)) ++distinct;
    }
    dag.weights.resize(distinct);
    dag.out_offsets.assign(std::size_t{c} + 1, 0);
    std::uint64_t write = 0;
    for (Index cu = 0; cu < c; ++cu) {
      auto [first, last] = run(cu);
      dag.out_offsets[cu] = write;
      for (auto it = first; it != last;) {
        const Index target = *it;
        auto run_end = std::find_if(it, last, [&](Index x) { return x != target; });
        dag.weights[write] = static_cast<std::uint64_t>(run_end - it);
        raw[write++] = target;
        it = run_end;
      }
    }
    dag.out_offsets[c] = write;
    raw.resize(write);
    raw.shrink_to_fit();
    dag.out_targets = std::move(raw);

    dag.in_offsets.assign(std::size_t{c} + 1, 0);
    for (Index t : dag.out_targets) ++dag.in_offsets[std::size_t{t} + 1];
    std::partial_sum(dag.in_offsets.begin(), dag.in_offsets.end(), dag.in_offsets.begin());
    dag.in_targets.resize(dag.out_targets.size());
    std::vector<std::uint64_t> cursor(dag.in_offsets.begin(), dag.in_offsets.end() - 1);
    for (Index cu = 0; cu < c; ++cu)
      for (Index t : dag.successors(cu)) dag.in_targets[cursor[t]++] = cu;
  } catch (const std::bad_alloc&) {
    throw ResourceError("condense", "out of memory");
  }
  return dag;
}

// Kahn's algorithm. Empty when the super-graph has a cycle (which a correct
// condensation never does).
template <class Index>
std::optional<std::vector<Index>> topological_order(const CondensedDag<Index>& dag) {
  const Index c = dag.node_count();
  std::vector<std::uint64_t> remaining(c);
  std::vector<Index> order;
  order.reserve(c);
  for (Index v = 0; v < c; ++v) {
    remaining[v] = dag.in_offsets[std::size_t{v} + 1] - dag.in_offsets[v];
    if (remaining[v] == 0) order.push_back(v);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (Index w : dag.successors(order[head]))
      if (--remaining[w] == 0) order.push_back(w);
  }
  if (order.size() != c) return std::nullopt;
  return order;
}

template <class Index>
bool is_acyclic(const CondensedDag<Index>& dag) {
  return topological_order(dag).has_value();
}

}  // namespace bowtie
