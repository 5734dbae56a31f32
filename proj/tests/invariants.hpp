#pragma once

#include <numeric>
#include <string>

#include "bowtie/bowtie.hpp"

namespace bowtie::testing {

// Checks the structural laws every classification must satisfy. Returns an
// empty string when all hold, otherwise a description of the first failure.
inline std::string check_invariants(const Graph& g, const Classification& c) {
  using L = ComponentLabel;
  const std::uint32_t n = g.node_count();
  if (c.node_count() != n) return "classification size differs from N";
  const auto counts = c.counts();
  if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) != n) return "label counts do not sum to N";

  const auto p = compute_scc(g);
  const auto dag = condense(g, p);
  if (!is_acyclic(dag)) return "condensation has a cycle";
  if (dag.total_weight() + dag.intra_arcs != g.arc_count()) return "condensation weights do not conserve M";

  MacroSummary s;
  try {
    s = arc_matrix(g, c);
  } catch (const ContractViolation& e) {
    return e.what();
  }
  if (s.matrix_total() != g.arc_count()) return "arc matrix does not sum to M";
  std::uint64_t followers = 0, followings = 0;
  for (ComponentLabel l : kAllLabels) {
    followers += s.follower_arcs[to_index(l)];
    followings += s.following_arcs[to_index(l)];
  }
  if (followers != g.arc_count() || followings != g.arc_count()) return "degree sums do not equal M";
  if (n == 0) return c.empty() ? "" : "empty graph with an LSC";

  // LSC is exactly the largest SCC, smallest index on ties.
  const std::uint64_t largest = *std::max_element(p.component_sizes.begin(), p.component_sizes.end());
  std::uint32_t lsc = 0;
  while (p.component_sizes[lsc] != largest) ++lsc;
  for (std::uint32_t u = 0; u < n; ++u)
    if ((c.label[u] == L::LSC) != (p.component_of[u] == lsc)) return "LSC is not the largest SCC";

  // Levels: whole SCCs share a label and level; each level is one more than
  // the best neighbour in the growth direction.
  const std::uint32_t cc = dag.node_count();
  std::vector<std::uint32_t> rep(cc, Digraph<std::uint32_t>::kNone);
  for (std::uint32_t u = 0; u < n; ++u) {
    std::uint32_t& r = rep[p.component_of[u]];
    if (r == Digraph<std::uint32_t>::kNone) {
      r = u;
    } else if (c.label[r] != c.label[u] || c.level[r] != c.level[u] || c.level2[r] != c.level2[u]) {
      return "SCC members disagree on label or level";
    }
  }
  auto label_of = [&](std::uint32_t k) { return c.label[rep[k]]; };
  constexpr std::uint32_t kNo = Classification::kNoLevel;
  // Distance of component k within the forward set grown from IN.
  auto from_in = [&](std::uint32_t k) -> std::uint32_t {
    switch (label_of(k)) {
      case L::IN: return 0;
      case L::IN_TENDRILS:
      case L::BRIDGES: return c.level[rep[k]];
      default: return kNo;
    }
  };
  auto to_out = [&](std::uint32_t k) -> std::uint32_t {
    switch (label_of(k)) {
      case L::OUT: return 0;
      case L::OUT_TENDRILS: return c.level[rep[k]];
      case L::BRIDGES: return c.level2[rep[k]];
      default: return kNo;
    }
  };
  auto out_dist = [&](std::uint32_t k) -> std::uint32_t {
    return label_of(k) == L::LSC ? 0 : label_of(k) == L::OUT ? c.level[rep[k]] : kNo;
  };
  auto in_dist = [&](std::uint32_t k) -> std::uint32_t {
    return label_of(k) == L::LSC ? 0 : label_of(k) == L::IN ? c.level[rep[k]] : kNo;
  };
  auto best = [&](std::span<const std::uint32_t> nbrs, auto&& dist) {
    std::uint32_t m = kNo;
    for (std::uint32_t k : nbrs) m = std::min(m, dist(k));
    return m;
  };
  for (std::uint32_t k = 0; k < cc; ++k) {
    const std::uint32_t u = rep[k];
    const L l = c.label[u];
    const bool levelled = l == L::IN || l == L::OUT || l == L::IN_TENDRILS || l == L::OUT_TENDRILS || l == L::BRIDGES;
    if (levelled != (c.level[u] != kNo)) return "level presence does not match label";
    if ((l == L::BRIDGES) != (c.level2[u] != kNo)) return "level2 presence does not match label";
    std::uint32_t want = kNo;
    std::uint32_t want2 = kNo;
    switch (l) {
      case L::OUT: want = best(dag.predecessors(k), out_dist); break;
      case L::IN: want = best(dag.successors(k), in_dist); break;
      case L::IN_TENDRILS: want = best(dag.predecessors(k), from_in); break;
      case L::OUT_TENDRILS: want = best(dag.successors(k), to_out); break;
      case L::BRIDGES:
        want = best(dag.predecessors(k), from_in);
        want2 = best(dag.successors(k), to_out);
        break;
      default: continue;
    }
    if (want == kNo || c.level[u] != want + 1) return "level of node " + std::to_string(g.external_id(u)) + " unsound";
    if (l == L::BRIDGES && (want2 == kNo || c.level2[u] != want2 + 1))
      return "level2 of node " + std::to_string(g.external_id(u)) + " unsound";
  }
  return "";
}

}  // namespace bowtie::testing
