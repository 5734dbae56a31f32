#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bowtie/error.hpp"
#include "bowtie/graph.hpp"
#include "bowtie/scc.hpp"

namespace bowtie {

enum class ComponentLabel : std::uint8_t {
  LSC,
  IN,
  OUT,
  IN_TENDRILS,
  OUT_TENDRILS,
  BRIDGES,
  OTHER,
  DISCONNECTED,
};

inline constexpr std::size_t kLabelCount = 8;

inline constexpr std::array<ComponentLabel, kLabelCount> kAllLabels = {
    ComponentLabel::LSC,          ComponentLabel::IN,      ComponentLabel::OUT,
    ComponentLabel::IN_TENDRILS,  ComponentLabel::OUT_TENDRILS, ComponentLabel::BRIDGES,
    ComponentLabel::OTHER,        ComponentLabel::DISCONNECTED,
};

constexpr std::size_t to_index(ComponentLabel label) noexcept { return static_cast<std::size_t>(label); }

constexpr std::string_view label_name(ComponentLabel label) noexcept {
  constexpr std::array<std::string_view, kLabelCount> names = {
      "LSC", "IN", "OUT", "IN_TENDRILS", "OUT_TENDRILS", "BRIDGES", "OTHER", "DISCONNECTED"};
  return names[to_index(label)];
}

inline std::optional<ComponentLabel> parse_label(std::string_view name) noexcept {
  for (ComponentLabel l : kAllLabels)
    if (label_name(l) == name) return l;
  return std::nullopt;
}

// Labels whose nodes carry a level.
constexpr bool has_level(ComponentLabel label) noexcept {
  return label == ComponentLabel::IN || label == ComponentLabel::OUT ||
         label == ComponentLabel::IN_TENDRILS || label == ComponentLabel::OUT_TENDRILS ||
         label == ComponentLabel::BRIDGES;
}

//! Per-node macrostructure label plus levels. `level` is the distance (in
//! condensation hops) from the set a component grows from: the LSC for IN and
//! OUT, IN for IN_TENDRILS, OUT for OUT_TENDRILS. For BRIDGES `level` is the
//! distance from IN and `level2` the distance to OUT.
struct Classification {
  static constexpr std::uint32_t kNoLevel = std::numeric_limits<std::uint32_t>::max();

  std::vector<ComponentLabel> label;
  std::vector<std::uint32_t> level;
  std::vector<std::uint32_t> level2;
  // Absent only for the empty graph.
  std::optional<std::uint64_t> lsc_component;

  bool empty() const noexcept { return !lsc_component.has_value(); }
  std::size_t node_count() const noexcept { return label.size(); }

  std::optional<std::uint32_t> level_of(std::size_t u) const {
    if (level[u] == kNoLevel) return std::nullopt;
    return level[u];
  }

  std::optional<std::pair<std::uint32_t, std::uint32_t>> bridge_levels(std::size_t u) const {
    if (label[u] != ComponentLabel::BRIDGES) return std::nullopt;
    return std::pair{level[u], level2[u]};
  }

  std::array<std::uint64_t, kLabelCount> counts() const {
    std::array<std::uint64_t, kLabelCount> out{};
    for (ComponentLabel l : label) ++out[to_index(l)];
    return out;
  }
};

namespace detail {

// Multi-source BFS over the condensation. `step` yields the neighbours to
// follow; only components accepted by `admit` are entered. Sources get
// distance 0 and are not admitted through `admit`.
template <class Index, class Step, class Admit>
std::vector<std::uint32_t> condensation_bfs(Index count, const std::vector<Index>& sources, Step&& step,
                                            Admit&& admit) {
  std::vector<std::uint32_t> dist(count, Classification::kNoLevel);
  std::vector<Index> frontier;
  frontier.reserve(sources.size());
  for (Index s : sources) {
    if (dist[s] == Classification::kNoLevel) {
      dist[s] = 0;
      frontier.push_back(s);
    }
  }
  std::vector<Index> next;
  for (std::uint32_t depth = 1; !frontier.empty(); ++depth) {
    next.clear();
    for (Index c : frontier) {
      for (Index w : step(c)) {
        if (dist[w] == Classification::kNoLevel && admit(w)) {
          dist[w] = depth;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

}  // namespace detail

//! Labels every node with its macrostructure component. The LSC is the SCC
//! with the most original nodes (ties: the one holding the smallest node
//! index). OUT/IN are found by forward/backward BFS from the LSC, the
//! tendril sets by forward BFS from IN and backward BFS from OUT over the
//! still-unlabeled components, with their intersection becoming BRIDGES.
//! Whatever is left is OTHER if it lies in the LSC's weak component and
//! DISCONNECTED otherwise.
template <class Index>
Classification classify(const Digraph<Index>& g, const SccPartition<Index>& p, const CondensedDag<Index>& dag) {
  require(p.node_count() == g.node_count(), "classify: partition does not match graph");
  require(dag.node_count() == p.component_count(), "classify: condensation does not match partition");
  Classification out;
  const Index n = g.node_count();
  if (n == 0) return out;

  const Index c = dag.node_count();
  Index lsc = 0;
  for (Index k = 1; k < c; ++k)
    if (dag.original_sizes[k] > dag.original_sizes[lsc]) lsc = k;

  constexpr auto kUnset = static_cast<ComponentLabel>(0xff);
  std::vector<ComponentLabel> comp_label(c, kUnset);
  std::vector<std::uint32_t> comp_level(c, Classification::kNoLevel);
  std::vector<std::uint32_t> comp_level2(c, Classification::kNoLevel);
  comp_label[lsc] = ComponentLabel::LSC;

  auto succ = [&](Index k) { return dag.successors(k); };
  auto pred = [&](Index k) { return dag.predecessors(k); };
  auto anything = [](Index) { return true; };
  const std::vector<Index> anchor{lsc};

  {
    auto dist = detail::condensation_bfs(c, anchor, succ, anything);
    for (Index k = 0; k < c; ++k) {
      if (k != lsc && dist[k] != Classification::kNoLevel) {
        comp_label[k] = ComponentLabel::OUT;
        comp_level[k] = dist[k];
      }
    }
  }
  {
    auto dist = detail::condensation_bfs(c, anchor, pred, anything);
    for (Index k = 0; k < c; ++k) {
      if (k != lsc && dist[k] != Classification::kNoLevel) {
        comp_label[k] = ComponentLabel::IN;
        comp_level[k] = dist[k];
      }
    }
  }

  std::vector<Index> in_set, out_set;
  for (Index k = 0; k < c; ++k) {
    if (comp_label[k] == ComponentLabel::IN) in_set.push_back(k);
    if (comp_label[k] == ComponentLabel::OUT) out_set.push_back(k);
  }
  auto unlabeled = [&](Index k) { return comp_label[k] == kUnset; };
  const auto from_in = detail::condensation_bfs(c, in_set, succ, unlabeled);
  const auto to_out = detail::condensation_bfs(c, out_set, pred, unlabeled);
  std::vector<Index>().swap(in_set);
  std::vector<Index>().swap(out_set);

  for (Index k = 0; k < c; ++k) {
    if (!unlabeled(k)) continue;
    const bool forward = from_in[k] != Classification::kNoLevel;
    const bool backward = to_out[k] != Classification::kNoLevel;
    if (forward && backward) {
      comp_label[k] = ComponentLabel::BRIDGES;
      comp_level[k] = from_in[k];
      comp_level2[k] = to_out[k];
    } else if (forward) {
      comp_label[k] = ComponentLabel::IN_TENDRILS;
      comp_level[k] = from_in[k];
    } else if (backward) {
      comp_label[k] = ComponentLabel::OUT_TENDRILS;
      comp_level[k] = to_out[k];
    }
  }

  {
    // Weak component of the LSC, ignoring arc direction.
    std::vector<bool> weak(c, false);
    std::vector<Index> stack{lsc};
    weak[lsc] = true;
    auto visit = [&](std::span<const Index> neighbours) {
      for (Index w : neighbours) {
        if (!weak[w]) {
          weak[w] = true;
          stack.push_back(w);
        }
      }
    };
    while (!stack.empty()) {
      const Index k = stack.back();
      stack.pop_back();
      visit(dag.successors(k));
      visit(dag.predecessors(k));
    }
    for (Index k = 0; k < c; ++k) {
      if (comp_label[k] == kUnset)
        comp_label[k] = weak[k] ? ComponentLabel::OTHER : ComponentLabel::DISCONNECTED;
    }
  }

  out.lsc_component = lsc;
  out.label.resize(n);
  out.level.resize(n);
  out.level2.resize(n);
  for (Index u = 0; u < n; ++u) {
    const Index k = p.component_of[u];
    out.label[u] = comp_label[k];
    out.level[u] = comp_level[k];
    out.level2[u] = comp_level2[k];
  }
  return out;
}

// Runs the whole pipeline: SCCs, condensation, classification.
template <class Index>
Classification decompose(const Digraph<Index>& g) {
  const auto partition = compute_scc(g);
  const auto dag = condense(g, partition);
  return classify(g, partition, dag);
}

//! Component sizes and the 8x8 matrix of arc counts between components
//! (row = source label, column = target label), plus per-label sums of
//! in-degree (followers) and out-degree (followings).
struct MacroSummary {
  using Row = std::array<std::uint64_t, kLabelCount>;

  Row sizes{};
  std::array<Row, kLabelCount> arc_matrix{};
  Row follower_arcs{};
  Row following_arcs{};
  std::uint64_t total_nodes = 0;
  std::uint64_t total_arcs = 0;

  std::uint64_t cell(ComponentLabel from, ComponentLabel to) const {
    return arc_matrix[to_index(from)][to_index(to)];
  }

  double node_percent(ComponentLabel l) const {
    return total_nodes == 0 ? 0.0 : 100.0 * static_cast<double>(sizes[to_index(l)]) / static_cast<double>(total_nodes);
  }
  double arc_percent(ComponentLabel from, ComponentLabel to) const {
    return total_arcs == 0 ? 0.0 : 100.0 * static_cast<double>(cell(from, to)) / static_cast<double>(total_arcs);
  }

  std::uint64_t matrix_total() const {
    std::uint64_t sum = 0;
    for (const Row& row : arc_matrix)
      for (std::uint64_t v : row) sum += v;
    return sum;
  }
};

// Cells that no correct classification can populate: OUT only points into
// OUT, IN is only entered from IN, and DISCONNECTED trades no arcs with
// anyone else.
constexpr bool forbidden_cell(ComponentLabel from, ComponentLabel to) noexcept {
  using L = ComponentLabel;
  if (from == L::OUT && to != L::OUT) return true;
  if (to == L::IN && from != L::IN) return true;
  if ((from == L::DISCONNECTED) != (to == L::DISCONNECTED)) return true;
  return false;
}

template <class Index>
MacroSummary arc_matrix(const Digraph<Index>& g, const Classification& c) {
  require(c.node_count() == g.node_count(), "arc_matrix: classification does not match graph");
  MacroSummary s;
  s.total_nodes = g.node_count();
  s.total_arcs = g.arc_count();
  for (Index u = 0; u < g.node_count(); ++u) {
    const std::size_t lu = to_index(c.label[u]);
    ++s.sizes[lu];
    s.follower_arcs[lu] += g.in_degree(u);
    s.following_arcs[lu] += g.out_degree(u);
    for (Index v : g.out_neighbors(u)) ++s.arc_matrix[lu][to_index(c.label[v])];
  }
  for (ComponentLabel from : kAllLabels) {
    for (ComponentLabel to : kAllLabels) {
      if (forbidden_cell(from, to) && s.cell(from, to) != 0)
        throw ContractViolation("arc_matrix: arcs found in forbidden cell " + std::string(label_name(from)) +
                                "->" + std::string(label_name(to)));
    }
  }
  return s;
}

// One CSV row per node, "id,component,level,level2", sorted by external ID
// (which is internal index order).
template <class Index>
void write_labels(std::ostream& os, const Digraph<Index>& g, const Classification& c) {
  require(c.node_count() == g.node_count(), "write_labels: classification does not match graph");
  os << "id,component,level,level2\n";
  std::string line;
  for (Index u = 0; u < g.node_count(); ++u) {
    line.clear();
    line += std::to_string(g.external_id(u));
    line += ',';
    line += label_name(c.label[u]);
    line += ',';
    if (c.level[u] != Classification::kNoLevel) line += std::to_string(c.level[u]);
    line += ',';
    if (c.level2[u] != Classification::kNoLevel) line += std::to_string(c.level2[u]);
    line += '\n';
    os << line;
  }
}

}  // namespace bowtie
