#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "bowtie/graph.hpp"
#include "bowtie/synth.hpp"
#include "test_support.hpp"

namespace bowtie {
namespace {

using testing::canon11;
using testing::idx;

std::vector<Arc> arcs_of(const Graph& g) {
  std::vector<Arc> out;
  g.for_each_arc([&](std::uint32_t u, std::uint32_t v) { out.push_back({g.external_id(u), g.external_id(v)}); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Arc> reverse_arcs_of(const Graph& g) {
  std::vector<Arc> out;
  for (std::uint32_t v = 0; v < g.node_count(); ++v)
    for (std::uint32_t u : g.in_neighbors(v)) out.push_back({g.external_id(u), g.external_id(v)});
  std::sort(out.begin(), out.end());
  return out;
}

TEST(BuildGraph, DropsAndCountsDuplicates) {
  const std::vector<Arc> arcs{{1, 2}, {2, 1}, {1, 2}};
  const Graph g = build_graph<std::uint32_t>(std::span<const Arc>(arcs));
  EXPECT_EQ(g.node_count(), 2u);
  EXPECT_EQ(g.arc_count(), 2u);
  EXPECT_EQ(g.build_stats().dropped_duplicates, 1u);
  EXPECT_EQ(g.build_stats().dropped_self_loops, 0u);
  EXPECT_EQ(g.build_stats().input_arcs, 3u);
}

TEST(BuildGraph, DropsSelfLoopButKeepsNode) {
  const std::vector<Arc> arcs{{5, 5}};
  const Graph g = build_graph<std::uint32_t>(std::span<const Arc>(arcs));
  EXPECT_EQ(g.node_count(), 1u);
  EXPECT_EQ(g.arc_count(), 0u);
  EXPECT_EQ(g.build_stats().dropped_self_loops, 1u);
  EXPECT_EQ(g.external_id(0), 5u);
}

TEST(BuildGraph, Canon11Counts) {
  const Graph g = canon11();
  EXPECT_EQ(g.node_count(), 11u);
  EXPECT_EQ(g.arc_count(), 11u);
}

TEST(BuildGraph, TargetOnlyNodesAndSparseIds) {
  const std::vector<Arc> arcs{{1000000000000ULL, 7}, {7, 3}};
  const Graph g = build_graph<std::uint32_t>(std::span<const Arc>(arcs));
  ASSERT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.external_id(0), 3u);
  EXPECT_EQ(g.external_id(2), 1000000000000ULL);
  EXPECT_EQ(g.out_degree(0), 0u);
  EXPECT_EQ(g.in_degree(0), 1u);
  EXPECT_FALSE(g.find(4).has_value());
}

TEST(BuildGraph, EmptyInput) {
  const Graph g = build_graph<std::uint32_t>(std::span<const Arc>());
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.arc_count(), 0u);
}

TEST(BuildGraph, NarrowIndexType) {
  const std::vector<Arc> arcs{{10, 20}, {20, 30}, {30, 10}};
  const auto g = build_graph<std::uint16_t>(std::span<const Arc>(arcs));
  EXPECT_EQ(g.node_count(), 3u);
  EXPECT_EQ(g.out_neighbors(0)[0], 1u);
}

TEST(Degree, Canon11) {
  const Graph g = canon11();
  EXPECT_EQ(g.degree(idx(g, 4), Direction::out), 3u);
  EXPECT_EQ(g.degree(idx(g, 3), Direction::out), 0u);
  EXPECT_EQ(g.degree(idx(g, 3), Direction::in), 3u);
}

TEST(Degree, NoArcsMeansZeroDegrees) {
  const std::vector<ExternalId> nodes{1, 2, 3};
  const Graph g = build_graph<std::uint32_t>(std::span<const Arc>(), nodes);
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    EXPECT_EQ(g.degree(u, Direction::in), 0u);
    EXPECT_EQ(g.degree(u, Direction::out), 0u);
  }
}

TEST(Degree, OutOfRangeIsContractViolation) {
  const Graph g = canon11();
  EXPECT_THROW(g.degree(11, Direction::in), ContractViolation);
}

TEST(InducedSubgraph, KeepAllIsIdentity) {
  const Graph g = canon11();
  const Graph h = induced_subgraph(g, [](std::uint32_t) { return true; });
  EXPECT_EQ(arcs_of(g), arcs_of(h));
  ASSERT_EQ(h.node_count(), g.node_count());
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    EXPECT_EQ(h.external_id(u), g.external_id(u));
    EXPECT_EQ(h.in_degree(u), g.in_degree(u));
    EXPECT_EQ(h.out_degree(u), g.out_degree(u));
  }
}

TEST(InducedSubgraph, KeepNothing) {
  const Graph h = induced_subgraph(canon11(), [](std::uint32_t) { return false; });
  EXPECT_EQ(h.node_count(), 0u);
  EXPECT_EQ(h.arc_count(), 0u);
}

TEST(InducedSubgraph, Canon11FirstFour) {
  const Graph g = canon11();
  const Graph h = induced_subgraph(g, [&](std::uint32_t u) { return g.external_id(u) <= 4; });
  EXPECT_EQ(h.node_count(), 4u);
  EXPECT_EQ(h.arc_count(), 4u);  // 1->2, 2->1, 1->3, 4->1
  const std::vector<Arc> expected{{1, 2}, {1, 3}, {2, 1}, {4, 1}};
  EXPECT_EQ(arcs_of(h), expected);
}

// Property: degree sums, forward/reverse agreement, order-insensitivity.
TEST(GraphProperties, RandomMultisets) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 40);
    const int m = static_cast<int>(gen() % 200);
    std::vector<Arc> arcs;
    for (int i = 0; i < m; ++i) arcs.push_back({gen() % n * 13, gen() % n * 13});
    const Graph g = build_graph<std::uint32_t>(std::span<const Arc>(arcs));

    std::uint64_t in_sum = 0, out_sum = 0;
    for (std::uint32_t u = 0; u < g.node_count(); ++u) {
      in_sum += g.in_degree(u);
      out_sum += g.out_degree(u);
    }
    EXPECT_EQ(in_sum, g.arc_count());
    EXPECT_EQ(out_sum, g.arc_count());
    EXPECT_EQ(g.out_offsets().back(), g.arc_count());
    EXPECT_TRUE(std::is_sorted(g.out_offsets().begin(), g.out_offsets().end()));
    EXPECT_EQ(arcs_of(g), reverse_arcs_of(g));

    std::vector<Arc> dedup = arcs;
    std::erase_if(dedup, [](const Arc& a) { return a.src == a.dst; });
    std::sort(dedup.begin(), dedup.end());
    dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
    EXPECT_EQ(arcs_of(g), dedup);
    EXPECT_EQ(g.build_stats().dropped_duplicates + g.build_stats().dropped_self_loops + g.arc_count(),
              static_cast<std::uint64_t>(m));

    std::shuffle(arcs.begin(), arcs.end(), gen);
    const Graph shuffled = build_graph<std::uint32_t>(std::span<const Arc>(arcs));
    EXPECT_EQ(arcs_of(shuffled), arcs_of(g));
    EXPECT_TRUE(std::equal(g.external_ids().begin(), g.external_ids().end(), shuffled.external_ids().begin(),
                           shuffled.external_ids().end()));
  }
}

TEST(ArcList, SpansChunksAndAppend) {
  ArcList a, b;
  const std::size_t count = ArcList::kChunk + 10;
  for (std::size_t i = 0; i < count; ++i) a.add(i % 1000, (i + 1) % 1000);
  b.add(5000, 5001);
  b.add_node(7000);
  a.append(std::move(b));
  EXPECT_EQ(a.size(), count + 1);
  EXPECT_EQ(a.chunks().size(), 3u);
  const Graph g = build_graph<std::uint32_t>(std::move(a));
  EXPECT_EQ(g.node_count(), 1003u);
  EXPECT_EQ(g.arc_count(), 1001u);
}

}  // namespace
}  // namespace bowtie

namespace bowtie {
namespace {

TEST(BuildGraph, IndexWidthOverflowIsResourceError) {
  std::vector<ExternalId> ids(70000);
  std::iota(ids.begin(), ids.end(), ExternalId{1});
  try {
    build_graph<std::uint16_t>(std::span<const Arc>(), ids);
    FAIL() << "expected ResourceError";
  } catch (const ResourceError& e) {
    EXPECT_EQ(e.exit_code(), 2);
    EXPECT_EQ(e.phase(), "build_graph: id map");
  }
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(ParseError("f.txt", 3, "bad").exit_code(), 1);
  EXPECT_STREQ(ParseError("f.txt", 3, "bad").what(), "f.txt:3: bad");
  EXPECT_EQ(ResourceError("condense", "out of memory").exit_code(), 2);
  EXPECT_EQ(ContractViolation("x").exit_code(), 3);
}

}  // namespace
}  // namespace bowtie
