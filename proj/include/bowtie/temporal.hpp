#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <future>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/macrostructure.hpp"

namespace bowtie {

//! The dataset as it (approximately) stood on `as_of`: only accounts created
//! on or before that day, and an arc wherever both endpoints exist.
struct Snapshot {
  Date as_of;
  Dataset dataset;
  Classification classification;
  MacroSummary summary;
  // Nodes left out because they have no creation date.
  std::uint64_t excluded_undated = 0;
  // The dataset this snapshot was cut from.
  const Dataset* source = nullptr;
};

inline Snapshot snapshot(const Dataset& d, const Date& as_of) {
  Snapshot s;
  s.as_of = as_of;
  s.source = &d;
  for (const NodeMeta& m : d.meta) s.excluded_undated += !m.created_at.has_value();
  auto keep = [&](std::uint32_t u) { return d.meta[u].created_at && *d.meta[u].created_at <= as_of; };
  s.dataset.graph = induced_subgraph(d.graph, keep);
  s.dataset.meta.reserve(s.dataset.graph.node_count());
  for (std::uint32_t u = 0; u < d.node_count(); ++u)
    if (keep(u)) s.dataset.meta.push_back(d.meta[u]);
  s.dataset.provenance = d.provenance;
  s.dataset.provenance.build = s.dataset.graph.build_stats();
  s.classification = decompose(s.dataset.graph);
  s.summary = arc_matrix(s.dataset.graph, s.classification);
  return s;
}

// External IDs paired with labels, sorted by ID.
using LabelTable = std::vector<std::pair<ExternalId, ComponentLabel>>;

template <class Index>
LabelTable label_table(const Digraph<Index>& g, const Classification& c) {
  require(c.node_count() == g.node_count(), "label_table: classification does not match graph");
  LabelTable t;
  t.reserve(g.node_count());
  for (Index u = 0; u < g.node_count(); ++u) t.emplace_back(g.external_id(u), c.label[u]);
  return t;
}

struct Attribution {
  std::array<std::uint64_t, kLabelCount> counts{};
  std::uint64_t total = 0;

  double fraction(ComponentLabel l) const {
    return total == 0 ? 0.0 : static_cast<double>(counts[to_index(l)]) / static_cast<double>(total);
  }
};

//! Accounts present in `newer` but not in `older`, bucketed by their label
//! in `newer`.
inline Attribution new_account_attribution(const Snapshot& older, const Snapshot& newer) {
  require(older.source == newer.source, "new_account_attribution: snapshots come from different datasets");
  require(older.as_of <= newer.as_of, "new_account_attribution: older snapshot is later than newer");
  Attribution a;
  const auto old_ids = older.dataset.graph.external_ids();
  const auto& g = newer.dataset.graph;
  std::size_t j = 0;
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    const ExternalId id = g.external_id(u);
    while (j < old_ids.size() && old_ids[j] < id) ++j;
    if (j < old_ids.size() && old_ids[j] == id) continue;
    ++a.counts[to_index(newer.classification.label[u])];
    ++a.total;
  }
  return a;
}

//! Label agreement over the IDs two classifications have in common, with
//! the 8x8 confusion matrix (row: label in A, column: label in B).
struct Agreement {
  std::uint64_t common = 0;
  std::uint64_t equal = 0;
  std::array<std::array<std::uint64_t, kLabelCount>, kLabelCount> confusion{};

  bool no_overlap() const noexcept { return common == 0; }
  std::optional<double> fraction() const {
    if (common == 0) return std::nullopt;
    return static_cast<double>(equal) / static_cast<double>(common);
  }
};

inline Agreement agreement(const LabelTable& a, const LabelTable& b) {
  Agreement r;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      ++r.common;
      r.equal += a[i].second == b[j].second;
      ++r.confusion[to_index(a[i].second)][to_index(b[j].second)];
      ++i;
      ++j;
    }
  }
  return r;
}

template <class Index>
Agreement agreement(const Digraph<Index>& ga, const Classification& a, const Digraph<Index>& gb,
                    const Classification& b) {
  return agreement(label_table(ga, a), label_table(gb, b));
}

// start, start+step, start+2*step, ... up to end, then end itself if it is
// off the grid. Each point is offset from `start`, so clamped month ends do
// not drift.
inline std::vector<Date> evolution_dates(const Date& start, const Date& end, std::uint32_t step_months) {
  require(step_months >= 1, "evolution: step must be at least one month");
  require(start <= end, "evolution: start is after end");
  std::vector<Date> dates;
  for (int k = 0;; ++k) {
    const Date d = add_months(start, k * static_cast<int>(step_months));
    if (d > end) break;
    dates.push_back(d);
  }
  if (dates.back() != end) dates.push_back(end);
  return dates;
}

struct EvolutionPoint {
  Date as_of;
  MacroSummary summary;
  // Accounts new since the previous point (since nothing, for the first).
  Attribution new_accounts;
};

struct EvolutionSeries {
  std::vector<EvolutionPoint> points;
};

//! Snapshots on a month grid. Points are independent of each other, so up to
//! `threads` of them are computed at once; the series does not depend on the
//! thread count.
inline EvolutionSeries evolution(const Dataset& d, const Date& start, const Date& end, std::uint32_t step_months,
                                 unsigned threads = 1) {
  const std::vector<Date> dates = evolution_dates(start, end, step_months);
  EvolutionSeries series;
  series.points.resize(dates.size());
  auto compute = [&](std::size_t i) {
    const Snapshot s = snapshot(d, dates[i]);
    EvolutionPoint& p = series.points[i];
    p.as_of = dates[i];
    p.summary = s.summary;
    // Within one source, "absent from the previous snapshot" means created
    // after the previous date.
    for (std::uint32_t u = 0; u < s.dataset.node_count(); ++u) {
      if (i > 0 && *s.dataset.meta[u].created_at <= dates[i - 1]) continue;
      ++p.new_accounts.counts[to_index(s.classification.label[u])];
      ++p.new_accounts.total;
    }
  };
  threads = std::max(1u, threads);
  for (std::size_t first = 0; first < dates.size(); first += threads) {
    std::vector<std::future<void>> batch;
    const std::size_t last = std::min(dates.size(), first + threads);
    for (std::size_t i = first + 1; i < last; ++i) batch.push_back(std::async(std::launch::async, compute, i));
    compute(first);
    for (auto& f : batch) f.get();
  }
  return series;
}

}  // namespace bowtie
