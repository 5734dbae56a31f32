#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/macrostructure.hpp"

namespace bowtie {

// Statistics use graph degrees: followers = in-degree, followings =
// out-degree. The API-reported counts in NodeMeta only feed validate_degrees.

namespace detail {

inline double percent(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

inline void check_matches(const Dataset& d, const Classification& c, const char* op) {
  if (c.node_count() != d.node_count()) throw ContractViolation(std::string(op) + ": classification does not match dataset");
}

}  // namespace detail

struct ComponentRow {
  std::uint64_t accounts = 0;
  std::uint64_t follower_arcs = 0;
  std::uint64_t following_arcs = 0;
  std::uint64_t tweets = 0;
  std::uint64_t no_follower = 0;
  std::uint64_t no_following = 0;
  std::uint64_t no_tweet = 0;
};

//! Per-component shares of accounts, arcs and tweets, and the fraction of
//! members with no follower, no following or no tweet. Counts are exact;
//! percentages are derived on demand.
struct ComponentProfile {
  std::array<ComponentRow, kLabelCount> rows{};
  ComponentRow totals;

  const ComponentRow& row(ComponentLabel l) const { return rows[to_index(l)]; }

  double account_percent(ComponentLabel l) const { return detail::percent(row(l).accounts, totals.accounts); }
  double follower_percent(ComponentLabel l) const { return detail::percent(row(l).follower_arcs, totals.follower_arcs); }
  double following_percent(ComponentLabel l) const {
    return detail::percent(row(l).following_arcs, totals.following_arcs);
  }
  double tweet_percent(ComponentLabel l) const { return detail::percent(row(l).tweets, totals.tweets); }
  // Relative to the component's own membership.
  double no_follower_percent(ComponentLabel l) const { return detail::percent(row(l).no_follower, row(l).accounts); }
  double no_following_percent(ComponentLabel l) const { return detail::percent(row(l).no_following, row(l).accounts); }
  double no_tweet_percent(ComponentLabel l) const { return detail::percent(row(l).no_tweet, row(l).accounts); }
};

inline ComponentProfile component_profile(const Dataset& d, const Classification& c) {
  detail::check_matches(d, c, "component_profile");
  ComponentProfile p;
  for (std::uint32_t u = 0; u < d.node_count(); ++u) {
    ComponentRow& r = p.rows[to_index(c.label[u])];
    const std::uint64_t in = d.graph.in_degree(u);
    const std::uint64_t out = d.graph.out_degree(u);
    const std::uint64_t tweets = d.meta[u].tweet_count;
    ++r.accounts;
    r.follower_arcs += in;
    r.following_arcs += out;
    r.tweets += tweets;
    r.no_follower += in == 0;
    r.no_following += out == 0;
    r.no_tweet += tweets == 0;
  }
  for (const ComponentRow& r : p.rows) {
    p.totals.accounts += r.accounts;
    p.totals.follower_arcs += r.follower_arcs;
    p.totals.following_arcs += r.following_arcs;
    p.totals.tweets += r.tweets;
    p.totals.no_follower += r.no_follower;
    p.totals.no_following += r.no_following;
    p.totals.no_tweet += r.no_tweet;
  }
  return p;
}

enum class Metric { in_degree, out_degree, tweets, age_months };

inline std::string_view metric_name(Metric m) noexcept {
  switch (m) {
    case Metric::in_degree: return "in_degree";
    case Metric::out_degree: return "out_degree";
    case Metric::tweets: return "tweets";
    case Metric::age_months: break;
  }
  return "age_months";
}

// Resolves a component name, e.g. from the command line.
inline ComponentLabel component_by_name(std::string_view name) {
  auto l = parse_label(name);
  if (!l) throw ContractViolation("unknown component '" + std::string(name) + "'");
  return *l;
}

// Latest creation date in the dataset, the default reference for ages.
inline std::optional<Date> latest_creation(const Dataset& d) {
  std::optional<Date> latest;
  for (const NodeMeta& m : d.meta)
    if (m.created_at && (!latest || *m.created_at > *latest)) latest = m.created_at;
  return latest;
}

//! Complementary CDF: for each distinct value v, the fraction of the
//! population with value >= v.
struct Ccdf {
  Metric metric = Metric::in_degree;
  std::optional<ComponentLabel> component;  // nullopt: every node
  bool filter_zeros = false;
  std::uint64_t population = 0;
  std::vector<std::pair<std::uint64_t, double>> points;
};

inline std::vector<std::pair<std::uint64_t, double>> ccdf_points(std::vector<std::uint64_t> values) {
  std::sort(values.begin(), values.end());
  std::vector<std::pair<std::uint64_t, double>> points;
  const double total = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == 0 || values[i] != values[i - 1])
      points.emplace_back(values[i], static_cast<double>(values.size() - i) / total);
  }
  return points;
}

//! CCDF of one metric over a component (or all nodes). Ages are whole months
//! up to `reference` (default: the latest creation date); nodes without a
//! creation date have no age and are left out of age CCDFs.
inline Ccdf ccdf(const Dataset& d, const Classification& c, Metric metric, std::optional<ComponentLabel> component,
                 bool filter_zeros, std::optional<Date> reference = std::nullopt) {
  detail::check_matches(d, c, "ccdf");
  if (metric == Metric::age_months && !reference) reference = latest_creation(d);
  std::vector<std::uint64_t> values;
  for (std::uint32_t u = 0; u < d.node_count(); ++u) {
    if (component && c.label[u] != *component) continue;
    std::uint64_t v = 0;
    switch (metric) {
      case Metric::in_degree: v = d.graph.in_degree(u); break;
      case Metric::out_degree: v = d.graph.out_degree(u); break;
      case Metric::tweets: v = d.meta[u].tweet_count; break;
      case Metric::age_months: {
        if (!d.meta[u].created_at) continue;
        const int months = whole_months_between(*d.meta[u].created_at, *reference);
        if (months < 0) throw ContractViolation("ccdf: reference date precedes an account creation date");
        v = static_cast<std::uint64_t>(months);
        break;
      }
    }
    if (filter_zeros && v == 0) continue;
    values.push_back(v);
  }
  Ccdf out;
  out.metric = metric;
  out.component = component;
  out.filter_zeros = filter_zeros;
  out.population = values.size();
  out.points = ccdf_points(std::move(values));
  return out;
}

// Nearest-rank percentile (1-based rank ceil(p/100 * n)); reorders `values`.
inline std::uint64_t nearest_rank(std::vector<std::uint64_t>& values, unsigned percent) {
  require(!values.empty(), "nearest_rank: empty population");
  const std::uint64_t n = values.size();
  const std::uint64_t rank = std::max<std::uint64_t>(1, (std::uint64_t{percent} * n + 99) / 100);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

struct DegreeSummary {
  double mean = 0;
  std::uint64_t median = 0;
  std::uint64_t p90 = 0;
};

inline DegreeSummary degree_summary(const Dataset& d) {
  if (d.node_count() == 0) throw ContractViolation("degree_summary: undefined on an empty graph");
  std::vector<std::uint64_t> degrees(d.node_count());
  for (std::uint32_t u = 0; u < d.node_count(); ++u) degrees[u] = d.graph.in_degree(u);
  DegreeSummary s;
  s.mean = static_cast<double>(d.graph.arc_count()) / static_cast<double>(d.node_count());
  s.median = nearest_rank(degrees, 50);
  s.p90 = nearest_rank(degrees, 90);
  return s;
}

struct AbandonedCriteria {
  std::uint64_t max_followers = 1;
  std::uint64_t max_followings = 1;
  std::uint32_t min_age_months = 6;
  bool require_no_tweet = false;
};

struct AbandonedReport {
  std::array<std::uint64_t, kLabelCount> members{};
  std::array<std::uint64_t, kLabelCount> abandoned{};

  // nullopt for an empty component.
  std::optional<double> fraction(ComponentLabel l) const {
    const std::size_t i = to_index(l);
    if (members[i] == 0) return std::nullopt;
    return static_cast<double>(abandoned[i]) / static_cast<double>(members[i]);
  }
};

//! Members with at most `max_followers` followers and `max_followings`
//! followings, older than `min_age_months` at `reference` and, optionally,
//! without a tweet. With a positive age threshold, nodes without a creation
//! date never qualify.
inline AbandonedReport abandoned_fraction(const Dataset& d, const Classification& c, const AbandonedCriteria& criteria,
                                          std::optional<Date> reference = std::nullopt) {
  detail::check_matches(d, c, "abandoned_fraction");
  if (!reference) reference = latest_creation(d);
  AbandonedReport r;
  for (std::uint32_t u = 0; u < d.node_count(); ++u) {
    const std::size_t l = to_index(c.label[u]);
    ++r.members[l];
    if (d.graph.in_degree(u) > criteria.max_followers || d.graph.out_degree(u) > criteria.max_followings) continue;
    if (criteria.require_no_tweet && d.meta[u].tweet_count != 0) continue;
    if (criteria.min_age_months > 0) {
      const auto& created = d.meta[u].created_at;
      if (!created || !reference) continue;
      if (whole_months_between(*created, *reference) < static_cast<int>(criteria.min_age_months)) continue;
    }
    ++r.abandoned[l];
  }
  return r;
}

enum class OutlierCategory {
  top_followed,
  top_following,
  top_tweeting,
  top_following_le1_follower,
  top_tweeting_le1_follower,
};

inline constexpr std::array<OutlierCategory, 5> kAllOutlierCategories = {
    OutlierCategory::top_followed, OutlierCategory::top_following, OutlierCategory::top_tweeting,
    OutlierCategory::top_following_le1_follower, OutlierCategory::top_tweeting_le1_follower};

inline std::string_view category_name(OutlierCategory c) noexcept {
  switch (c) {
    case OutlierCategory::top_followed: return "top_followed";
    case OutlierCategory::top_following: return "top_following";
    case OutlierCategory::top_tweeting: return "top_tweeting";
    case OutlierCategory::top_following_le1_follower: return "top_following_le1_follower";
    case OutlierCategory::top_tweeting_le1_follower: break;
  }
  return "top_tweeting_le1_follower";
}

struct OutlierReport {
  OutlierCategory category = OutlierCategory::top_followed;
  std::uint64_t k = 0;
  bool truncated = false;  // fewer than k candidates
  std::vector<ExternalId> members;  // best first
  std::array<std::uint64_t, kLabelCount> per_component{};
  // Members carrying the external label, per component (zero when no label given).
  std::array<std::uint64_t, kLabelCount> labeled{};

  double share_percent(ComponentLabel l) const { return detail::percent(per_component[to_index(l)], members.size()); }
  // Fraction of the category's members in component l that carry the label.
  double labeled_percent(ComponentLabel l) const {
    return detail::percent(labeled[to_index(l)], per_component[to_index(l)]);
  }
};

//! The k accounts ranking highest on the category's metric (the "_le1_follower"
//! categories only rank accounts with at most one follower). Ties go to the
//! smaller external ID. `has_label`, when given, is evaluated on members.
template <class HasLabel>
OutlierReport top_k_outliers(const Dataset& d, const Classification& c, OutlierCategory category, std::uint64_t k,
                             HasLabel&& has_label) {
  detail::check_matches(d, c, "top_k_outliers");
  require(k >= 1, "top_k_outliers: k must be at least 1");
  const bool constrained = category == OutlierCategory::top_following_le1_follower ||
                           category == OutlierCategory::top_tweeting_le1_follower;
  auto metric = [&](std::uint32_t u) -> std::uint64_t {
    switch (category) {
      case OutlierCategory::top_followed: return d.graph.in_degree(u);
      case OutlierCategory::top_following:
      case OutlierCategory::top_following_le1_follower: return d.graph.out_degree(u);
      case OutlierCategory::top_tweeting:
      case OutlierCategory::top_tweeting_le1_follower: break;
    }
    return d.meta[u].tweet_count;
  };
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t u = 0; u < d.node_count(); ++u)
    if (!constrained || d.graph.in_degree(u) <= 1) candidates.push_back(u);

  OutlierReport r;
  r.category = category;
  r.k = k;
  r.truncated = k > candidates.size();
  const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(k, candidates.size()));
  // Index order is external-ID order, so the index breaks ties.
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      const auto ma = metric(a), mb = metric(b);
                      return ma != mb ? ma > mb : a < b;
                    });
  for (std::size_t i = 0; i < take; ++i) {
    const std::uint32_t u = candidates[i];
    r.members.push_back(d.graph.external_id(u));
    ++r.per_component[to_index(c.label[u])];
    if (has_label(u)) ++r.labeled[to_index(c.label[u])];
  }
  return r;
}

inline OutlierReport top_k_outliers(const Dataset& d, const Classification& c, OutlierCategory category,
                                    std::uint64_t k) {
  return top_k_outliers(d, c, category, k, [](std::uint32_t) { return false; });
}

//! How an externally supplied account set spreads over the components.
struct Crosstab {
  std::uint64_t label_total = 0;  // distinct IDs in the set
  std::uint64_t absent = 0;       // IDs not present in the dataset
  std::array<std::uint64_t, kLabelCount> labeled{};
  std::array<std::uint64_t, kLabelCount> component_sizes{};

  // Share of the set found in component l (all shares plus absent = 100).
  double distribution_percent(ComponentLabel l) const { return detail::percent(labeled[to_index(l)], label_total); }
  double absent_percent() const { return detail::percent(absent, label_total); }
  // Share of component l's members that are in the set.
  double prevalence_percent(ComponentLabel l) const {
    return detail::percent(labeled[to_index(l)], component_sizes[to_index(l)]);
  }
};

inline Crosstab label_crosstab(const Dataset& d, const Classification& c, std::span<const ExternalId> ids) {
  detail::check_matches(d, c, "label_crosstab");
  std::vector<ExternalId> set(ids.begin(), ids.end());
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  Crosstab t;
  t.label_total = set.size();
  t.component_sizes = c.counts();
  for (ExternalId id : set) {
    if (auto u = d.graph.find(id)) {
      ++t.labeled[to_index(c.label[*u])];
    } else {
      ++t.absent;
    }
  }
  return t;
}

// Label given by a metadata predicate, e.g. status == suspended.
template <class Predicate>
Crosstab label_crosstab_where(const Dataset& d, const Classification& c, Predicate&& has_label) {
  detail::check_matches(d, c, "label_crosstab");
  Crosstab t;
  t.component_sizes = c.counts();
  for (std::uint32_t u = 0; u < d.node_count(); ++u) {
    if (!has_label(d.meta[u])) continue;
    ++t.label_total;
    ++t.labeled[to_index(c.label[u])];
  }
  return t;
}

}  // namespace bowtie
