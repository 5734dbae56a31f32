#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/macrostructure.hpp"
#include "bowtie/stats.hpp"
#include "bowtie/temporal.hpp"

// Serialization of results: JSON documents and the CSV point files.

namespace bowtie {

using Json = nlohmann::ordered_json;

// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class F>
Json per_label(F&& value) {
  Json j = Json::object();
  for (ComponentLabel l : kAllLabels) j[std::string(label_name(l))] = value(l);
  return j;
}

inline Json summary_json(const MacroSummary& s) {
  Json j;
  j["sizes"] = per_label([&](ComponentLabel l) { return s.sizes[to_index(l)]; });
  j["percentages"] = per_label([&](ComponentLabel l) { return s.node_percent(l); });
  Json matrix = Json::array();
  for (const auto& row : s.arc_matrix) matrix.push_back(row);
  j["arc_matrix"] = std::move(matrix);
  Json order = Json::array();
  for (ComponentLabel l : kAllLabels) order.push_back(std::string(label_name(l)));
  j["matrix_order"] = std::move(order);
  j["follower_arcs"] = per_label([&](ComponentLabel l) { return s.follower_arcs[to_index(l)]; });
  j["following_arcs"] = per_label([&](ComponentLabel l) { return s.following_arcs[to_index(l)]; });
  j["total_nodes"] = s.total_nodes;
  j["total_arcs"] = s.total_arcs;
  return j;
}

inline Json profile_json(const ComponentProfile& p) {
  Json j = Json::object();
  for (ComponentLabel l : kAllLabels) {
    const ComponentRow& r = p.row(l);
    j[std::string(label_name(l))] = Json{
        {"accounts", r.accounts},
        {"accounts_percent", p.account_percent(l)},
        {"follower_arcs", r.follower_arcs},
        {"follower_arcs_percent", p.follower_percent(l)},
        {"following_arcs", r.following_arcs},
        {"following_arcs_percent", p.following_percent(l)},
        {"tweets", r.tweets},
        {"tweets_percent", p.tweet_percent(l)},
        {"no_follower_percent", p.no_follower_percent(l)},
        {"no_following_percent", p.no_following_percent(l)},
        {"no_tweet_percent", p.no_tweet_percent(l)},
    };
  }
  j["TOTAL"] = Json{{"accounts", p.totals.accounts},
                    {"follower_arcs", p.totals.follower_arcs},
                    {"following_arcs", p.totals.following_arcs},
                    {"tweets", p.totals.tweets}};
  return j;
}

inline Json degree_summary_json(const DegreeSummary& s) {
  return Json{{"mean", s.mean}, {"median", s.median}, {"p90", s.p90}};
}

inline Json abandoned_json(const AbandonedReport& r, const AbandonedCriteria& c) {
  Json j;
  j["criteria"] = Json{{"max_followers", c.max_followers},
                       {"max_followings", c.max_followings},
                       {"min_age_months", c.min_age_months},
                       {"require_no_tweet", c.require_no_tweet}};
  j["fraction"] = per_label([&](ComponentLabel l) -> Json {
    auto f = r.fraction(l);
    return f ? Json(*f) : Json(nullptr);
  });
  return j;
}

inline Json outlier_json(const OutlierReport& r) {
  Json j;
  j["category"] = std::string(category_name(r.category));
  j["k"] = r.k;
  j["truncated"] = r.truncated;
  j["count"] = r.members.size();
  j["share_percent"] = per_label([&](ComponentLabel l) { return r.share_percent(l); });
  j["labeled_percent"] = per_label([&](ComponentLabel l) { return r.labeled_percent(l); });
  j["members"] = r.members;
  return j;
}

inline Json crosstab_json(const Crosstab& t) {
  Json j;
  j["label_total"] = t.label_total;
  j["distribution_percent"] = per_label([&](ComponentLabel l) { return t.distribution_percent(l); });
  j["absent_percent"] = t.absent_percent();
  j["prevalence_percent"] = per_label([&](ComponentLabel l) { return t.prevalence_percent(l); });
  return j;
}

inline Json degree_diff_json(const DegreeDiffReport& r) {
  auto histogram = [](const std::map<std::int64_t, std::uint64_t>& h) {
    Json a = Json::array();
    for (const auto& [diff, count] : h) a.push_back(Json::array({diff, count}));
    return a;
  };
  Json j;
  j["nodes_with_metadata"] = r.nodes;
  j["followers"] = Json{{"zero_fraction", r.followers_zero_fraction()}, {"histogram", histogram(r.followers)}};
  j["followings"] = Json{{"zero_fraction", r.followings_zero_fraction()}, {"histogram", histogram(r.followings)}};
  return j;
}

inline Json agreement_json(const Agreement& a) {
  Json j;
  j["common"] = a.common;
  j["equal"] = a.equal;
  j["fraction"] = a.fraction() ? Json(*a.fraction()) : Json(nullptr);
  j["no_overlap"] = a.no_overlap();
  Json m = Json::array();
  for (const auto& row : a.confusion) m.push_back(row);
  j["confusion"] = std::move(m);
  return j;
}

inline void write_ccdf_csv(std::ostream& os, const Ccdf& c) {
  os << "value,ccdf\n";
  for (const auto& [value, fraction] : c.points) os << value << ',' << format_double(fraction) << '\n';
}

inline void write_evolution_csv(std::ostream& os, const EvolutionSeries& s) {
  os << "date,label,count,percent\n";
  for (const EvolutionPoint& p : s.points)
    for (ComponentLabel l : kAllLabels)
      os << format_date(p.as_of) << ',' << label_name(l) << ',' << p.summary.sizes[to_index(l)] << ','
         << format_double(p.summary.node_percent(l)) << '\n';
}

inline void write_attribution_csv(std::ostream& os, const EvolutionSeries& s) {
  os << "period_end,label,new_accounts,fraction\n";
  for (const EvolutionPoint& p : s.points)
    for (ComponentLabel l : kAllLabels)
      os << format_date(p.as_of) << ',' << label_name(l) << ',' << p.new_accounts.counts[to_index(l)] << ','
         << format_double(p.new_accounts.fraction(l)) << '\n';
}

// Reads a labels CSV ("id,component,level,level2") back into a LabelTable.
inline LabelTable read_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  LabelTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = detail::trim(line);
    if (view.empty() || (lineno == 1 && view.rfind("id,", 0) == 0)) continue;
    const auto fields = detail::split_csv(view);
    if (fields.size() < 2) throw ParseError(path.string(), lineno, "expected id,component");
    const auto label = parse_label(fields[1]);
    if (!label) throw ParseError(path.string(), lineno, "unknown component '" + std::string(fields[1]) + "'");
    t.emplace_back(detail::parse_id(fields[0], path.string(), lineno), *label);
  }
  std::sort(t.begin(), t.end());
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].first == t[i - 1].first)
      throw ParseError(path.string(), 0, "duplicate id " + std::to_string(t[i].first));
  return t;
}

// One ID per line; blank lines and '#' comments ignored.
inline std::vector<ExternalId> read_id_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::vector<ExternalId> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    ids.push_back(detail::parse_id(view, path.string(), lineno));
  }
  return ids;
}

}  // namespace bowtie
