#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/ingest.hpp"
#include "bowtie/io.hpp"
#include "bowtie/macrostructure.hpp"
#include "bowtie/report.hpp"
#include "bowtie/stats.hpp"
#include "bowtie/synth.hpp"
#include "bowtie/temporal.hpp"

namespace bowtie::cli {

namespace fs = std::filesystem;

struct RunConfig {
  std::string edges;
  std::string format = "edge-list";
  std::string meta;
  std::string out;
  std::string labels;
  std::string as_of;
  std::string start;
  std::string end;
  std::string older;
  std::string newer;
  std::string plant;
  std::string depth;
  std::uint32_t step_months = 6;
  std::uint64_t k = 10000;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  std::uint32_t max_n = 200;
  std::uint64_t extra_lsc = 0;
  std::uint32_t fanout = 1;
  unsigned threads = 1;
  bool canon = false;
};

inline Date require_date(const std::string& text, const char* flag) {
  auto d = parse_date(text);
  if (!d) throw ParseError(flag, 0, "expected YYYY-MM-DD, got '" + text + "'");
  return *d;
}

inline fs::path output_dir(const RunConfig& cfg) {
  if (cfg.out.empty()) throw ParseError("--out", 0, "output directory required");
  std::error_code ec;
  fs::create_directories(cfg.out, ec);
  if (ec || !fs::is_directory(cfg.out)) throw ParseError(cfg.out, 0, "cannot create output directory");
  return cfg.out;
}

inline Dataset load(const RunConfig& cfg, std::ostream& err) {
  if (cfg.edges.empty()) throw ParseError("--edges", 0, "edge file required");
  const InputFormat format = cfg.format == "adjacency" ? InputFormat::adjacency : InputFormat::edge_list;
  std::optional<fs::path> meta;
  if (!cfg.meta.empty()) meta = cfg.meta;
  err << "loading " << cfg.edges << (meta ? " + " + cfg.meta : std::string()) << '\n';
  Dataset d = load_dataset(format, cfg.edges, meta, cfg.threads);
  err << "graph: " << d.graph.node_count() << " nodes, " << d.graph.arc_count() << " arcs ("
      << d.provenance.build.dropped_duplicates << " duplicates, " << d.provenance.build.dropped_self_loops
      << " self-loops dropped)\n";
  return d;
}

inline void write_json(const fs::path& path, const Json& j) {
  write_file_atomically(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

inline void write_classification(const fs::path& dir, const Graph& g, const Classification& c, Json summary) {
  write_file_atomically(dir / "labels.csv", [&](std::ostream& os) { write_labels(os, g, c); });
  write_json(dir / "summary.json", summary);
}

inline int cmd_decompose(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  const Dataset d = load(cfg, err);
  err << "classifying\n";
  const Classification c = decompose(d.graph);
  const MacroSummary s = arc_matrix(d.graph, c);
  write_classification(dir, d.graph, c, summary_json(s));
  return 0;
}

inline int cmd_snapshot(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  const Date as_of = require_date(cfg.as_of, "--as-of");
  const fs::path dir = output_dir(cfg);
  const Dataset d = load(cfg, err);
  const Snapshot s = snapshot(d, as_of);
  Json summary = summary_json(s.summary);
  summary["as_of"] = format_date(as_of);
  summary["excluded_undated"] = s.excluded_undated;
  write_classification(dir, s.dataset.graph, s.classification, std::move(summary));
  return 0;
}

inline int cmd_stats(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  const Dataset d = load(cfg, err);
  const Classification c = decompose(d.graph);
  std::optional<Date> reference;
  if (!cfg.as_of.empty()) reference = require_date(cfg.as_of, "--as-of");
  if (!reference) reference = latest_creation(d);

  Json j;
  j["reference_date"] = reference ? Json(format_date(*reference)) : Json(nullptr);
  j["profile"] = profile_json(component_profile(d, c));
  if (d.node_count() > 0) j["in_degree_summary"] = degree_summary_json(degree_summary(d));
  const AbandonedCriteria criteria;
  j["abandoned"] = abandoned_json(abandoned_fraction(d, c, criteria, reference), criteria);
  AbandonedCriteria tweetless = criteria;
  tweetless.require_no_tweet = true;
  j["abandoned_no_tweet"] = abandoned_json(abandoned_fraction(d, c, tweetless, reference), tweetless);

  auto suspended = [&](std::uint32_t u) { return d.meta[u].status == AccountStatus::suspended; };
  Json outliers = Json::array();
  if (d.node_count() > 0)
    for (OutlierCategory cat : kAllOutlierCategories)
      outliers.push_back(outlier_json(top_k_outliers(d, c, cat, cfg.k, suspended)));
  j["outliers"] = std::move(outliers);

  Json crosstabs;
  crosstabs["suspended"] =
      crosstab_json(label_crosstab_where(d, c, [](const NodeMeta& m) { return m.status == AccountStatus::suspended; }));
  crosstabs["verified"] = crosstab_json(label_crosstab_where(d, c, [](const NodeMeta& m) { return m.verified; }));
  crosstabs["expert"] = crosstab_json(label_crosstab_where(d, c, [](const NodeMeta& m) { return m.expert; }));
  if (!cfg.labels.empty()) crosstabs["labels"] = crosstab_json(label_crosstab(d, c, read_id_list(cfg.labels)));
  j["crosstabs"] = std::move(crosstabs);
  write_json(dir / "stats.json", j);

  const fs::path ccdf_dir = dir / "ccdf";
  fs::create_directories(ccdf_dir);
  for (Metric metric : {Metric::in_degree, Metric::out_degree, Metric::tweets, Metric::age_months}) {
    // Zero values are dropped except for age, where zero is meaningful.
    const bool filter = metric != Metric::age_months;
    auto emit = [&](std::optional<ComponentLabel> component) {
      const Ccdf cc = ccdf(d, c, metric, component, filter, reference);
      const std::string name = "ccdf_" + std::string(metric_name(metric)) + "_" +
                               (component ? std::string(label_name(*component)) : std::string("ALL")) + ".csv";
      write_file_atomically(ccdf_dir / name, [&](std::ostream& os) { write_ccdf_csv(os, cc); });
    };
    emit(std::nullopt);
    for (ComponentLabel l : kAllLabels) emit(l);
  }
  return 0;
}

inline int cmd_evolve(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  const Date start = require_date(cfg.start, "--start");
  const Date end = require_date(cfg.end, "--end");
  const fs::path dir = output_dir(cfg);
  const Dataset d = load(cfg, err);
  const EvolutionSeries series = evolution(d, start, end, cfg.step_months, cfg.threads);
  write_file_atomically(dir / "evolution.csv", [&](std::ostream& os) { write_evolution_csv(os, series); });
  write_file_atomically(dir / "attribution.csv", [&](std::ostream& os) { write_attribution_csv(os, series); });
  return 0;
}

// --older/--newer each take a date (a snapshot of --edges) or a labels CSV.
inline int cmd_diff(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  const auto older_date = parse_date(cfg.older);
  const auto newer_date = parse_date(cfg.newer);
  std::optional<Dataset> d;
  if (older_date || newer_date) d = load(cfg, err);
  std::optional<Snapshot> older, newer;
  if (older_date) older = snapshot(*d, *older_date);
  if (newer_date) newer = snapshot(*d, *newer_date);
  const LabelTable a = older ? label_table(older->dataset.graph, older->classification) : read_labels(cfg.older);
  const LabelTable b = newer ? label_table(newer->dataset.graph, newer->classification) : read_labels(cfg.newer);
  const Agreement agree = agreement(a, b);
  write_json(dir / "agreement.json", agreement_json(agree));
  if (older && newer) {
    EvolutionSeries series;
    series.points.push_back(EvolutionPoint{newer->as_of, newer->summary, new_account_attribution(*older, *newer)});
    write_file_atomically(dir / "attribution.csv", [&](std::ostream& os) { write_attribution_csv(os, series); });
  }
  if (agree.no_overlap()) {
    out << "no overlap\n";
  } else {
    out << "agreement " << format_double(*agree.fraction()) << " over " << agree.common << " common ids\n";
  }
  return 0;
}

inline int cmd_validate_degrees(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  const Dataset d = load(cfg, err);
  const DegreeDiffReport r = validate_degrees(d);
  write_json(dir / "degree_diff.json", degree_diff_json(r));
  out << "followers zero-difference " << format_double(100.0 * r.followers_zero_fraction()) << "%, followings "
      << format_double(100.0 * r.followings_zero_fraction()) << "%\n";
  return 0;
}

// "LSC=10,IN=4" style assignments onto a per-label array.
template <class T>
void parse_label_assignments(const std::string& text, std::array<T, kLabelCount>& into, const char* flag) {
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = detail::trim(rest.substr(0, comma));
    rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    const auto label = eq == std::string_view::npos ? std::nullopt : parse_label(item.substr(0, eq));
    if (!label) throw ParseError(flag, 0, "expected LABEL=N, got '" + std::string(item) + "'");
    into[to_index(*label)] = static_cast<T>(detail::parse_count(item.substr(eq + 1), flag, flag, 0));
  }
}

inline int cmd_generate(const RunConfig& cfg, std::ostream&, std::ostream& err) {
  const fs::path dir = output_dir(cfg);
  PlantSpec spec = cfg.canon ? canon11_spec(cfg.seed) : PlantSpec{};
  spec.seed = cfg.seed;
  if (!cfg.plant.empty()) parse_label_assignments(cfg.plant, spec.sizes, "--plant");
  if (!cfg.depth.empty()) parse_label_assignments(cfg.depth, spec.depth, "--depth");
  if (cfg.extra_lsc > 0) spec.extra_lsc_arcs = cfg.extra_lsc;
  spec.fanout = cfg.fanout;
  err << "planting " << spec.total() << " nodes\n";
  const PlantedGraph planted = planted_bowtie(spec);
  err << "writing " << planted.graph.arc_count() << " arcs\n";
  write_file_atomically(dir / "edges.txt", [&](std::ostream& os) { write_edge_list(os, planted.graph); });
  {
    const std::vector<NodeMeta> meta = synthetic_metadata(planted.graph, cfg.seed);
    write_file_atomically(dir / "meta.csv", [&](std::ostream& os) {
      write_metadata_header(os);
      for (std::uint32_t u = 0; u < planted.graph.node_count(); ++u)
        write_metadata_row(os, planted.graph.external_id(u), meta[u]);
    });
  }
  write_file_atomically(dir / "expected_labels.csv",
                        [&](std::ostream& os) { write_labels(os, planted.graph, planted.expected); });
  return 0;
}

inline int cmd_oracle_check(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const OracleCheckResult r = oracle_check(cfg.trials, cfg.max_n, cfg.seed);
  const std::string line = std::to_string(r.matched) + "/" + std::to_string(r.trials) + " matched";
  out << line << '\n';
  if (!cfg.out.empty()) {
    const fs::path dir = output_dir(cfg);
    write_file_atomically(dir / "oracle_check.txt", [&](std::ostream& os) {
      os << line << '\n';
      if (r.first_mismatch_seed) os << "first mismatch seed " << *r.first_mismatch_seed << '\n';
    });
  }
  if (r.matched != r.trials) {
    throw ContractViolation("oracle-check: " + std::to_string(r.trials - r.matched) +
                            " instances disagree (first seed " + std::to_string(*r.first_mismatch_seed) + ")");
  }
  return 0;
}

//! Parses `args` (without the program name) and runs one subcommand. Exit
//! status: 0 success, 1 parse/input error, 2 resource exhaustion, 3 contract
//! violation.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Directed-graph macrostructure (bow-tie) decomposition"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto data_flags = [&](CLI::App* sub) {
    sub->add_option("--edges", cfg.edges, "arc file")->check(CLI::ExistingFile);
    sub->add_option("--format", cfg.format, "arc file format")->check(CLI::IsMember({"edge-list", "adjacency"}));
    sub->add_option("--meta", cfg.meta, "metadata CSV")->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--threads", cfg.threads, "worker thread hint");
    sub->add_option("--seed", cfg.seed, "random seed");
  };

  struct Command {
    CLI::App* app;
    int (*run)(const RunConfig&, std::ostream&, std::ostream&);
  };
  std::vector<Command> commands;
  auto add = [&](const char* name, const char* help, int (*run)(const RunConfig&, std::ostream&, std::ostream&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    data_flags(sub);
    commands.push_back({sub, run});
    return sub;
  };

  add("decompose", "classify every node; writes labels.csv and summary.json", cmd_decompose);
  auto* stats = add("stats", "per-component statistics; writes stats.json and ccdf/*.csv", cmd_stats);
  stats->add_option("--k", cfg.k, "outlier category size");
  stats->add_option("--labels", cfg.labels, "file of account IDs to cross-tabulate")->check(CLI::ExistingFile);
  stats->add_option("--as-of", cfg.as_of, "reference date for ages (default: latest creation date)");
  add("snapshot", "classify the graph as of a date", cmd_snapshot)
      ->add_option("--as-of", cfg.as_of, "YYYY-MM-DD")
      ->required();
  auto* evolve = add("evolve", "snapshots on a month grid; writes evolution.csv and attribution.csv", cmd_evolve);
  evolve->add_option("--start", cfg.start, "YYYY-MM-DD")->required();
  evolve->add_option("--end", cfg.end, "YYYY-MM-DD")->required();
  evolve->add_option("--step-months", cfg.step_months, "grid step in months");
  auto* diff = add("diff", "compare two classifications (dates or labels CSVs)", cmd_diff);
  diff->add_option("--older", cfg.older, "YYYY-MM-DD or labels CSV")->required();
  diff->add_option("--newer", cfg.newer, "YYYY-MM-DD or labels CSV")->required();
  add("validate-degrees", "compare API-reported degrees with the graph; writes degree_diff.json",
      cmd_validate_degrees);
  auto* gen = add("generate", "planted macrostructure; writes edges.txt, meta.csv, expected_labels.csv", cmd_generate);
  gen->add_option("--plant", cfg.plant, "component sizes, e.g. LSC=100,IN=20,OUT=20");
  gen->add_option("--depth", cfg.depth, "levels per component, e.g. IN=3,OUT_TENDRILS=2");
  gen->add_option("--extra-lsc", cfg.extra_lsc, "random extra arcs inside the LSC");
  gen->add_option("--fanout", cfg.fanout, "arcs from each chained node to its previous level");
  gen->add_flag("--canon", cfg.canon, "start from the 11-node reference shape");
  auto* oracle = add("oracle-check", "differential test against the brute-force oracle", cmd_oracle_check);
  oracle->add_option("--trials", cfg.trials, "number of random graphs");
  oracle->add_option("--max-n", cfg.max_n, "largest graph size");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  for (const Command& c : commands) {
    if (!c.app->parsed()) continue;
    try {
      return c.run(cfg, out, err);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return e.exit_code();
    } catch (const std::bad_alloc&) {
      err << "error: out of memory\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}

}  // namespace bowtie::cli
