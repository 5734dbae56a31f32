#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "bowtie/date.hpp"
#include "bowtie/error.hpp"
#include "bowtie/graph.hpp"

namespace bowtie {

enum class InputFormat { edge_list, adjacency };

enum class AccountStatus : std::uint8_t { active, suspended, deactivated, unknown };

inline std::string_view status_name(AccountStatus s) noexcept {
  switch (s) {
    case AccountStatus::active: return "active";
    case AccountStatus::suspended: return "suspended";
    case AccountStatus::deactivated: return "deactivated";
    case AccountStatus::unknown: break;
  }
  return "unknown";
}

inline std::optional<AccountStatus> parse_status(std::string_view s) noexcept {
  for (auto st : {AccountStatus::active, AccountStatus::suspended, AccountStatus::deactivated, AccountStatus::unknown})
    if (status_name(st) == s) return st;
  return std::nullopt;
}

// Public per-account information. Nodes that only appear as arc targets get
// the defaults (no date, status unknown, has_record false).
struct NodeMeta {
  std::optional<Date> created_at;
  std::uint64_t tweet_count = 0;
  std::uint64_t api_followers = 0;
  std::uint64_t api_followings = 0;
  bool is_protected = false;
  AccountStatus status = AccountStatus::unknown;
  bool verified = false;
  bool expert = false;
  // A metadata row exists for this node.
  bool has_record = false;
  // The node appears in metadata only, never in the arc input.
  bool isolated = false;

  friend bool operator==(const NodeMeta&, const NodeMeta&) = default;
};

// Metadata rows sorted by ID.
struct MetaTable {
  std::vector<std::pair<ExternalId, NodeMeta>> rows;

  const NodeMeta* find(ExternalId id) const {
    auto it = std::lower_bound(rows.begin(), rows.end(), id,
                               [](const auto& row, ExternalId key) { return row.first < key; });
    return it != rows.end() && it->first == id ? &it->second : nullptr;
  }
  std::size_t size() const noexcept { return rows.size(); }
};

namespace detail {

inline bool is_blank(char c) noexcept { return c == ' ' || c == '\t' || c == '\r'; }

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

// Parses one decimal unsigned 64-bit ID filling the whole of `token`.
inline ExternalId parse_id(std::string_view token, std::string_view source, std::size_t line) {
  ExternalId value = 0;
  if (token.empty()) throw ParseError(std::string(source), line, "missing node id");
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec == std::errc::result_out_of_range)
    throw ParseError(std::string(source), line, "node id exceeds 2^64-1: '" + std::string(token) + "'");
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(std::string(source), line, "invalid node id '" + std::string(token) + "'");
  return value;
}

template <class Sink>
void parse_edge_line(std::string_view line, std::string_view source, std::size_t lineno, Sink& sink) {
  line = trim(line);
  if (line.empty() || line.front() == '#') return;
  std::size_t split = 0;
  while (split < line.size() && !is_blank(line[split])) ++split;
  const ExternalId src = parse_id(line.substr(0, split), source, lineno);
  const std::string_view rest = trim(line.substr(split));
  for (char ch : rest)
    if (is_blank(ch)) throw ParseError(std::string(source), lineno, "expected exactly two ids per line");
  if (rest.empty()) throw ParseError(std::string(source), lineno, "expected exactly two ids per line");
  sink.arc(src, parse_id(rest, source, lineno));
}

template <class Sink>
void parse_adjacency_line(std::string_view line, std::string_view source, std::size_t lineno, Sink& sink) {
  line = trim(line);
  if (line.empty() || line.front() == '#') return;
  const std::size_t colon = line.find(':');
  if (colon == std::string_view::npos) throw ParseError(std::string(source), lineno, "missing ':' after source id");
  const ExternalId src = parse_id(trim(line.substr(0, colon)), source, lineno);
  std::string_view rest = trim(line.substr(colon + 1));
  if (rest.empty()) {
    sink.node(src);
    return;
  }
  while (true) {
    const std::size_t comma = rest.find(',');
    sink.arc(src, parse_id(trim(rest.substr(0, comma)), source, lineno));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
}

template <class Sink>
void parse_line(InputFormat format, std::string_view line, std::string_view source, std::size_t lineno, Sink& sink) {
  if (format == InputFormat::edge_list) {
    parse_edge_line(line, source, lineno, sink);
  } else {
    parse_adjacency_line(line, source, lineno, sink);
  }
}

// Feeds complete lines of `text` to the parser; returns the number of lines.
template <class Sink>
std::size_t parse_text(InputFormat format, std::string_view text, std::string_view source, std::size_t first_line,
                       Sink& sink) {
  std::size_t lineno = first_line;
  std::size_t lines = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    parse_line(format, text.substr(0, nl), source, lineno, sink);
    ++lineno;
    ++lines;
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

struct ArcListSink {
  ArcList& list;
  void arc(ExternalId u, ExternalId v) { list.add(u, v); }
  void node(ExternalId u) { list.add_node(u); }
};

// Reads [begin, end) of a file in blocks, handing whole lines to the parser.
// Line numbers are relative to the start of the range.
template <class Sink>
std::size_t parse_file_range(InputFormat format, const std::filesystem::path& path, std::uint64_t begin,
                             std::uint64_t end, Sink& sink) {
  constexpr std::size_t kBlock = std::size_t{1} << 24;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  in.seekg(static_cast<std::streamoff>(begin));
  const std::string source = path.string();
  std::string buffer;
  std::size_t line = 1;
  std::uint64_t remaining = end - begin;
  while (remaining > 0) {
    const std::size_t keep = buffer.size();
    const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, remaining));
    buffer.resize(keep + want);
    in.read(buffer.data() + keep, static_cast<std::streamsize>(want));
    const auto got = static_cast<std::size_t>(in.gcount());
    buffer.resize(keep + got);
    remaining -= got;
    if (got == 0) break;
    const std::size_t last_nl = buffer.rfind('\n');
    if (last_nl == std::string::npos && remaining > 0) continue;
    const std::size_t cut = remaining == 0 ? buffer.size() : last_nl + 1;
    line += parse_text(format, std::string_view(buffer).substr(0, cut), source, line, sink);
    buffer.erase(0, cut);
  }
  if (!buffer.empty()) line += parse_text(format, buffer, source, line, sink);
  return line - 1;
}

// Counts newlines in [begin, end) of a file.
inline std::size_t count_lines(const std::filesystem::path& path, std::uint64_t begin, std::uint64_t end) {
  std::ifstream in(path, std::ios::binary);
  in.seekg(static_cast<std::streamoff>(begin));
  std::string buffer(std::size_t{1} << 20, '\0');
  std::size_t lines = 0;
  while (begin < end && in) {
    const auto want = static_cast<std::size_t>(std::min<std::uint64_t>(buffer.size(), end - begin));
    in.read(buffer.data(), static_cast<std::streamsize>(want));
    const auto got = static_cast<std::size_t>(in.gcount());
    lines += static_cast<std::size_t>(std::count(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(got), '\n'));
    begin += got;
    if (got == 0) break;
  }
  return lines;
}

}  // namespace detail

// Parses in-memory text. Mainly for tests and small inputs.
inline ArcList parse_arcs_text(InputFormat format, std::string_view text, std::string_view source = "<text>") {
  ArcList out;
  detail::ArcListSink sink{out};
  detail::parse_text(format, text, source, 1, sink);
  return out;
}

//! Streams every arc of a file to `on_arc(src, dst)` in file order and every
//! arc-less adjacency line to `on_node(src)`.
template <class OnArc, class OnNode>
void scan_arcs(InputFormat format, const std::filesystem::path& path, OnArc&& on_arc, OnNode&& on_node) {
  struct Sink {
    OnArc& a;
    OnNode& n;
    void arc(ExternalId u, ExternalId v) { a(u, v); }
    void node(ExternalId u) { n(u); }
  } sink{on_arc, on_node};
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw ParseError(path.string(), 0, "cannot open file");
  detail::parse_file_range(format, path, 0, size, sink);
}

//! Reads an arc file into an ArcList. With threads > 1 the file is split at
//! line boundaries and the shards are parsed concurrently, then concatenated
//! in file order, so the result is identical to a single-threaded read.
inline ArcList read_arcs(InputFormat format, const std::filesystem::path& path, unsigned threads = 1) {
  std::error_code ec;
  const std::uint64_t size = std::filesystem::file_size(path, ec);
  if (ec || !std::filesystem::is_regular_file(path)) throw ParseError(path.string(), 0, "cannot open file");
  threads = std::max(1u, threads);
  if (size < (std::uint64_t{1} << 20)) threads = 1;

  std::vector<std::uint64_t> cuts{0};
  {
    std::ifstream in(path, std::ios::binary);
    for (unsigned t = 1; t < threads; ++t) {
      std::uint64_t pos = std::max(cuts.back(), size * t / threads);
      in.clear();
      in.seekg(static_cast<std::streamoff>(pos));
      char ch;
      while (pos < size && in.get(ch)) {
        ++pos;
        if (ch == '\n') break;
      }
      cuts.push_back(pos);
    }
    cuts.push_back(size);
  }
  const std::size_t shards = cuts.size() - 1;
  std::vector<ArcList> parts(shards);
  std::vector<std::exception_ptr> errors(shards);
  auto work = [&](std::size_t s) {
    try {
      detail::ArcListSink sink{parts[s]};
      detail::parse_file_range(format, path, cuts[s], cuts[s + 1], sink);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  };
  if (shards == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t s = 0; s < shards; ++s) pool.emplace_back(work, s);
    for (auto& t : pool) t.join();
  }
  for (std::size_t s = 0; s < shards; ++s) {
    if (!errors[s]) continue;
    try {
      std::rethrow_exception(errors[s]);
    } catch (const ParseError& e) {
      if (s == 0 || e.line() == 0) throw;
      // Shard line numbers are relative; rebase onto the whole file.
      const std::string what = e.what();
      const std::string prefix = path.string() + ":" + std::to_string(e.line()) + ": ";
      const std::size_t global = detail::count_lines(path, 0, cuts[s]) + e.line();
      throw ParseError(path.string(), global,
                       what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
    }
  }
  ArcList out;
  for (auto& part : parts) out.append(std::move(part));
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const std::size_t comma = line.find(',');
    fields.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

inline std::uint64_t parse_count(std::string_view token, std::string_view column, std::string_view source,
                                 std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(std::string(source), line,
                     "invalid " + std::string(column) + " value '" + std::string(token) + "'");
  return value;
}

inline bool parse_bool(std::string_view token, std::string_view column, std::string_view source, std::size_t line) {
  if (token == "1" || token == "true") return true;
  if (token == "0" || token == "false" || token.empty()) return false;
  throw ParseError(std::string(source), line, "invalid " + std::string(column) + " value '" + std::string(token) + "'");
}

}  // namespace detail

//! Incremental parser for metadata CSV with header
//! id,created_at,tweets,api_followers,api_followings,protected,status[,verified,expert].
//! Columns are located by header name; the optional flag columns default to false.
class MetadataParser {
 public:
  explicit MetadataParser(std::string source) : source_(std::move(source)) { where_.fill(std::string_view::npos); }

  void feed(std::string_view raw) {
    ++lineno_;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) return;
    const auto fields = detail::split_csv(line);
    if (!header_seen_) {
      header_seen_ = true;
      width_ = fields.size();
      for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t c = 0; c < kColumns; ++c)
          if (fields[i] == kNames[c]) where_[c] = i;
      for (std::size_t c = 0; c <= kStatus; ++c)
        if (where_[c] == std::string_view::npos)
          throw ParseError(source_, lineno_, "missing column '" + std::string(kNames[c]) + "'");
      return;
    }
    if (fields.size() != width_)
      throw ParseError(source_, lineno_,
                       "expected " + std::to_string(width_) + " fields, got " + std::to_string(fields.size()));
    auto field = [&](Column c) { return where_[c] == std::string_view::npos ? std::string_view{} : fields[where_[c]]; };
    Row row{detail::parse_id(field(kId), source_, lineno_), lineno_, {}};
    NodeMeta& m = row.meta;
    m.has_record = true;
    m.created_at = parse_date(field(kCreated));
    if (!m.created_at || m.created_at->year() < std::chrono::year{1970})
      throw ParseError(source_, lineno_, "invalid created_at '" + std::string(field(kCreated)) + "'");
    m.tweet_count = detail::parse_count(field(kTweets), "tweets", source_, lineno_);
    m.api_followers = detail::parse_count(field(kFollowers), "api_followers", source_, lineno_);
    m.api_followings = detail::parse_count(field(kFollowings), "api_followings", source_, lineno_);
    m.is_protected = detail::parse_bool(field(kProtected), "protected", source_, lineno_);
    const auto status = parse_status(field(kStatus));
    if (!status) throw ParseError(source_, lineno_, "invalid status '" + std::string(field(kStatus)) + "'");
    m.status = *status;
    m.verified = detail::parse_bool(field(kVerified), "verified", source_, lineno_);
    m.expert = detail::parse_bool(field(kExpert), "expert", source_, lineno_);
    rows_.push_back(std::move(row));
  }

  // Sorts by ID and rejects duplicates.
  MetaTable finish() {
    std::stable_sort(rows_.begin(), rows_.end(), [](const Row& a, const Row& b) { return a.id < b.id; });
    MetaTable table;
    table.rows.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i > 0 && rows_[i].id == rows_[i - 1].id)
        throw ParseError(source_, rows_[i].line,
                         "duplicate id " + std::to_string(rows_[i].id) + " (first seen on line " +
                             std::to_string(rows_[i - 1].line) + ")");
      table.rows.emplace_back(rows_[i].id, rows_[i].meta);
    }
    std::vector<Row>().swap(rows_);
    return table;
  }

 private:
  enum Column { kId, kCreated, kTweets, kFollowers, kFollowings, kProtected, kStatus, kVerified, kExpert, kColumns };
  static constexpr std::array<std::string_view, kColumns> kNames = {
      "id", "created_at", "tweets", "api_followers", "api_followings", "protected", "status", "verified", "expert"};

  struct Row {
    ExternalId id;
    std::size_t line;
    NodeMeta meta;
  };

  std::string source_;
  std::array<std::size_t, kColumns> where_;
  std::vector<Row> rows_;
  std::size_t lineno_ = 0;
  std::size_t width_ = 0;
  bool header_seen_ = false;
};

inline MetaTable parse_metadata_text(std::string_view text, std::string_view source = "<metadata>") {
  MetadataParser parser{std::string(source)};
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    parser.feed(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  }
  return parser.finish();
}

inline MetaTable load_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  MetadataParser parser(path.string());
  std::string line;
  while (std::getline(in, line)) parser.feed(line);
  return parser.finish();
}

struct Provenance {
  std::vector<std::string> sources;
  BuildStats build;
  std::uint64_t metadata_records = 0;
  std::uint64_t metadata_only_nodes = 0;
};

//! A graph plus one metadata record per node (defaulted where the metadata
//! file had no row).
struct Dataset {
  Graph graph;
  std::vector<NodeMeta> meta;
  Provenance provenance;

  std::uint32_t node_count() const noexcept { return graph.node_count(); }
};

//! Joins arcs and metadata. Metadata IDs missing from the arc input become
//! arc-less nodes flagged `isolated`.
inline Dataset make_dataset(ArcList&& arcs, MetaTable&& table, std::vector<std::string> sources = {}) {
  std::vector<ExternalId> declared = arcs.nodes();
  std::sort(declared.begin(), declared.end());
  for (const auto& row : table.rows) arcs.add_node(row.first);

  Dataset d;
  d.graph = build_graph<std::uint32_t>(std::move(arcs));
  d.provenance.sources = std::move(sources);
  d.provenance.build = d.graph.build_stats();
  d.provenance.metadata_records = table.size();
  d.meta.assign(d.graph.node_count(), NodeMeta{});
  // Both sides are sorted by ID.
  std::size_t next = 0;
  for (auto& [id, m] : table.rows) {
    const auto ids = d.graph.external_ids();
    while (next < ids.size() && ids[next] < id) ++next;
    NodeMeta& slot = d.meta[next];
    slot = m;
    if (d.graph.out_degree(static_cast<std::uint32_t>(next)) == 0 &&
        d.graph.in_degree(static_cast<std::uint32_t>(next)) == 0 &&
        !std::binary_search(declared.begin(), declared.end(), id)) {
      slot.isolated = true;
      ++d.provenance.metadata_only_nodes;
    }
  }
  table.rows.clear();
  return d;
}

inline Dataset load_dataset(InputFormat format, const std::filesystem::path& edges,
                            const std::optional<std::filesystem::path>& metadata, unsigned threads = 1) {
  std::vector<std::string> sources{edges.string()};
  MetaTable table;
  if (metadata) {
    table = load_metadata(*metadata);
    sources.push_back(metadata->string());
  }
  ArcList arcs = read_arcs(format, edges, threads);
  return make_dataset(std::move(arcs), std::move(table), std::move(sources));
}

//! Histograms of (API-reported minus graph-computed) degree, over nodes that
//! have a metadata row.
struct DegreeDiffReport {
  std::map<std::int64_t, std::uint64_t> followers;
  std::map<std::int64_t, std::uint64_t> followings;
  std::uint64_t nodes = 0;

  double followers_zero_fraction() const { return zero_fraction(followers); }
  double followings_zero_fraction() const { return zero_fraction(followings); }

 private:
  double zero_fraction(const std::map<std::int64_t, std::uint64_t>& h) const {
    if (nodes == 0) return 0.0;
    auto it = h.find(0);
    return it == h.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(nodes);
  }
};

inline DegreeDiffReport validate_degrees(const Dataset& d) {
  DegreeDiffReport r;
  auto diff = [](std::uint64_t api, std::uint64_t computed) {
    return static_cast<std::int64_t>(api) - static_cast<std::int64_t>(computed);
  };
  for (std::uint32_t u = 0; u < d.node_count(); ++u) {
    const NodeMeta& m = d.meta[u];
    if (!m.has_record) continue;
    ++r.nodes;
    ++r.followers[diff(m.api_followers, d.graph.in_degree(u))];
    ++r.followings[diff(m.api_followings, d.graph.out_degree(u))];
  }
  return r;
}

// "src dst" per line, in index order.
template <class Index>
void write_edge_list(std::ostream& os, const Digraph<Index>& g) {
  std::string line;
  g.for_each_arc([&](Index u, Index v) {
    line.clear();
    line += std::to_string(g.external_id(u));
    line += ' ';
    line += std::to_string(g.external_id(v));
    line += '\n';
    os << line;
  });
}

inline void write_metadata_header(std::ostream& os) {
  os << "id,created_at,tweets,api_followers,api_followings,protected,status,verified,expert\n";
}

inline void write_metadata_row(std::ostream& os, ExternalId id, const NodeMeta& m) {
  os << id << ',' << (m.created_at ? format_date(*m.created_at) : std::string("1970-01-01")) << ','
     << m.tweet_count << ',' << m.api_followers << ',' << m.api_followings << ',' << (m.is_protected ? 1 : 0) << ','
     << status_name(m.status) << ',' << (m.verified ? 1 : 0) << ',' << (m.expert ? 1 : 0) << '\n';
}

}  // namespace bowtie
