#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bowtie/bowtie.hpp"

namespace bowtie::testing {

inline Graph canon11() { return build_graph<std::uint32_t>(std::span<const Arc>(canon11_arcs())); }

inline Dataset canon11_dataset() {
  ArcList arcs;
  for (const Arc& a : canon11_arcs()) arcs.add(a.src, a.dst);
  return make_dataset(std::move(arcs), MetaTable{});
}

inline Date day(std::string_view text) { return parse_date(text).value(); }

// Index of an external ID that must exist.
inline std::uint32_t idx(const Graph& g, ExternalId id) { return *g.find(id); }

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(BOWTIE_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bowtie::testing
