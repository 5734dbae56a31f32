#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <utility>

#include "bowtie/error.hpp"

namespace bowtie {

// Output file that only appears under its final name once commit() succeeds.
// Until then data goes to "<path>.tmp", which is removed if the writer is
// destroyed without committing.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path)
      : path_(std::move(path)), tmp_(path_.string() + ".tmp"), out_(tmp_, std::ios::binary | std::ios::trunc) {
    if (!out_) throw ParseError(path_.string(), 0, "cannot open for writing");
  }
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  ~AtomicFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw ParseError(path_.string(), 0, "write failed");
    out_.close();
    std::error_code ec;
    std::filesystem::rename(tmp_, path_, ec);
    if (ec) throw ParseError(path_.string(), 0, "rename failed: " + ec.message());
    committed_ = true;
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

template <class Writer>
void write_file_atomically(const std::filesystem::path& path, Writer&& writer) {
  AtomicFile file(path);
  writer(file.stream());
  file.commit();
}

}  // namespace bowtie
