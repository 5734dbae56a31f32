#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bowtie {

// Every failure raised by the library derives from Error. The kind decides
// the process exit status at the CLI layer.
class Error : public std::runtime_error {
 public:
  enum class Kind { parse = 1, resource = 2, contract = 3 };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  Kind kind_;
};

// Malformed input or an unreadable file. `line` is 1-based, 0 when not tied
// to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(Kind::parse, format(source, line, msg)), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& source, std::size_t line, const std::string& msg) {
    std::string out = source.empty() ? std::string("<input>") : source;
    if (line != 0) out += ":" + std::to_string(line);
    return out + ": " + msg;
  }

  std::size_t line_;
};

// Out of memory (or an index width overflow) during a named phase.
class ResourceError : public Error {
 public:
  ResourceError(const std::string& phase, const std::string& msg)
      : Error(Kind::resource, phase + ": " + msg), phase_(phase) {}

  const std::string& phase() const noexcept { return phase_; }

 private:
  std::string phase_;
};

// A caller broke an operation's precondition.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& msg) : Error(Kind::contract, msg) {}
};

inline void require(bool condition, const char* msg) {
  if (!condition) throw ContractViolation(msg);
}

}  // namespace bowtie
