#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "xvpa/datatypes.hpp"
#include "xvpa/learner.hpp"

namespace xvpa {

class StateFileError : public std::runtime_error {
 public:
  StateFileError(std::size_t line, const std::string& what)
      : std::runtime_error("state file line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Canonical text form: a versioned header, scalar fields, the mind-change
/// log, then counters in sorted order. Equal learners give equal text.
std::string serializeState(const Learner& learner);
/// The stored datatype hash is kept even when it differs from `dts`; the
/// learner then refuses mutations.
Learner parseState(std::string_view text, std::shared_ptr<const LexicalDatatypeSystem> dts);

Learner loadState(const std::filesystem::path& path, std::shared_ptr<const LexicalDatatypeSystem> dts);
/// Writes a sibling temporary file, flushes it and renames it over `path`.
void saveState(const std::filesystem::path& path, const Learner& learner);

/// Exclusive advisory lock on `<path>.lock`, held for the object's lifetime.
class StateLock {
 public:
  explicit StateLock(const std::filesystem::path& path);
  ~StateLock();
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace xvpa
