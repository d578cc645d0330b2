#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xvpa/datatypes.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/weighted_vpa.hpp"

namespace xvpa {

enum class NamingMode : std::uint8_t { Ancestor, AncestorSibling };

struct NamingScheme {
  NamingMode mode = NamingMode::Ancestor;
  unsigned k = 1;  // left-sibling locality
  unsigned l = 1;  // typing-context locality

  /// Throws std::invalid_argument unless k, l >= 1.
  void check() const;
  /// "ancestor k=1 l=2" or "ancestor-sibling k=1 l=2".
  [[nodiscard]] std::string render() const;
  static NamingScheme parse(std::string_view text);

  friend bool operator==(const NamingScheme&, const NamingScheme&) = default;
};

std::string_view modeName(NamingMode mode);
NamingMode parseMode(std::string_view name);

/// σ_k: the last k tokens.
std::vector<std::string> suffix(std::vector<std::string> tokens, std::size_t k);

StateName callName(const NamingScheme& scheme, const StateName& q, const std::string& element);
StateName intName(const NamingScheme& scheme, const StateName& q);
StateName retName(const NamingScheme& scheme, const StateName& q, const StateName& popped, const std::string& element);

/// Characters events carry minReq of their text instead of the text.
struct DatatypedEvent {
  EventKind kind = EventKind::Characters;
  std::string element;  // rendered name for start and end events
  DatatypeSet types;    // characters events
};

DatatypedEvent dtyped(const LexicalDatatypeSystem& dts, const Event& e);

class LearnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// The run of unlearn left the automaton.
class MissingTransition : public LearnerError {
 public:
  using LearnerError::LearnerError;
};
/// A decrement would take a counter below zero.
class CounterUnderflow : public LearnerError {
 public:
  using LearnerError::LearnerError;
};
/// Operation refused: sanitized state or changed datatype system.
class PreconditionFailed : public LearnerError {
 public:
  using LearnerError::LearnerError;
};

enum class SanitizeOutcome : std::uint8_t { Applied, NotApplicable };

/// Persistent learner: weighted VPA, scheme, datatype hash, counters.
///
/// Mutations are transactional per document. One mutator at a time.
class Learner {
 public:
  struct MindChange {
    std::string digest;  // SHA-256 of the document's debug serialization
    std::uint64_t count = 0;
    friend bool operator==(const MindChange&, const MindChange&) = default;
  };

  Learner(NamingScheme scheme, std::shared_ptr<const LexicalDatatypeSystem> dts);

  /// Restores persisted state. `dtsHash` may differ from dts->hash(); in that
  /// case learn, unlearn and sanitize are refused.
  static Learner restore(NamingScheme scheme, std::shared_ptr<const LexicalDatatypeSystem> dts, std::string dtsHash,
                         bool sanitized, std::uint64_t documents, std::vector<MindChange> series, WeightedVpa vpa);

  /// Incremental weighted update on one document; returns its mind changes.
  std::uint64_t learn(const DocumentEventStream& doc);
  /// Exact inverse of a previous learn of the same document.
  void unlearn(const DocumentEventStream& doc);
  SanitizeOutcome sanitize();

  [[nodiscard]] const WeightedVpa& vpa() const { return vpa_; }
  [[nodiscard]] WeightedVpa snapshot() const { return vpa_.trim(*dts_); }
  [[nodiscard]] const NamingScheme& scheme() const { return scheme_; }
  [[nodiscard]] const LexicalDatatypeSystem& dts() const { return *dts_; }
  [[nodiscard]] std::shared_ptr<const LexicalDatatypeSystem> dtsPointer() const { return dts_; }
  [[nodiscard]] const std::string& dtsHash() const { return dtsHash_; }
  [[nodiscard]] bool hashMatches() const { return dtsHash_ == dts_->hash(); }
  [[nodiscard]] bool sanitized() const { return sanitized_; }
  [[nodiscard]] std::uint64_t documentsLearned() const { return documents_; }
  [[nodiscard]] const std::vector<MindChange>& mindChangeLog() const { return series_; }
  [[nodiscard]] std::vector<std::uint64_t> mindChangeSeries() const;

 private:
  void requireMutable(const char* operation) const;

  NamingScheme scheme_;
  std::shared_ptr<const LexicalDatatypeSystem> dts_;
  std::string dtsHash_;
  bool sanitized_ = false;
  std::uint64_t documents_ = 0;
  std::vector<MindChange> series_;
  WeightedVpa vpa_;
};

/// SHA-256 of toDebugText(doc).
std::string documentDigest(const DocumentEventStream& doc);

}  // namespace xvpa
