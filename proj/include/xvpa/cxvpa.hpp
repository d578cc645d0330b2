#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xvpa/automata/dfa.hpp"
#include "xvpa/datatypes.hpp"
#include "xvpa/dxvpa.hpp"
#include "xvpa/event_stream.hpp"

namespace xvpa {

enum class RejectReason : std::uint8_t {
  None,
  UnexpectedElement,
  UnexpectedEnd,
  DatatypeMismatch,
  PrematureEof,
  TrailingContent,
  EmptyLanguage,
};

/// "unexpected-element", "datatype-mismatch", ...; "-" for None.
std::string_view reasonName(RejectReason reason);

struct Verdict {
  bool accepted = false;
  RejectReason reason = RejectReason::None;
  std::size_t eventIndex = 0;  // failing event, or the stream length at end of input
  std::string state;           // rendered state at failure

  static Verdict accept() { return {true, RejectReason::None, 0, {}}; }
};

/// Union acceptors per datatype set, shared across compilations against the
/// same datatype system. Thread-safe.
class PredicateCache {
 public:
  explicit PredicateCache(std::shared_ptr<const LexicalDatatypeSystem> dts) : dts_(std::move(dts)) {}
  std::shared_ptr<const automata::Dfa> get(DatatypeSet types);
  [[nodiscard]] const LexicalDatatypeSystem& dts() const { return *dts_; }

 private:
  std::shared_ptr<const LexicalDatatypeSystem> dts_;
  std::mutex mutex_;
  std::map<std::uint64_t, std::shared_ptr<const automata::Dfa>> cache_;
};

/// Character-data XVPA: each state has at most one internal transition,
/// guarded by a single predicate acceptor. Immutable and reentrant.
class Cxvpa {
 public:
  static Cxvpa compile(const Dxvpa& dxvpa, PredicateCache& cache);
  static Cxvpa compile(const Dxvpa& dxvpa, std::shared_ptr<const LexicalDatatypeSystem> dts);

  /// One pass over the stream with an explicit stack.
  [[nodiscard]] Verdict validate(const DocumentEventStream& stream) const;

  /// Incremental run for event-at-a-time validation.
  class Run {
   public:
    explicit Run(const Cxvpa& automaton);
    /// False once the run has failed; later events are ignored.
    bool step(const Event& e);
    /// Verdict at end of input.
    [[nodiscard]] Verdict finish() const;

   private:
    bool fail(RejectReason reason, std::size_t index);
    const Cxvpa* a_;
    StateId q_;
    std::vector<StateId> stack_;
    std::size_t seen_ = 0;
    Verdict failure_;
    bool failed_ = false;
  };

  [[nodiscard]] const Dxvpa& structure() const { return structure_; }
  /// Predicate acceptor of q, or nullptr.
  [[nodiscard]] const automata::Dfa* predicate(StateId q) const;
  /// Datatypes fused into q's predicate.
  [[nodiscard]] DatatypeSet predicateTypes(StateId q) const;
  [[nodiscard]] std::size_t predicateCount() const { return predicates_.size(); }

 private:
  static constexpr std::uint32_t kNone = ~std::uint32_t{0};
  struct ReturnKey {
    StateId source;
    std::uint32_t element;
    StateId popped;
    friend bool operator==(const ReturnKey&, const ReturnKey&) = default;
  };
  struct ReturnHash {
    std::size_t operator()(const ReturnKey& k) const noexcept;
  };

  [[nodiscard]] std::uint32_t elementId(const QualifiedName& name) const;
  [[nodiscard]] static std::uint64_t callKey(StateId q, std::uint32_t element) {
    return (std::uint64_t{q} << 32) | element;
  }

  Dxvpa structure_;
  std::unordered_map<std::string, std::uint32_t> elements_;
  std::unordered_map<std::uint64_t, StateId> calls_;
  std::unordered_map<ReturnKey, StateId, ReturnHash> returns_;
  std::vector<std::uint32_t> predicateOf_;  // per state, kNone without text
  std::vector<StateId> textTarget_;
  std::vector<bool> final_;
  std::vector<std::shared_ptr<const automata::Dfa>> predicates_;
};

}  // namespace xvpa
