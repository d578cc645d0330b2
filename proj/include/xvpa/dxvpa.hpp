#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "xvpa/datatypes.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/weighted_vpa.hpp"

namespace xvpa {

/// The snapshot has no reachable final state.
class EmptyLanguage : public std::runtime_error {
 public:
  EmptyLanguage() : std::runtime_error("the learned language is empty") {}
};

/// A generated automaton violates a structural invariant.
class InvalidAutomaton : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

using StateId = std::uint32_t;
using ModuleId = std::uint32_t;
inline constexpr ModuleId kOuterModule = ~ModuleId{0};

/// Datatyped XML VPA.
///
/// State ids are dense. The outer level holds the start state and the final
/// states reached by returning from a start module; every other state belongs
/// to exactly one module. Internal transitions are stored per source state
/// as one datatype choice with its unique successor.
class Dxvpa {
 public:
  struct Module {
    std::vector<std::string> context;  // typing context naming the module
    std::string element;               // μ(m), rendered name
    StateId entry = 0;
    std::vector<StateId> states;  // sorted
    std::vector<StateId> exits;   // sorted
  };
  struct Choice {
    DatatypeSet types;
    StateId target = 0;
    friend bool operator==(const Choice&, const Choice&) = default;
  };
  using CallKey = std::pair<StateId, std::string>;
  using ReturnKey = std::tuple<StateId, std::string, StateId>;  // source, element, popped

  [[nodiscard]] std::size_t stateCount() const { return names_.size(); }
  [[nodiscard]] const StateName& name(StateId q) const { return names_.at(q); }
  [[nodiscard]] ModuleId moduleOf(StateId q) const { return moduleOf_.at(q); }
  [[nodiscard]] const std::vector<Module>& modules() const { return modules_; }
  [[nodiscard]] const Module& module(ModuleId m) const { return modules_.at(m); }
  /// Rendered typing context, e.g. "ad model".
  [[nodiscard]] std::string moduleName(ModuleId m) const;
  [[nodiscard]] StateId start() const { return start_; }
  [[nodiscard]] const std::vector<StateId>& finals() const { return finals_; }
  [[nodiscard]] bool isFinal(StateId q) const;
  /// Modules called from the start state (one per distinct root element).
  [[nodiscard]] std::vector<ModuleId> startModules() const;

  [[nodiscard]] const std::map<CallKey, StateId>& calls() const { return calls_; }
  [[nodiscard]] const std::map<StateId, Choice>& internals() const { return internals_; }
  [[nodiscard]] const std::map<ReturnKey, StateId>& returns() const { return returns_; }

  [[nodiscard]] std::optional<StateId> call(StateId q, const std::string& element) const;
  [[nodiscard]] const Choice* choice(StateId q) const;
  [[nodiscard]] std::optional<StateId> ret(StateId q, const std::string& element, StateId popped) const;

  /// Returns of a module's exits, as (element, popped, target).
  [[nodiscard]] std::vector<std::tuple<std::string, StateId, StateId>> moduleReturns(ModuleId m) const;

  /// Violated invariants: single exit, datatype choice, datatype sequence,
  /// element map. Empty means valid.
  [[nodiscard]] std::vector<std::string> problems() const;

  /// Acceptance with datatype-set semantics: a text passes an internal
  /// transition when some datatype of the choice accepts it.
  [[nodiscard]] bool accepts(const DocumentEventStream& stream, const LexicalDatatypeSystem& dts) const;

  /// Builds the modular automaton from a trimmed snapshot, optionally followed by minimize.
  static Dxvpa generate(const WeightedVpa& snapshot, bool minimizeModules = true);
  /// Folds congruent modules until a fixed point.
  [[nodiscard]] Dxvpa minimized() const;
  /// Number of folds performed by the last minimized() call on the result.
  [[nodiscard]] std::size_t folds() const { return folds_; }

 private:
  friend class Minimizer;
  /// Drops the states of removed modules and renumbers states and modules.
  void compact(const std::vector<bool>& moduleGone);

  std::vector<StateName> names_;
  std::vector<ModuleId> moduleOf_;
  std::vector<Module> modules_;
  StateId start_ = 0;
  std::vector<StateId> finals_;  // sorted
  std::map<CallKey, StateId> calls_;
  std::map<StateId, Choice> internals_;
  std::map<ReturnKey, StateId> returns_;
  std::size_t folds_ = 0;
};

}  // namespace xvpa
