#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "xvpa/datatypes.hpp"

namespace xvpa {

/// Learner state name (u, v): typing context and left siblings. Tokens are
/// rendered element names plus the separator "#" and the text placeholder "$".
struct StateName {
  std::vector<std::string> context;
  std::vector<std::string> siblings;

  [[nodiscard]] bool isStart() const { return context.empty() && siblings.empty(); }
  /// "(u1 u2, v1)" with ε for empty parts.
  [[nodiscard]] std::string render() const;

  friend auto operator<=>(const StateName&, const StateName&) = default;
  friend bool operator==(const StateName&, const StateName&) = default;
};

inline const std::string kSeparatorToken = "#";
inline const std::string kTextToken = "$";

struct CallTransition {
  StateName source;
  std::string element;
  StateName target;
  friend auto operator<=>(const CallTransition&, const CallTransition&) = default;
};

struct InternalTransition {
  StateName source;
  DatatypeId datatype = 0;
  StateName target;
  friend auto operator<=>(const InternalTransition&, const InternalTransition&) = default;
};

struct ReturnTransition {
  StateName source;
  std::string element;
  StateName popped;
  StateName target;
  friend auto operator<=>(const ReturnTransition&, const ReturnTransition&) = default;
};

class CounterOverflow : public std::overflow_error {
 public:
  CounterOverflow() : std::overflow_error("weight counter would exceed 2^64-1") {}
};

/// Intermediate weighted VPA with counters ω_Q, ω_F, ω_δ.
///
/// Only positive counters are stored; an absent entry has weight zero. The
/// start state is always present, with weight zero unless set otherwise.
class WeightedVpa {
 public:
  using Count = std::uint64_t;

  WeightedVpa();

  [[nodiscard]] static const StateName& start();

  [[nodiscard]] const std::map<StateName, Count>& states() const { return states_; }
  [[nodiscard]] const std::map<StateName, Count>& finals() const { return finals_; }
  [[nodiscard]] const std::map<CallTransition, Count>& calls() const { return calls_; }
  [[nodiscard]] const std::map<InternalTransition, Count>& internals() const { return internals_; }
  [[nodiscard]] const std::map<ReturnTransition, Count>& returns() const { return returns_; }

  [[nodiscard]] Count stateWeight(const StateName& q) const;
  [[nodiscard]] Count finalWeight(const StateName& q) const;
  [[nodiscard]] Count weight(const CallTransition& t) const;
  [[nodiscard]] Count weight(const InternalTransition& t) const;
  [[nodiscard]] Count weight(const ReturnTransition& t) const;

  /// Setting zero removes the entry (except the start state). Return the
  /// previous weight.
  Count setState(const StateName& q, Count w);
  Count setFinal(const StateName& q, Count w);
  Count set(const CallTransition& t, Count w);
  Count set(const InternalTransition& t, Count w);
  Count set(const ReturnTransition& t, Count w);

  /// Copy without zero-weight entries, without transitions whose endpoints
  /// carry zero weight, and with each internal datatype set between two
  /// states reduced to its <=_lex maxima. Does not mutate.
  [[nodiscard]] WeightedVpa trim(const LexicalDatatypeSystem& dts) const;

  struct Stats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t finals = 0;
    /// Sum of all counters, saturating.
    Count totalWeight = 0;
    friend bool operator==(const Stats&, const Stats&) = default;
  };
  [[nodiscard]] Stats stats() const;

  /// Reachability from the start: calls and internals from reached states,
  /// returns when both source and popped state are reached.
  [[nodiscard]] std::vector<StateName> reachableStates() const;

  friend bool operator==(const WeightedVpa&, const WeightedVpa&) = default;

 private:
  std::map<StateName, Count> states_;
  std::map<StateName, Count> finals_;
  std::map<CallTransition, Count> calls_;
  std::map<InternalTransition, Count> internals_;
  std::map<ReturnTransition, Count> returns_;
};

/// a + b, throwing CounterOverflow instead of wrapping.
WeightedVpa::Count checkedAdd(WeightedVpa::Count a, WeightedVpa::Count b);

}  // namespace xvpa
