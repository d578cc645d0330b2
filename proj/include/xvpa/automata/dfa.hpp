#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xvpa/automata/charset.hpp"
#include "xvpa/automata/regex.hpp"
#include "xvpa/random.hpp"

namespace xvpa::automata {

/// Deterministic finite acceptor over Unicode code points.
///
/// The alphabet is partitioned into contiguous classes; the transition table
/// is dense over (state, class). A missing transition is the implicit dead
/// state kDead. Instances are immutable once built.
class Dfa {
 public:
  using StateId = std::int32_t;
  static constexpr StateId kDead = -1;

  struct SampleOptions {
    double stopProbability = 0.15;
    std::size_t maxLength = 24;
    /// Probability of drawing a character from printable ASCII (plus tab,
    /// LF, CR) when the chosen class intersects it.
    double asciiBias = 0.95;
  };

  /// Accepts nothing.
  Dfa();

  static Dfa fromNfa(const Nfa& nfa);
  /// compileRegex + subset construction + minimization.
  static Dfa fromPattern(std::string_view pattern);

  static Dfa unite(const Dfa& a, const Dfa& b);
  static Dfa intersect(const Dfa& a, const Dfa& b);
  /// L(a) \ L(b)
  static Dfa difference(const Dfa& a, const Dfa& b);

  /// L(a) ⊆ L(b), decided exactly on the product automaton.
  static bool subsetOf(const Dfa& a, const Dfa& b);
  static bool equivalent(const Dfa& a, const Dfa& b) { return subsetOf(a, b) && subsetOf(b, a); }

  [[nodiscard]] Dfa minimized() const;

  [[nodiscard]] bool accepts(std::u32string_view text) const;
  /// Malformed UTF-8 is never accepted.
  [[nodiscard]] bool acceptsUtf8(std::string_view text) const;

  [[nodiscard]] bool isEmpty() const;
  [[nodiscard]] std::size_t stateCount() const { return accepting_.size(); }
  [[nodiscard]] std::size_t classCount() const { return classStarts_.size(); }

  [[nodiscard]] StateId start() const { return start_; }
  [[nodiscard]] StateId step(StateId state, CodePoint c) const;
  [[nodiscard]] bool isAccepting(StateId state) const {
    return state != kDead && accepting_[static_cast<std::size_t>(state)];
  }

  /// A shortest accepted string, if any.
  [[nodiscard]] std::optional<std::u32string> shortestMember() const;

  /// Random member of the language by a guided random walk; nullopt when
  /// the language is empty.
  [[nodiscard]] std::optional<std::u32string> sample(Rng& rng, const SampleOptions& options) const;
  [[nodiscard]] std::optional<std::u32string> sample(Rng& rng) const { return sample(rng, SampleOptions{}); }

 private:
  enum class ProductOp { Union, Intersection, Difference };
  static Dfa product(const Dfa& a, const Dfa& b, ProductOp op);

  [[nodiscard]] std::size_t classOf(CodePoint c) const;
  [[nodiscard]] StateId next(StateId s, std::size_t cls) const {
    return table_[static_cast<std::size_t>(s) * classStarts_.size() + cls];
  }
  [[nodiscard]] CharSet classChars(std::size_t cls) const;
  [[nodiscard]] std::vector<std::size_t> distancesToAccept() const;
  void mergeAdjacentClasses();

  std::vector<CodePoint> classStarts_;  // classStarts_[0] == 0
  std::vector<StateId> table_;
  std::vector<bool> accepting_;
  StateId start_ = kDead;
};

}  // namespace xvpa::automata
