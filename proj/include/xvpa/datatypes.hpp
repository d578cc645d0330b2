#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xvpa/automata/dfa.hpp"

namespace xvpa {

using DatatypeId = std::uint8_t;
using KindId = std::uint8_t;

inline constexpr std::size_t kMaxDatatypes = 64;

/// Set of datatypes of one lexical datatype system, as a bit mask.
class DatatypeSet {
 public:
  DatatypeSet() = default;
  explicit DatatypeSet(std::uint64_t bits) : bits_(bits) {}
  DatatypeSet(std::initializer_list<DatatypeId> ids) {
    for (auto id : ids) insert(id);
  }

  void insert(DatatypeId id) { bits_ |= std::uint64_t{1} << id; }
  void erase(DatatypeId id) { bits_ &= ~(std::uint64_t{1} << id); }
  [[nodiscard]] bool contains(DatatypeId id) const { return (bits_ >> id) & 1U; }
  [[nodiscard]] bool empty() const { return bits_ == 0; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  [[nodiscard]] std::uint64_t bits() const { return bits_; }

  [[nodiscard]] DatatypeSet unite(DatatypeSet other) const { return DatatypeSet(bits_ | other.bits_); }

  /// Members in increasing id order.
  [[nodiscard]] std::vector<DatatypeId> ids() const;

  friend auto operator<=>(const DatatypeSet&, const DatatypeSet&) = default;

 private:
  std::uint64_t bits_ = 0;
};

class DatatypeFileError : public std::runtime_error {
 public:
  DatatypeFileError(std::size_t line, const std::string& what)
      : std::runtime_error("datatype file line " + std::to_string(line) + ": " + what), line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Datatypes with regular lexical spaces, the lexical subsumption order
/// <=_lex and the kind preference order <=_s.
///
/// Immutable after construction.
class LexicalDatatypeSystem {
 public:
  struct Datatype {
    std::string name;
    KindId kind = 0;
    std::string pattern;
    automata::Dfa dfa;
  };

  /// Parses a definition file (see data/xsd-datatypes.txt for the format).
  static LexicalDatatypeSystem parse(std::string_view text);
  static LexicalDatatypeSystem fromFile(const std::filesystem::path& path);

  /// The definition compiled into the library.
  static std::string_view builtinText();
  static std::shared_ptr<const LexicalDatatypeSystem> builtin();
  /// `path` if given, else $XVPA_DATATYPES if set, else the builtin system.
  static std::shared_ptr<const LexicalDatatypeSystem> load(const std::optional<std::filesystem::path>& path);

  [[nodiscard]] std::size_t size() const { return types_.size(); }
  [[nodiscard]] const Datatype& datatype(DatatypeId id) const { return types_.at(id); }
  [[nodiscard]] const std::string& name(DatatypeId id) const { return types_.at(id).name; }
  [[nodiscard]] std::optional<DatatypeId> find(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  [[nodiscard]] DatatypeId id(std::string_view name) const;
  [[nodiscard]] DatatypeId top() const { return top_; }

  [[nodiscard]] std::size_t kindCount() const { return kinds_.size(); }
  [[nodiscard]] const std::string& kindName(KindId kind) const { return kinds_.at(kind); }
  [[nodiscard]] KindId kindOf(DatatypeId id) const { return types_.at(id).kind; }

  /// a <_lex b (strict, transitively closed).
  [[nodiscard]] bool lexLess(DatatypeId a, DatatypeId b) const { return lexAbove_[a].contains(b); }
  [[nodiscard]] bool lexLessEq(DatatypeId a, DatatypeId b) const { return a == b || lexLess(a, b); }
  /// Strict up-set of a.
  [[nodiscard]] DatatypeSet lexAbove(DatatypeId a) const { return lexAbove_[a]; }
  /// Directed edges as listed in the file.
  [[nodiscard]] const std::vector<std::pair<DatatypeId, DatatypeId>>& lexEdges() const { return lexEdges_; }
  /// k <_s k' (strict, transitively closed).
  [[nodiscard]] bool kindLess(KindId a, KindId b) const { return kindAbove_[a] >> b & 1U; }
  [[nodiscard]] const std::vector<std::pair<KindId, KindId>>& kindEdges() const { return kindEdges_; }

  /// Least elements first.
  [[nodiscard]] const std::vector<DatatypeId>& topologicalOrder() const { return order_; }

  [[nodiscard]] bool lexAccepts(DatatypeId id, std::u32string_view text) const {
    return types_.at(id).dfa.accepts(text);
  }
  [[nodiscard]] bool lexAcceptsUtf8(DatatypeId id, std::string_view text) const {
    return types_.at(id).dfa.acceptsUtf8(text);
  }

  [[nodiscard]] DatatypeSet minLex(std::u32string_view text) const;
  [[nodiscard]] DatatypeSet minLexUtf8(std::string_view text) const;
  /// Throws std::invalid_argument on an empty set.
  [[nodiscard]] DatatypeSet pref(DatatypeSet types) const;
  [[nodiscard]] DatatypeSet minReq(std::u32string_view text) const { return pref(minLex(text)); }
  [[nodiscard]] DatatypeSet minReqUtf8(std::string_view text) const { return pref(minLexUtf8(text)); }
  /// <=_lex maximal elements.
  [[nodiscard]] DatatypeSet maxLex(DatatypeSet types) const;
  [[nodiscard]] DatatypeSet aggregate(DatatypeSet a, DatatypeSet b) const { return maxLex(a.unite(b)); }
  [[nodiscard]] bool isAntichain(DatatypeSet types) const;

  /// Union of the lexical spaces, minimized.
  [[nodiscard]] automata::Dfa unionDfa(DatatypeSet types) const;

  /// Space-separated names in id order, e.g. "gYearMonth gYear".
  [[nodiscard]] std::string format(DatatypeSet types) const;
  /// Inverse of format; throws std::out_of_range for unknown names.
  [[nodiscard]] DatatypeSet parseSet(std::string_view names) const;

  /// Lowercase hex SHA-256 of the definition text.
  [[nodiscard]] const std::string& hash() const { return hash_; }

  struct Problem {
    std::string what;
  };
  /// Exact checks by automaton inclusion: every lex edge is sound and all
  /// lexical spaces are pairwise distinct. Returns the violations found.
  [[nodiscard]] std::vector<Problem> verify() const;

 private:
  LexicalDatatypeSystem() = default;

  std::vector<Datatype> types_;
  std::vector<std::string> kinds_;
  std::vector<std::pair<DatatypeId, DatatypeId>> lexEdges_;
  std::vector<std::pair<KindId, KindId>> kindEdges_;
  std::vector<DatatypeSet> lexAbove_;
  std::vector<std::uint64_t> kindAbove_;
  std::vector<DatatypeId> order_;
  DatatypeId top_ = 0;
  std::string hash_;
};

std::string sha256Hex(std::string_view bytes);

}  // namespace xvpa
