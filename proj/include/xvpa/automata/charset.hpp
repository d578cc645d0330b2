#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace xvpa::automata {

using CodePoint = char32_t;
inline constexpr CodePoint kMaxCodePoint = 0x10FFFF;

/// A set of Unicode code points stored as sorted, disjoint, non-adjacent
/// closed intervals.
class CharSet {
 public:
  using Range = std::pair<CodePoint, CodePoint>;

  CharSet() = default;
  CharSet(std::initializer_list<Range> ranges);

  static CharSet single(CodePoint c) { return CharSet{{c, c}}; }
  static CharSet range(CodePoint lo, CodePoint hi) { return CharSet{{lo, hi}}; }
  static CharSet all() { return range(0, kMaxCodePoint); }

  /// XML 1.0 (5th ed.) NameStartChar, the \i escape.
  static const CharSet& nameStart();
  /// XML 1.0 (5th ed.) NameChar, the \c escape.
  static const CharSet& nameChar();
  /// XML whitespace #x20 | #x9 | #xD | #xA, the \s escape.
  static const CharSet& whitespace();
  /// ASCII digits, the \d escape. Unicode Nd is intentionally not used.
  static const CharSet& digit();

  void add(CodePoint lo, CodePoint hi);
  void add(const CharSet& other);

  [[nodiscard]] CharSet unite(const CharSet& other) const;
  [[nodiscard]] CharSet intersect(const CharSet& other) const;
  [[nodiscard]] CharSet subtract(const CharSet& other) const;
  [[nodiscard]] CharSet complement() const;

  [[nodiscard]] bool contains(CodePoint c) const;
  [[nodiscard]] bool empty() const { return ranges_.empty(); }
  [[nodiscard]] std::uint64_t size() const;
  [[nodiscard]] const std::vector<Range>& ranges() const { return ranges_; }

  [[nodiscard]] std::string toString() const;

  friend bool operator==(const CharSet&, const CharSet&) = default;

 private:
  std::vector<Range> ranges_;
};

}  // namespace xvpa::automata
