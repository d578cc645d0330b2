#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xvpa/automata/charset.hpp"

namespace xvpa::automata {

class RegexError : public std::runtime_error {
 public:
  RegexError(std::size_t position, const std::string& what)
      : std::runtime_error("regex error at " + std::to_string(position) + ": " + what),
        position_(position) {}
  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Thompson NFA whose moves are labelled with code-point sets.
struct Nfa {
  struct State {
    std::vector<std::size_t> epsilon;
    std::vector<std::pair<CharSet, std::size_t>> moves;
  };
  std::vector<State> states;
  std::size_t start = 0;
  std::size_t accept = 0;
};

/// Compiles an XML Schema regular expression (implicitly anchored at both
/// ends) into an NFA.
///
/// Supported: alternation, grouping, ? * + {n} {n,} {n,m}, '.', character
/// classes with ranges, negation and class subtraction ([a-z-[aeiou]]),
/// the single-character escapes, \s \S \i \I \c \C \d \D, and the
/// extension \x{HHHH} for arbitrary code points. \d is ASCII-only.
/// Unicode category escapes (\p, \w) are rejected.
Nfa compileRegex(std::string_view pattern);

}  // namespace xvpa::automata
