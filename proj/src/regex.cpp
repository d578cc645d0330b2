#include "xvpa/automata/regex.hpp"

#include <memory>
#include <optional>

#include "xvpa/automata/utf8.hpp"

namespace xvpa::automata {

namespace {

struct Node {
  enum class Kind { Empty, Chars, Concat, Alternate, Repeat };
  Kind kind = Kind::Empty;
  CharSet chars;
  std::vector<std::unique_ptr<Node>> children;
  unsigned min = 0;
  std::optional<unsigned> max;  // nullopt = unbounded
};

using NodePtr = std::unique_ptr<Node>;

class Parser {
 public:
  explicit Parser(std::u32string text) : text_(std::move(text)) {}

  NodePtr parse() {
    NodePtr root = parseAlternation();
    if (pos_ != text_.size()) fail("unexpected ')'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw RegexError(pos_, what); }
  bool atEnd() const { return pos_ >= text_.size(); }
  CodePoint peek() const { return text_[pos_]; }

  NodePtr parseAlternation() {
    auto first = parseBranch();
    if (atEnd() || peek() != U'|') return first;
    auto alt = std::make_unique<Node>();
    alt->kind = Node::Kind::Alternate;
    alt->children.push_back(std::move(first));
    while (!atEnd() && peek() == U'|') {
      ++pos_;
      alt->children.push_back(parseBranch());
    }
    return alt;
  }

  NodePtr parseBranch() {
    auto seq = std::make_unique<Node>();
    seq->kind = Node::Kind::Concat;
    while (!atEnd() && peek() != U'|' && peek() != U')') {
      seq->children.push_back(parsePiece());
    }
    if (seq->children.empty()) {
      seq->kind = Node::Kind::Empty;
    }
    return seq;
  }

  NodePtr parsePiece() {
    NodePtr atom = parseAtom();
    while (!atEnd()) {
      CodePoint c = peek();
      unsigned min;
      std::optional<unsigned> max;
      if (c == U'?') {
        min = 0, max = 1, ++pos_;
      } else if (c == U'*') {
        min = 0, ++pos_;
      } else if (c == U'+') {
        min = 1, ++pos_;
      } else if (c == U'{') {
        ++pos_;
        min = parseNumber();
        if (!atEnd() && peek() == U',') {
          ++pos_;
          if (!atEnd() && peek() != U'}') max = parseNumber();
        } else {
          max = min;
        }
        if (atEnd() || peek() != U'}') fail("expected '}'");
        ++pos_;
        if (max && *max < min) fail("quantifier max below min");
      } else {
        break;
      }
      auto rep = std::make_unique<Node>();
      rep->kind = Node::Kind::Repeat;
      rep->min = min;
      rep->max = max;
      rep->children.push_back(std::move(atom));
      atom = std::move(rep);
    }
    return atom;
  }

  unsigned parseNumber() {
    if (atEnd() || peek() < U'0' || peek() > U'9') fail("expected number");
    unsigned n = 0;
    while (!atEnd() && peek() >= U'0' && peek() <= U'9') {
      n = n * 10 + static_cast<unsigned>(peek() - U'0');
      if (n > 10000) fail("quantifier too large");
      ++pos_;
    }
    return n;
  }

  NodePtr chars(CharSet set) {
    auto n = std::make_unique<Node>();
    n->kind = Node::Kind::Chars;
    n->chars = std::move(set);
    return n;
  }

  NodePtr parseAtom() {
    CodePoint c = peek();
    switch (c) {
      case U'(': {
        ++pos_;
        auto inner = parseAlternation();
        if (atEnd() || peek() != U')') fail("expected ')'");
        ++pos_;
        return inner;
      }
      case U'[':
        return chars(parseClass());
      case U'.':
        ++pos_;
        return chars(CharSet{{U'\n', U'\n'}, {U'\r', U'\r'}}.complement());
      case U'\\':
        return chars(parseEscape());
      case U'?':
      case U'*':
      case U'+':
      case U'{':
        fail("quantifier without operand");
      case U'}':
      case U']':
        fail("unbalanced bracket");
      default:
        ++pos_;
        return chars(CharSet::single(c));
    }
  }

  // Called with pos_ on the backslash.
  CharSet parseEscape() {
    ++pos_;
    if (atEnd()) fail("dangling backslash");
    CodePoint c = peek();
    ++pos_;
    switch (c) {
      case U'n': return CharSet::single(U'\n');
      case U'r': return CharSet::single(U'\r');
      case U't': return CharSet::single(U'\t');
      case U's': return CharSet::whitespace();
      case U'S': return CharSet::whitespace().complement();
      case U'i': return CharSet::nameStart();
      case U'I': return CharSet::nameStart().complement();
      case U'c': return CharSet::nameChar();
      case U'C': return CharSet::nameChar().complement();
      case U'd': return CharSet::digit();
      case U'D': return CharSet::digit().complement();
      case U'x': return CharSet::single(parseHexEscape());
      case U'\\': case U'|': case U'.': case U'?': case U'*': case U'+':
      case U'(': case U')': case U'{': case U'}': case U'-': case U'[':
      case U']': case U'^':
        return CharSet::single(c);
      default:
        --pos_;
        fail("unsupported escape");
    }
  }

  CodePoint parseHexEscape() {
    if (atEnd() || peek() != U'{') fail("expected '{' after \\x");
    ++pos_;
    std::uint32_t v = 0;
    int digits = 0;
    while (!atEnd() && peek() != U'}') {
      CodePoint h = peek();
      int d;
      if (h >= U'0' && h <= U'9') d = static_cast<int>(h - U'0');
      else if (h >= U'a' && h <= U'f') d = static_cast<int>(h - U'a' + 10);
      else if (h >= U'A' && h <= U'F') d = static_cast<int>(h - U'A' + 10);
      else fail("bad hex digit");
      v = v * 16 + static_cast<std::uint32_t>(d);
      if (++digits > 6 || v > kMaxCodePoint) fail("code point out of range");
      ++pos_;
    }
    if (atEnd() || digits == 0) fail("bad \\x{...} escape");
    ++pos_;
    return v;
  }

  // Called with pos_ on '['.
  CharSet parseClass() {
    ++pos_;
    bool negate = false;
    if (!atEnd() && peek() == U'^') {
      negate = true;
      ++pos_;
    }
    CharSet set;
    bool first = true;
    while (true) {
      if (atEnd()) fail("unterminated character class");
      CodePoint c = peek();
      if (c == U']' && !first) {
        ++pos_;
        break;
      }
      if (c == U'-' && !first && pos_ + 1 < text_.size() && text_[pos_ + 1] == U'[') {
        ++pos_;
        CharSet sub = parseClass();
        if (atEnd() || peek() != U']') fail("class subtraction must end the class");
        ++pos_;
        if (negate) set = set.complement();
        return set.subtract(sub);
      }
      first = false;
      CharSet item;
      std::optional<CodePoint> low;
      if (c == U'\\') {
        item = parseEscape();
        if (item.size() == 1) low = item.ranges().front().first;
      } else if (c == U'[') {
        fail("unescaped '[' in class");
      } else {
        ++pos_;
        low = c;
        item = CharSet::single(c);
      }
      if (low && !atEnd() && peek() == U'-' && pos_ + 1 < text_.size() &&
          text_[pos_ + 1] != U']' && text_[pos_ + 1] != U'[') {
        ++pos_;
        CodePoint hi;
        if (peek() == U'\\') {
          CharSet h = parseEscape();
          if (h.size() != 1) fail("range end must be a single character");
          hi = h.ranges().front().first;
        } else {
          hi = peek();
          ++pos_;
        }
        if (hi < *low) fail("inverted range");
        item = CharSet::range(*low, hi);
      }
      set.add(item);
    }
    return negate ? set.complement() : set;
  }

  std::u32string text_;
  std::size_t pos_ = 0;
};

class Builder {
 public:
  explicit Builder(Nfa& nfa) : nfa_(nfa) {}

  // Returns (entry, exit) of a fragment.
  std::pair<std::size_t, std::size_t> build(const Node& n) {
    switch (n.kind) {
      case Node::Kind::Empty: {
        auto s = add();
        return {s, s};
      }
      case Node::Kind::Chars: {
        auto a = add(), b = add();
        nfa_.states[a].moves.emplace_back(n.chars, b);
        return {a, b};
      }
      case Node::Kind::Concat: {
        auto [entry, exit] = build(*n.children.front());
        for (std::size_t i = 1; i < n.children.size(); ++i) {
          auto [e, x] = build(*n.children[i]);
          nfa_.states[exit].epsilon.push_back(e);
          exit = x;
        }
        return {entry, exit};
      }
      case Node::Kind::Alternate: {
        auto a = add(), b = add();
        for (const auto& child : n.children) {
          auto [e, x] = build(*child);
          nfa_.states[a].epsilon.push_back(e);
          nfa_.states[x].epsilon.push_back(b);
        }
        return {a, b};
      }
      case Node::Kind::Repeat: {
        const Node& body = *n.children.front();
        auto entry = add();
        auto exit = entry;
        for (unsigned i = 0; i < n.min; ++i) {
          auto [e, x] = build(body);
          nfa_.states[exit].epsilon.push_back(e);
          exit = x;
        }
        if (!n.max) {
          auto [e, x] = build(body);
          auto loop = add();
          nfa_.states[exit].epsilon.push_back(loop);
          nfa_.states[loop].epsilon.push_back(e);
          nfa_.states[x].epsilon.push_back(loop);
          exit = loop;
        } else {
          auto end = add();
          nfa_.states[exit].epsilon.push_back(end);
          for (unsigned i = n.min; i < *n.max; ++i) {
            auto [e, x] = build(body);
            nfa_.states[exit].epsilon.push_back(e);
            nfa_.states[x].epsilon.push_back(end);
            exit = x;
          }
          exit = end;
        }
        return {entry, exit};
      }
    }
    throw RegexError(0, "internal: unknown node");
  }

 private:
  std::size_t add() {
    nfa_.states.emplace_back();
    return nfa_.states.size() - 1;
  }
  Nfa& nfa_;
};

}  // namespace

Nfa compileRegex(std::string_view pattern) {
  auto decoded = decodeUtf8(pattern);
  if (!decoded) throw RegexError(0, "pattern is not valid UTF-8");
  Parser parser(std::move(*decoded));
  NodePtr root = parser.parse();
  Nfa nfa;
  Builder builder(nfa);
  auto [entry, exit] = builder.build(*root);
  nfa.start = entry;
  nfa.accept = exit;
  return nfa;
}

}  // namespace xvpa::automata
