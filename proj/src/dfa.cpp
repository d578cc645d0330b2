#include "xvpa/automata/dfa.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "xvpa/automata/utf8.hpp"

namespace xvpa::automata {

namespace {

constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

// Class index range [first, last] covered by a code-point interval.
std::pair<std::size_t, std::size_t> classSpan(const std::vector<CodePoint>& starts, CodePoint lo,
                                              CodePoint hi) {
  auto idx = [&](CodePoint c) {
    auto it = std::upper_bound(starts.begin(), starts.end(), c);
    return static_cast<std::size_t>(it - starts.begin()) - 1;
  };
  return {idx(lo), idx(hi)};
}

void epsilonClosure(const Nfa& nfa, std::vector<std::size_t>& set) {
  std::vector<bool> seen(nfa.states.size(), false);
  std::vector<std::size_t> stack = set;
  for (auto s : set) seen[s] = true;
  while (!stack.empty()) {
    auto s = stack.back();
    stack.pop_back();
    for (auto t : nfa.states[s].epsilon) {
      if (!seen[t]) {
        seen[t] = true;
        set.push_back(t);
        stack.push_back(t);
      }
    }
  }
  std::sort(set.begin(), set.end());
}

}  // namespace

Dfa::Dfa() : classStarts_{0} {}

std::size_t Dfa::classOf(CodePoint c) const {
  auto it = std::upper_bound(classStarts_.begin(), classStarts_.end(), c);
  return static_cast<std::size_t>(it - classStarts_.begin()) - 1;
}

CharSet Dfa::classChars(std::size_t cls) const {
  CodePoint hi = cls + 1 < classStarts_.size() ? classStarts_[cls + 1] - 1 : kMaxCodePoint;
  return CharSet::range(classStarts_[cls], hi);
}

Dfa::StateId Dfa::step(StateId state, CodePoint c) const {
  if (state == kDead || c > kMaxCodePoint) return kDead;
  return next(state, classOf(c));
}

Dfa Dfa::fromNfa(const Nfa& nfa) {
  std::set<CodePoint> bounds{0};
  for (const auto& st : nfa.states) {
    for (const auto& [chars, target] : st.moves) {
      for (const auto& [lo, hi] : chars.ranges()) {
        bounds.insert(lo);
        if (hi < kMaxCodePoint) bounds.insert(hi + 1);
      }
    }
  }
  Dfa dfa;
  dfa.classStarts_.assign(bounds.begin(), bounds.end());
  const std::size_t classes = dfa.classStarts_.size();

  // Per NFA state: (first class, last class, target).
  struct Move {
    std::size_t first, last, target;
  };
  std::vector<std::vector<Move>> moves(nfa.states.size());
  for (std::size_t s = 0; s < nfa.states.size(); ++s) {
    for (const auto& [chars, target] : nfa.states[s].moves) {
      for (const auto& [lo, hi] : chars.ranges()) {
        auto [f, l] = classSpan(dfa.classStarts_, lo, hi);
        moves[s].push_back({f, l, target});
      }
    }
  }

  std::map<std::vector<std::size_t>, StateId> index;
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> init{nfa.start};
  epsilonClosure(nfa, init);
  index.emplace(init, 0);
  subsets.push_back(init);
  for (std::size_t cur = 0; cur < subsets.size(); ++cur) {
    const auto subset = subsets[cur];
    dfa.accepting_.push_back(std::binary_search(subset.begin(), subset.end(), nfa.accept));
    for (std::size_t c = 0; c < classes; ++c) {
      std::vector<std::size_t> target;
      for (auto s : subset) {
        for (const auto& m : moves[s]) {
          if (m.first <= c && c <= m.last) target.push_back(m.target);
        }
      }
      if (target.empty()) {
        dfa.table_.push_back(kDead);
        continue;
      }
      std::sort(target.begin(), target.end());
      target.erase(std::unique(target.begin(), target.end()), target.end());
      epsilonClosure(nfa, target);
      auto [it, inserted] = index.emplace(target, static_cast<StateId>(subsets.size()));
      if (inserted) subsets.push_back(target);
      dfa.table_.push_back(it->second);
    }
  }
  dfa.start_ = 0;
  return dfa;
}

Dfa Dfa::fromPattern(std::string_view pattern) {
  return fromNfa(compileRegex(pattern)).minimized();
}

Dfa Dfa::minimized() const {
  if (start_ == kDead) return Dfa{};
  const std::size_t classes = classStarts_.size();
  const std::size_t n = accepting_.size();

  // Reachable states only.
  std::vector<bool> reachable(n, false);
  std::vector<StateId> order{start_};
  reachable[static_cast<std::size_t>(start_)] = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t c = 0; c < classes; ++c) {
      StateId t = next(order[i], c);
      if (t != kDead && !reachable[static_cast<std::size_t>(t)]) {
        reachable[static_cast<std::size_t>(t)] = true;
        order.push_back(t);
      }
    }
  }

  // Moore refinement on the completed automaton; index n is the sink.
  const std::size_t sink = n;
  std::vector<std::size_t> block(n + 1, 0);
  for (std::size_t s = 0; s < n; ++s) block[s] = accepting_[s] ? 1 : 0;
  block[sink] = 0;
  std::size_t blockCount = 0;
  while (true) {
    std::map<std::vector<std::size_t>, std::size_t> signatures;
    std::vector<std::size_t> refined(n + 1);
    auto sig = [&](std::size_t s) {
      std::vector<std::size_t> v;
      v.reserve(classes + 1);
      v.push_back(block[s]);
      for (std::size_t c = 0; c < classes; ++c) {
        if (s == sink) {
          v.push_back(block[sink]);
        } else {
          StateId t = next(static_cast<StateId>(s), c);
          v.push_back(block[t == kDead ? sink : static_cast<std::size_t>(t)]);
        }
      }
      return v;
    };
    for (std::size_t s = 0; s <= n; ++s) {
      if (s != sink && !reachable[s]) continue;
      auto [it, _] = signatures.emplace(sig(s), signatures.size());
      refined[s] = it->second;
    }
    bool stable = signatures.size() == blockCount;
    blockCount = signatures.size();
    block = std::move(refined);
    if (stable) break;
  }

  // Renumber blocks in BFS order from the start, dropping the sink's block.
  const std::size_t sinkBlock = block[sink];
  std::vector<StateId> blockId(blockCount, kDead);
  std::vector<std::size_t> representative;
  Dfa out;
  out.classStarts_ = classStarts_;
  std::deque<std::size_t> queue;
  if (block[static_cast<std::size_t>(start_)] == sinkBlock) return Dfa{};
  blockId[block[static_cast<std::size_t>(start_)]] = 0;
  representative.push_back(static_cast<std::size_t>(start_));
  queue.push_back(static_cast<std::size_t>(start_));
  while (!queue.empty()) {
    std::size_t s = queue.front();
    queue.pop_front();
    out.accepting_.push_back(accepting_[s]);
    for (std::size_t c = 0; c < classes; ++c) {
      StateId t = next(static_cast<StateId>(s), c);
      if (t == kDead || block[static_cast<std::size_t>(t)] == sinkBlock) {
        out.table_.push_back(kDead);
        continue;
      }
      auto b = block[static_cast<std::size_t>(t)];
      if (blockId[b] == kDead) {
        blockId[b] = static_cast<StateId>(representative.size());
        representative.push_back(static_cast<std::size_t>(t));
        queue.push_back(static_cast<std::size_t>(t));
      }
      out.table_.push_back(blockId[b]);
    }
  }
  out.start_ = 0;
  out.mergeAdjacentClasses();
  return out;
}

void Dfa::mergeAdjacentClasses() {
  const std::size_t classes = classStarts_.size();
  const std::size_t n = accepting_.size();
  std::vector<std::size_t> keep{0};
  for (std::size_t c = 1; c < classes; ++c) {
    bool same = true;
    for (std::size_t s = 0; s < n && same; ++s) {
      same = table_[s * classes + c] == table_[s * classes + keep.back()];
    }
    if (!same) keep.push_back(c);
  }
  if (keep.size() == classes) return;
  std::vector<CodePoint> starts;
  std::vector<StateId> table;
  for (auto c : keep) starts.push_back(classStarts_[c]);
  for (std::size_t s = 0; s < n; ++s) {
    for (auto c : keep) table.push_back(table_[s * classes + c]);
  }
  classStarts_ = std::move(starts);
  table_ = std::move(table);
}

Dfa Dfa::product(const Dfa& a, const Dfa& b, ProductOp op) {
  std::set<CodePoint> bounds(a.classStarts_.begin(), a.classStarts_.end());
  bounds.insert(b.classStarts_.begin(), b.classStarts_.end());
  Dfa out;
  out.classStarts_.assign(bounds.begin(), bounds.end());
  const std::size_t classes = out.classStarts_.size();
  std::vector<std::size_t> classA(classes), classB(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    classA[c] = a.classOf(out.classStarts_[c]);
    classB[c] = b.classOf(out.classStarts_[c]);
  }
  auto accept = [&](StateId x, StateId y) {
    bool ax = a.isAccepting(x), by = b.isAccepting(y);
    switch (op) {
      case ProductOp::Union: return ax || by;
      case ProductOp::Intersection: return ax && by;
      case ProductOp::Difference: return ax && !by;
    }
    return false;
  };
  auto alive = [&](StateId x, StateId y) {
    switch (op) {
      case ProductOp::Union: return x != kDead || y != kDead;
      case ProductOp::Intersection: return x != kDead && y != kDead;
      case ProductOp::Difference: return x != kDead;
    }
    return false;
  };
  std::map<std::pair<StateId, StateId>, StateId> index;
  std::vector<std::pair<StateId, StateId>> pairs;
  if (!alive(a.start_, b.start_)) return Dfa{};
  index.emplace(std::pair{a.start_, b.start_}, 0);
  pairs.emplace_back(a.start_, b.start_);
  for (std::size_t cur = 0; cur < pairs.size(); ++cur) {
    auto [x, y] = pairs[cur];
    out.accepting_.push_back(accept(x, y));
    for (std::size_t c = 0; c < classes; ++c) {
      StateId nx = x == kDead ? kDead : a.next(x, classA[c]);
      StateId ny = y == kDead ? kDead : b.next(y, classB[c]);
      if (!alive(nx, ny)) {
        out.table_.push_back(kDead);
        continue;
      }
      auto [it, inserted] = index.emplace(std::pair{nx, ny}, static_cast<StateId>(pairs.size()));
      if (inserted) pairs.emplace_back(nx, ny);
      out.table_.push_back(it->second);
    }
  }
  out.start_ = 0;
  return out;
}

Dfa Dfa::unite(const Dfa& a, const Dfa& b) { return product(a, b, ProductOp::Union).minimized(); }

Dfa Dfa::intersect(const Dfa& a, const Dfa& b) {
  return product(a, b, ProductOp::Intersection).minimized();
}

Dfa Dfa::difference(const Dfa& a, const Dfa& b) {
  return product(a, b, ProductOp::Difference).minimized();
}

bool Dfa::subsetOf(const Dfa& a, const Dfa& b) {
  return product(a, b, ProductOp::Difference).isEmpty();
}

bool Dfa::accepts(std::u32string_view text) const {
  StateId s = start_;
  for (CodePoint c : text) {
    s = step(s, c);
    if (s == kDead) return false;
  }
  return isAccepting(s);
}

bool Dfa::acceptsUtf8(std::string_view text) const {
  StateId s = start_;
  std::size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    CodePoint c;
    if (b0 < 0x80) {
      c = b0;
      ++i;
    } else {
      // Rare path: decode one sequence with the strict decoder.
      std::size_t len = (b0 & 0xE0) == 0xC0 ? 2 : (b0 & 0xF0) == 0xE0 ? 3 : (b0 & 0xF8) == 0xF0 ? 4 : 0;
      if (len == 0 || i + len > text.size()) return false;
      auto decoded = decodeUtf8(text.substr(i, len));
      if (!decoded || decoded->size() != 1) return false;
      c = (*decoded)[0];
      i += len;
    }
    s = step(s, c);
    if (s == kDead) return false;
  }
  return isAccepting(s);
}

bool Dfa::isEmpty() const {
  if (start_ == kDead) return true;
  std::vector<bool> seen(accepting_.size(), false);
  std::vector<StateId> stack{start_};
  seen[static_cast<std::size_t>(start_)] = true;
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    if (accepting_[static_cast<std::size_t>(s)]) return false;
    for (std::size_t c = 0; c < classStarts_.size(); ++c) {
      StateId t = next(s, c);
      if (t != kDead && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = true;
        stack.push_back(t);
      }
    }
  }
  return true;
}

std::vector<std::size_t> Dfa::distancesToAccept() const {
  const std::size_t n = accepting_.size();
  const std::size_t classes = classStarts_.size();
  std::vector<std::vector<std::size_t>> reverse(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t c = 0; c < classes; ++c) {
      StateId t = table_[s * classes + c];
      if (t != kDead) reverse[static_cast<std::size_t>(t)].push_back(s);
    }
  }
  std::vector<std::size_t> dist(n, kUnreachable);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    if (accepting_[s]) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    for (auto p : reverse[s]) {
      if (dist[p] == kUnreachable) {
        dist[p] = dist[s] + 1;
        queue.push_back(p);
      }
    }
  }
  return dist;
}

std::optional<std::u32string> Dfa::shortestMember() const {
  if (start_ == kDead) return std::nullopt;
  auto dist = distancesToAccept();
  std::size_t s = static_cast<std::size_t>(start_);
  if (dist[s] == kUnreachable) return std::nullopt;
  std::u32string out;
  const std::size_t classes = classStarts_.size();
  while (dist[s] != 0) {
    for (std::size_t c = 0; c < classes; ++c) {
      StateId t = table_[s * classes + c];
      if (t != kDead && dist[static_cast<std::size_t>(t)] + 1 == dist[s]) {
        out.push_back(classStarts_[c]);
        s = static_cast<std::size_t>(t);
        break;
      }
    }
  }
  return out;
}

std::optional<std::u32string> Dfa::sample(Rng& rng, const SampleOptions& options) const {
  if (start_ == kDead) return std::nullopt;
  auto dist = distancesToAccept();
  std::size_t s = static_cast<std::size_t>(start_);
  if (dist[s] == kUnreachable) return std::nullopt;
  static const CharSet preferred{{0x9, 0xA}, {0xD, 0xD}, {0x20, 0x7E}};
  static const CharSet surrogates = CharSet::range(0xD800, 0xDFFF);
  const std::size_t classes = classStarts_.size();
  std::u32string out;
  while (true) {
    const bool overBudget = out.size() >= options.maxLength;
    if (accepting_[s] && (overBudget || chance(rng, options.stopProbability))) return out;
    std::vector<std::size_t> candidates;
    for (std::size_t c = 0; c < classes; ++c) {
      StateId t = table_[s * classes + c];
      if (t == kDead) continue;
      auto dt = dist[static_cast<std::size_t>(t)];
      if (dt == kUnreachable) continue;
      if (overBudget && dt >= dist[s]) continue;
      if (classChars(c).subtract(surrogates).empty()) continue;
      candidates.push_back(c);
    }
    if (candidates.empty()) {
      if (accepting_[s]) return out;
      return std::nullopt;
    }
    // Favour classes that contain readable characters.
    std::vector<std::size_t> readable;
    for (auto c : candidates) {
      if (!classChars(c).intersect(preferred).empty()) readable.push_back(c);
    }
    const auto& pool = !readable.empty() && chance(rng, options.asciiBias) ? readable : candidates;
    std::size_t cls = pool[uniformBelow(rng, pool.size())];
    CharSet chars = classChars(cls).subtract(surrogates);
    CharSet nice = chars.intersect(preferred);
    const CharSet& from = !nice.empty() && chance(rng, options.asciiBias) ? nice : chars;
    std::uint64_t pick = uniformBelow(rng, from.size());
    CodePoint chosen = 0;
    for (const auto& [lo, hi] : from.ranges()) {
      std::uint64_t width = std::uint64_t{hi} - lo + 1;
      if (pick < width) {
        chosen = lo + static_cast<CodePoint>(pick);
        break;
      }
      pick -= width;
    }
    out.push_back(chosen);
    s = static_cast<std::size_t>(table_[s * classes + cls]);
  }
}

}  // namespace xvpa::automata
