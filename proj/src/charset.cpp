#include "xvpa/automata/charset.hpp"

#include <algorithm>
#include <cstdio>

namespace xvpa::automata {

namespace {

std::vector<CharSet::Range> normalize(std::vector<CharSet::Range> ranges) {
  std::sort(ranges.begin(), ranges.end());
  std::vector<CharSet::Range> out;
  for (const auto& r : ranges) {
    if (r.first > r.second) continue;
    if (!out.empty() && r.first <= out.back().second + 1) {
      out.back().second = std::max(out.back().second, r.second);
    } else {
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace

CharSet::CharSet(std::initializer_list<Range> ranges)
    : ranges_(normalize(std::vector<Range>(ranges))) {}

const CharSet& CharSet::nameStart() {
  static const CharSet set{{':', ':'},         {'A', 'Z'},         {'_', '_'},
                           {'a', 'z'},         {0xC0, 0xD6},       {0xD8, 0xF6},
                           {0xF8, 0x2FF},      {0x370, 0x37D},     {0x37F, 0x1FFF},
                           {0x200C, 0x200D},   {0x2070, 0x218F},   {0x2C00, 0x2FEF},
                           {0x3001, 0xD7FF},   {0xF900, 0xFDCF},   {0xFDF0, 0xFFFD},
                           {0x10000, 0xEFFFF}};
  return set;
}

const CharSet& CharSet::nameChar() {
  static const CharSet set = [] {
    CharSet s = nameStart();
    s.add('-', '.');
    s.add('0', '9');
    s.add(0xB7, 0xB7);
    s.add(0x300, 0x36F);
    s.add(0x203F, 0x2040);
    return s;
  }();
  return set;
}

const CharSet& CharSet::whitespace() {
  static const CharSet set{{0x9, 0xA}, {0xD, 0xD}, {0x20, 0x20}};
  return set;
}

const CharSet& CharSet::digit() {
  static const CharSet set{{'0', '9'}};
  return set;
}

void CharSet::add(CodePoint lo, CodePoint hi) {
  ranges_.emplace_back(lo, hi);
  ranges_ = normalize(std::move(ranges_));
}

void CharSet::add(const CharSet& other) {
  ranges_.insert(ranges_.end(), other.ranges_.begin(), other.ranges_.end());
  ranges_ = normalize(std::move(ranges_));
}

CharSet CharSet::unite(const CharSet& other) const {
  CharSet out = *this;
  out.add(other);
  return out;
}

CharSet CharSet::complement() const {
  CharSet out;
  CodePoint next = 0;
  for (const auto& [lo, hi] : ranges_) {
    if (lo > next) out.ranges_.emplace_back(next, lo - 1);
    next = hi + 1;
  }
  if (next <= kMaxCodePoint) out.ranges_.emplace_back(next, kMaxCodePoint);
  return out;
}

CharSet CharSet::intersect(const CharSet& other) const {
  CharSet out;
  std::size_t i = 0, j = 0;
  while (i < ranges_.size() && j < other.ranges_.size()) {
    CodePoint lo = std::max(ranges_[i].first, other.ranges_[j].first);
    CodePoint hi = std::min(ranges_[i].second, other.ranges_[j].second);
    if (lo <= hi) out.ranges_.emplace_back(lo, hi);
    if (ranges_[i].second < other.ranges_[j].second) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

CharSet CharSet::subtract(const CharSet& other) const {
  return intersect(other.complement());
}

bool CharSet::contains(CodePoint c) const {
  auto it = std::upper_bound(ranges_.begin(), ranges_.end(), c,
                             [](CodePoint v, const Range& r) { return v < r.first; });
  if (it == ranges_.begin()) return false;
  --it;
  return c <= it->second;
}

std::uint64_t CharSet::size() const {
  std::uint64_t n = 0;
  for (const auto& [lo, hi] : ranges_) n += std::uint64_t{hi} - lo + 1;
  return n;
}

std::string CharSet::toString() const {
  std::string out = "[";
  char buf[32];
  for (const auto& [lo, hi] : ranges_) {
    if (lo == hi) {
      std::snprintf(buf, sizeof buf, "\\x{%X}", static_cast<unsigned>(lo));
    } else {
      std::snprintf(buf, sizeof buf, "\\x{%X}-\\x{%X}", static_cast<unsigned>(lo),
                    static_cast<unsigned>(hi));
    }
    out += buf;
  }
  return out + "]";
}

}  // namespace xvpa::automata
