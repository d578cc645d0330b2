#include "xvpa/weighted_vpa.hpp"

#include <limits>
#include <set>

namespace xvpa {

namespace {

std::string joinTokens(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return "ε";
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

template <class Map, class Key>
WeightedVpa::Count lookup(const Map& map, const Key& key) {
  auto it = map.find(key);
  return it == map.end() ? 0 : it->second;
}

template <class Map, class Key>
WeightedVpa::Count store(Map& map, const Key& key, WeightedVpa::Count w) {
  auto it = map.find(key);
  WeightedVpa::Count previous = it == map.end() ? 0 : it->second;
  if (w == 0) {
    if (it != map.end()) map.erase(it);
  } else if (it == map.end()) {
    map.emplace(key, w);
  } else {
    it->second = w;
  }
  return previous;
}

WeightedVpa::Count saturatingAdd(WeightedVpa::Count a, WeightedVpa::Count b) {
  return a > std::numeric_limits<WeightedVpa::Count>::max() - b ? std::numeric_limits<WeightedVpa::Count>::max()
                                                                  : a + b;
}

}  // namespace

WeightedVpa::Count checkedAdd(WeightedVpa::Count a, WeightedVpa::Count b) {
  if (a > std::numeric_limits<WeightedVpa::Count>::max() - b) throw CounterOverflow();
  return a + b;
}

std::string StateName::render() const { return "(" + joinTokens(context) + ", " + joinTokens(siblings) + ")"; }

WeightedVpa::WeightedVpa() { states_.emplace(start(), 0); }

const StateName& WeightedVpa::start() {
  static const StateName s;
  return s;
}

WeightedVpa::Count WeightedVpa::stateWeight(const StateName& q) const { return lookup(states_, q); }
WeightedVpa::Count WeightedVpa::finalWeight(const StateName& q) const { return lookup(finals_, q); }
WeightedVpa::Count WeightedVpa::weight(const CallTransition& t) const { return lookup(calls_, t); }
WeightedVpa::Count WeightedVpa::weight(const InternalTransition& t) const { return lookup(internals_, t); }
WeightedVpa::Count WeightedVpa::weight(const ReturnTransition& t) const { return lookup(returns_, t); }

WeightedVpa::Count WeightedVpa::setState(const StateName& q, Count w) {
  if (q.isStart()) {
    auto previous = states_[q];
    states_[q] = w;
    return previous;
  }
  return store(states_, q, w);
}

WeightedVpa::Count WeightedVpa::setFinal(const StateName& q, Count w) { return store(finals_, q, w); }
WeightedVpa::Count WeightedVpa::set(const CallTransition& t, Count w) { return store(calls_, t, w); }
WeightedVpa::Count WeightedVpa::set(const InternalTransition& t, Count w) { return store(internals_, t, w); }
WeightedVpa::Count WeightedVpa::set(const ReturnTransition& t, Count w) { return store(returns_, t, w); }

WeightedVpa WeightedVpa::trim(const LexicalDatatypeSystem& dts) const {
  WeightedVpa out;
  out.states_ = states_;
  for (const auto& [q, w] : finals_) {
    if (states_.count(q)) out.finals_.emplace(q, w);
  }
  auto live = [&](const StateName& q) { return states_.count(q) > 0; };
  for (const auto& [t, w] : calls_) {
    if (live(t.source) && live(t.target)) out.calls_.emplace(t, w);
  }
  for (const auto& [t, w] : returns_) {
    if (live(t.source) && live(t.popped) && live(t.target)) out.returns_.emplace(t, w);
  }
  // Group by (source, target); keep the <=_lex maxima of each group.
  std::map<std::pair<StateName, StateName>, DatatypeSet> groups;
  for (const auto& [t, w] : internals_) {
    if (live(t.source) && live(t.target)) groups[{t.source, t.target}].insert(t.datatype);
  }
  for (const auto& [ends, types] : groups) {
    for (auto id : dts.maxLex(types).ids()) {
      InternalTransition t{ends.first, id, ends.second};
      out.internals_.emplace(t, internals_.at(t));
    }
  }
  return out;
}

WeightedVpa::Stats WeightedVpa::stats() const {
  Stats s;
  s.states = states_.size();
  s.finals = finals_.size();
  s.transitions = calls_.size() + internals_.size() + returns_.size();
  for (const auto& [q, w] : states_) s.totalWeight = saturatingAdd(s.totalWeight, w);
  for (const auto& [q, w] : finals_) s.totalWeight = saturatingAdd(s.totalWeight, w);
  for (const auto& [t, w] : calls_) s.totalWeight = saturatingAdd(s.totalWeight, w);
  for (const auto& [t, w] : internals_) s.totalWeight = saturatingAdd(s.totalWeight, w);
  for (const auto& [t, w] : returns_) s.totalWeight = saturatingAdd(s.totalWeight, w);
  return s;
}

std::vector<StateName> WeightedVpa::reachableStates() const {
  std::set<StateName> reached{start()};
  for (bool changed = true; changed;) {
    changed = false;
    auto add = [&](const StateName& q) {
      if (states_.count(q) && reached.insert(q).second) changed = true;
    };
    for (const auto& [t, w] : calls_) {
      if (reached.count(t.source)) add(t.target);
    }
    for (const auto& [t, w] : internals_) {
      if (reached.count(t.source)) add(t.target);
    }
    for (const auto& [t, w] : returns_) {
      if (reached.count(t.source) && reached.count(t.popped)) add(t.target);
    }
  }
  return {reached.begin(), reached.end()};
}

}  // namespace xvpa
