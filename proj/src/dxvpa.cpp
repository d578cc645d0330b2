#include "xvpa/dxvpa.hpp"

#include <algorithm>
#include <set>

namespace xvpa {

namespace {

std::string joinContext(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::string Dxvpa::moduleName(ModuleId m) const { return joinContext(modules_.at(m).context); }

bool Dxvpa::isFinal(StateId q) const { return std::binary_search(finals_.begin(), finals_.end(), q); }

std::vector<ModuleId> Dxvpa::startModules() const {
  std::vector<ModuleId> out;
  for (auto it = calls_.lower_bound({start_, std::string()}); it != calls_.end() && it->first.first == start_; ++it) {
    out.push_back(moduleOf_[it->second]);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<StateId> Dxvpa::call(StateId q, const std::string& element) const {
  auto it = calls_.find({q, element});
  if (it == calls_.end()) return std::nullopt;
  return it->second;
}

const Dxvpa::Choice* Dxvpa::choice(StateId q) const {
  auto it = internals_.find(q);
  return it == internals_.end() ? nullptr : &it->second;
}

std::optional<StateId> Dxvpa::ret(StateId q, const std::string& element, StateId popped) const {
  auto it = returns_.find({q, element, popped});
  if (it == returns_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::tuple<std::string, StateId, StateId>> Dxvpa::moduleReturns(ModuleId m) const {
  std::vector<std::tuple<std::string, StateId, StateId>> out;
  const auto& exits = modules_.at(m).exits;
  if (exits.empty()) return out;
  StateId x = exits.front();
  for (auto it = returns_.lower_bound({x, std::string(), StateId{0}}); it != returns_.end() && std::get<0>(it->first) == x;
       ++it) {
    out.emplace_back(std::get<1>(it->first), std::get<2>(it->first), it->second);
  }
  return out;
}

std::vector<std::string> Dxvpa::problems() const {
  std::vector<std::string> out;
  auto stateText = [&](StateId q) { return names_[q].render(); };
  for (ModuleId m = 0; m < modules_.size(); ++m) {
    const auto& mod = modules_[m];
    if (moduleOf_[mod.entry] != m) out.push_back("entry of module " + moduleName(m) + " lies outside it");
    auto expected = moduleReturns(m);
    for (StateId x : mod.exits) {
      std::vector<std::tuple<std::string, StateId, StateId>> got;
      for (auto it = returns_.lower_bound({x, std::string(), StateId{0}});
           it != returns_.end() && std::get<0>(it->first) == x; ++it) {
        got.emplace_back(std::get<1>(it->first), std::get<2>(it->first), it->second);
      }
      if (got != expected) out.push_back("single-exit violated in module " + moduleName(m) + " at " + stateText(x));
    }
  }
  std::set<StateId> choiceTargets;
  for (const auto& [q, c] : internals_) {
    if (c.types.empty()) out.push_back("empty datatype choice at " + stateText(q));
    if (moduleOf_[q] == kOuterModule || moduleOf_[q] != moduleOf_[c.target]) {
      out.push_back("internal transition leaves its module at " + stateText(q));
    }
    choiceTargets.insert(c.target);
  }
  for (const auto& [key, target] : calls_) {
    ModuleId callee = moduleOf_[target];
    if (callee == kOuterModule || modules_[callee].entry != target) {
      out.push_back("call from " + stateText(key.first) + " does not enter a module");
    } else if (modules_[callee].element != key.second) {
      out.push_back("call on " + key.second + " enters module " + moduleName(callee) + " of element " +
                    modules_[callee].element);
    }
  }
  for (const auto& [key, target] : returns_) {
    const auto& [source, element, popped] = key;
    ModuleId m = moduleOf_[source];
    if (m == kOuterModule) {
      out.push_back("return from outer state " + stateText(source));
      continue;
    }
    if (modules_[m].element != element) out.push_back("return on " + element + " leaves module " + moduleName(m));
    if (moduleOf_[popped] != moduleOf_[target]) out.push_back("return to " + stateText(target) + " crosses modules");
    if (choiceTargets.count(target)) out.push_back("return targets datatype-choice successor " + stateText(target));
  }
  return out;
}

bool Dxvpa::accepts(const DocumentEventStream& stream, const LexicalDatatypeSystem& dts) const {
  StateId q = start_;
  std::vector<StateId> stack;
  for (const auto& e : stream) {
    switch (e.kind) {
      case EventKind::StartElement: {
        auto next = call(q, e.name.render());
        if (!next) return false;
        stack.push_back(q);
        q = *next;
        break;
      }
      case EventKind::EndElement: {
        if (stack.empty()) return false;
        auto next = ret(q, e.name.render(), stack.back());
        if (!next) return false;
        stack.pop_back();
        q = *next;
        break;
      }
      case EventKind::Characters: {
        const Choice* c = choice(q);
        if (c == nullptr) return false;
        auto ids = c->types.ids();
        if (std::none_of(ids.begin(), ids.end(), [&](DatatypeId t) { return dts.lexAcceptsUtf8(t, e.text); })) {
          return false;
        }
        q = c->target;
        break;
      }
    }
  }
  return stack.empty() && isFinal(q);
}

Dxvpa Dxvpa::generate(const WeightedVpa& snapshot, bool minimizeModules) {
  auto reachable = snapshot.reachableStates();
  std::map<StateName, StateId> ids;
  for (const auto& q : reachable) ids.emplace(q, static_cast<StateId>(ids.size()));
  auto idOf = [&](const StateName& q) -> std::optional<StateId> {
    auto it = ids.find(q);
    if (it == ids.end()) return std::nullopt;
    return it->second;
  };

  Dxvpa a;
  for (const auto& [q, w] : snapshot.finals()) {
    if (auto id = idOf(q)) a.finals_.push_back(*id);
  }
  if (a.finals_.empty()) throw EmptyLanguage();
  std::sort(a.finals_.begin(), a.finals_.end());

  a.names_.assign(reachable.begin(), reachable.end());
  a.moduleOf_.assign(a.names_.size(), kOuterModule);
  a.start_ = *idOf(WeightedVpa::start());
  std::map<std::vector<std::string>, ModuleId> moduleIds;
  for (StateId q = 0; q < a.names_.size(); ++q) {
    const auto& context = a.names_[q].context;
    if (context.empty()) continue;
    auto [it, fresh] = moduleIds.emplace(context, static_cast<ModuleId>(a.modules_.size()));
    if (fresh) {
      Module m;
      m.context = context;
      auto entry = idOf(StateName{context, {}});
      if (!entry) throw InvalidAutomaton("module " + joinContext(context) + " has no reachable entry");
      m.entry = *entry;
      a.modules_.push_back(std::move(m));
    }
    a.moduleOf_[q] = it->second;
    a.modules_[it->second].states.push_back(q);
  }

  for (const auto& [t, w] : snapshot.calls()) {
    auto s = idOf(t.source), d = idOf(t.target);
    if (!s || !d) continue;
    a.calls_.emplace(CallKey{*s, t.element}, *d);
    ModuleId callee = a.moduleOf_[*d];
    if (callee == kOuterModule || a.modules_[callee].entry != *d) {
      throw InvalidAutomaton("call target " + t.target.render() + " is not a module entry");
    }
    auto& element = a.modules_[callee].element;
    if (element.empty()) {
      element = t.element;
    } else if (element != t.element) {
      throw InvalidAutomaton("module " + joinContext(t.target.context) + " is entered by two elements");
    }
  }
  for (const auto& m : a.modules_) {
    if (m.element.empty()) throw InvalidAutomaton("module " + joinContext(m.context) + " is never called");
  }
  for (const auto& [t, w] : snapshot.internals()) {
    auto s = idOf(t.source), d = idOf(t.target);
    if (!s || !d) continue;
    auto [it, fresh] = a.internals_.emplace(*s, Choice{DatatypeSet{}, *d});
    if (!fresh && it->second.target != *d) {
      throw InvalidAutomaton("datatype choice at " + t.source.render() + " has two successors");
    }
    it->second.types.insert(t.datatype);
  }
  std::vector<std::set<std::tuple<std::string, StateId, StateId>>> moduleReturns(a.modules_.size());
  for (const auto& [t, w] : snapshot.returns()) {
    auto s = idOf(t.source), p = idOf(t.popped), d = idOf(t.target);
    if (!s || !p || !d) continue;
    ModuleId m = a.moduleOf_[*s];
    if (m == kOuterModule) throw InvalidAutomaton("return from outer state " + t.source.render());
    moduleReturns[m].emplace(t.element, *p, *d);
    a.modules_[m].exits.push_back(*s);
  }
  // Every exit of a module gets all of the module's returns.
  for (ModuleId m = 0; m < a.modules_.size(); ++m) {
    auto& exits = a.modules_[m].exits;
    std::sort(exits.begin(), exits.end());
    exits.erase(std::unique(exits.begin(), exits.end()), exits.end());
    for (StateId x : exits) {
      for (const auto& [element, popped, target] : moduleReturns[m]) {
        auto [it, fresh] = a.returns_.emplace(ReturnKey{x, element, popped}, target);
        if (!fresh && it->second != target) {
          throw InvalidAutomaton("return on " + element + " from " + a.names_[x].render() + " is ambiguous");
        }
      }
    }
  }
  if (auto p = a.problems(); !p.empty()) throw InvalidAutomaton(p.front());
  return minimizeModules ? a.minimized() : a;
}

void Dxvpa::compact(const std::vector<bool>& moduleGone) {
  std::vector<ModuleId> newModule(modules_.size(), kOuterModule);
  std::vector<Module> modules;
  for (ModuleId m = 0; m < modules_.size(); ++m) {
    if (moduleGone[m]) continue;
    newModule[m] = static_cast<ModuleId>(modules.size());
    modules.push_back(std::move(modules_[m]));
  }
  constexpr StateId kGone = ~StateId{0};
  std::vector<StateId> newId(names_.size(), kGone);
  std::vector<StateName> names;
  std::vector<ModuleId> moduleOf;
  for (StateId q = 0; q < names_.size(); ++q) {
    ModuleId m = moduleOf_[q];
    if (m != kOuterModule && moduleGone[m]) continue;
    newId[q] = static_cast<StateId>(names.size());
    names.push_back(std::move(names_[q]));
    moduleOf.push_back(m == kOuterModule ? kOuterModule : newModule[m]);
  }
  auto live = [&](StateId q) { return newId[q] != kGone; };
  for (auto& m : modules) {
    m.entry = newId[m.entry];
    for (auto& q : m.states) q = newId[q];
    for (auto& q : m.exits) q = newId[q];
  }
  std::map<CallKey, StateId> calls;
  for (const auto& [key, target] : calls_) {
    if (live(key.first) && live(target)) calls.emplace(CallKey{newId[key.first], key.second}, newId[target]);
  }
  std::map<StateId, Choice> internals;
  for (const auto& [q, c] : internals_) {
    if (live(q) && live(c.target)) internals.emplace(newId[q], Choice{c.types, newId[c.target]});
  }
  std::map<ReturnKey, StateId> returns;
  for (const auto& [key, target] : returns_) {
    const auto& [source, element, popped] = key;
    if (live(source) && live(popped) && live(target)) {
      returns.emplace(ReturnKey{newId[source], element, newId[popped]}, newId[target]);
    }
  }
  std::vector<StateId> finals;
  for (StateId q : finals_) {
    if (live(q)) finals.push_back(newId[q]);
  }
  names_ = std::move(names);
  moduleOf_ = std::move(moduleOf);
  modules_ = std::move(modules);
  start_ = newId[start_];
  finals_ = std::move(finals);
  calls_ = std::move(calls);
  internals_ = std::move(internals);
  returns_ = std::move(returns);
}

}  // namespace xvpa
