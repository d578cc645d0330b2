#include <algorithm>
#include <deque>
#include <unordered_map>

#include "xvpa/dxvpa.hpp"

namespace xvpa {

// Folds modules entered by the same element whose module automata are
// bisimilar. Module automata read datatype choices and call macro-edges
// labelled by (element, callee module) that lead to the return target.
class Minimizer {
 public:
  explicit Minimizer(Dxvpa a) : a_(std::move(a)), gone_(a_.modules_.size(), false) {}

  Dxvpa run() {
    std::size_t folds = 0;
    while (foldOnce()) ++folds;
    a_.compact(gone_);
    a_.folds_ = folds;
    return std::move(a_);
  }

 private:
  using Phi = std::unordered_map<StateId, StateId>;

  struct Step {
    std::string element;
    ModuleId callee;
    std::optional<StateId> target;
  };

  bool isExit(StateId q) const {
    const auto& exits = a_.modules_[a_.moduleOf_[q]].exits;
    return std::binary_search(exits.begin(), exits.end(), q);
  }

  std::vector<Step> steps(StateId q) const {
    std::vector<Step> out;
    for (auto it = a_.calls_.lower_bound({q, std::string()}); it != a_.calls_.end() && it->first.first == q; ++it) {
      ModuleId callee = a_.moduleOf_[it->second];
      Step s{it->first.second, callee, std::nullopt};
      const auto& exits = a_.modules_[callee].exits;
      if (!exits.empty()) s.target = a_.ret(exits.front(), it->first.second, q);
      out.push_back(std::move(s));
    }
    return out;
  }

  bool foldOnce() {
    for (ModuleId m = 0; m < a_.modules_.size(); ++m) {
      if (gone_[m]) continue;
      for (ModuleId n = 0; n < a_.modules_.size(); ++n) {
        if (n == m || gone_[n] || a_.modules_[n].element != a_.modules_[m].element) continue;
        if (auto phi = bisimulation(m, n)) {
          fold(m, n, *phi);
          return true;
        }
      }
    }
    return false;
  }

  // φ: Q_n -> Q_m when the module automata of m and n are bisimilar through a
  // bijection, otherwise nullopt.
  std::optional<Phi> bisimulation(ModuleId m, ModuleId n) const {
    Phi phi, inverse;
    std::deque<std::pair<StateId, StateId>> work;
    auto pair = [&](StateId x, StateId y) {
      auto f = phi.find(y);
      auto g = inverse.find(x);
      if (f != phi.end() || g != inverse.end()) {
        return f != phi.end() && g != inverse.end() && f->second == x && g->second == y;
      }
      phi.emplace(y, x);
      inverse.emplace(x, y);
      work.emplace_back(x, y);
      return true;
    };
    auto sameCallee = [&](ModuleId x, ModuleId y) {
      return x == y || ((x == m || x == n) && (y == m || y == n));
    };
    if (!pair(a_.modules_[m].entry, a_.modules_[n].entry)) return std::nullopt;
    while (!work.empty()) {
      auto [x, y] = work.front();
      work.pop_front();
      if (isExit(x) != isExit(y)) return std::nullopt;
      const auto* cx = a_.choice(x);
      const auto* cy = a_.choice(y);
      if ((cx == nullptr) != (cy == nullptr)) return std::nullopt;
      if (cx != nullptr && (cx->types != cy->types || !pair(cx->target, cy->target))) return std::nullopt;
      auto sx = steps(x), sy = steps(y);
      if (sx.size() != sy.size()) return std::nullopt;
      for (std::size_t i = 0; i < sx.size(); ++i) {
        if (sx[i].element != sy[i].element || !sameCallee(sx[i].callee, sy[i].callee)) return std::nullopt;
        if (sx[i].target.has_value() != sy[i].target.has_value()) return std::nullopt;
        if (sx[i].target && !pair(*sx[i].target, *sy[i].target)) return std::nullopt;
      }
    }
    if (phi.size() != a_.modules_[n].states.size() || inverse.size() != a_.modules_[m].states.size()) {
      return std::nullopt;
    }
    return phi;
  }

  void fold(ModuleId m, ModuleId n, const Phi& phi) {
    auto inN = [&](StateId q) { return a_.moduleOf_[q] == n; };
    auto map = [&](StateId q) { return inN(q) ? phi.at(q) : q; };
    const StateId entryM = a_.modules_[m].entry;
    const StateId entryN = a_.modules_[n].entry;

    // Callers of n now call m; m's exits return to them.
    auto returnsOfN = a_.moduleReturns(n);
    for (auto& [key, target] : a_.calls_) {
      if (target == entryN && !inN(key.first)) target = entryM;
    }
    for (const auto& [element, popped, target] : returnsOfN) {
      for (StateId x : a_.modules_[m].exits) {
        a_.returns_.emplace(Dxvpa::ReturnKey{x, element, map(popped)}, map(target));
      }
    }

    // Returns into n from its callees now land in m.
    std::map<Dxvpa::ReturnKey, StateId> returns;
    for (const auto& [key, target] : a_.returns_) {
      const auto& [source, element, popped] = key;
      if (inN(source)) continue;
      returns.emplace(Dxvpa::ReturnKey{source, element, map(popped)}, map(target));
    }
    a_.returns_ = std::move(returns);
    std::erase_if(a_.calls_, [&](const auto& entry) { return inN(entry.first.first); });
    std::erase_if(a_.internals_, [&](const auto& entry) { return inN(entry.first); });
    gone_[n] = true;
  }

  Dxvpa a_;
  std::vector<bool> gone_;
};

Dxvpa Dxvpa::minimized() const { return Minimizer(*this).run(); }

}  // namespace xvpa
