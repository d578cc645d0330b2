#include "xvpa/learner.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace xvpa {

void NamingScheme::check() const {
  if (k < 1 || l < 1) throw std::invalid_argument("naming scheme needs k >= 1 and l >= 1");
}

std::string_view modeName(NamingMode mode) {
  return mode == NamingMode::Ancestor ? "ancestor" : "ancestor-sibling";
}

NamingMode parseMode(std::string_view name) {
  if (name == "ancestor") return NamingMode::Ancestor;
  if (name == "ancestor-sibling") return NamingMode::AncestorSibling;
  throw std::invalid_argument("unknown naming mode '" + std::string(name) + "'");
}

std::string NamingScheme::render() const {
  return std::string(modeName(mode)) + " k=" + std::to_string(k) + " l=" + std::to_string(l);
}

NamingScheme NamingScheme::parse(std::string_view text) {
  NamingScheme out;
  bool sawMode = false, sawK = false, sawL = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    auto field = text.substr(pos, end - pos);
    pos = end;
    if (field.empty()) continue;
    auto number = [&](std::string_view digits) {
      if (digits.empty() || digits.size() > 6 ||
          !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("bad locality '" + std::string(field) + "'");
      }
      return static_cast<unsigned>(std::stoul(std::string(digits)));
    };
    if (field.starts_with("k=")) {
      out.k = number(field.substr(2));
      sawK = true;
    } else if (field.starts_with("l=")) {
      out.l = number(field.substr(2));
      sawL = true;
    } else if (field.starts_with("mode=")) {
      out.mode = parseMode(field.substr(5));
      sawMode = true;
    } else {
      out.mode = parseMode(field);
      sawMode = true;
    }
  }
  if (!sawMode || !sawK || !sawL) throw std::invalid_argument("naming scheme needs mode, k and l");
  out.check();
  return out;
}

std::vector<std::string> suffix(std::vector<std::string> tokens, std::size_t k) {
  if (tokens.size() > k) tokens.erase(tokens.begin(), tokens.end() - static_cast<std::ptrdiff_t>(k));
  return tokens;
}

StateName callName(const NamingScheme& scheme, const StateName& q, const std::string& element) {
  StateName out;
  if (scheme.mode == NamingMode::Ancestor) {
    auto context = q.context;
    context.push_back(element);
    out.context = suffix(std::move(context), scheme.l);
    return out;
  }
  // Split the context at separators, keep the last l segments, then append
  // the k-suffix of the left siblings extended by the element.
  std::vector<std::vector<std::string>> segments;
  if (!q.context.empty()) {
    segments.emplace_back();
    for (const auto& token : q.context) {
      if (token == kSeparatorToken) {
        segments.emplace_back();
      } else {
        segments.back().push_back(token);
      }
    }
  }
  if (segments.size() > scheme.l) segments.erase(segments.begin(), segments.end() - scheme.l);
  auto siblings = q.siblings;
  siblings.push_back(element);
  segments.push_back(suffix(std::move(siblings), scheme.k));
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0) out.context.push_back(kSeparatorToken);
    out.context.insert(out.context.end(), segments[i].begin(), segments[i].end());
  }
  return out;
}

StateName intName(const NamingScheme& scheme, const StateName& q) {
  StateName out{q.context, q.siblings};
  out.siblings.push_back(kTextToken);
  out.siblings = suffix(std::move(out.siblings), scheme.k);
  return out;
}

StateName retName(const NamingScheme& scheme, const StateName&, const StateName& popped, const std::string& element) {
  StateName out{popped.context, popped.siblings};
  out.siblings.push_back(element);
  out.siblings = suffix(std::move(out.siblings), scheme.k);
  return out;
}

DatatypedEvent dtyped(const LexicalDatatypeSystem& dts, const Event& e) {
  if (e.kind == EventKind::Characters) return {e.kind, {}, dts.minReqUtf8(e.text)};
  return {e.kind, e.name.render(), {}};
}

std::string documentDigest(const DocumentEventStream& doc) { return sha256Hex(toDebugText(doc)); }

namespace {

// Counter changes of one document, applied only after all checks pass.
struct Delta {
  std::map<StateName, WeightedVpa::Count> states;
  std::map<StateName, WeightedVpa::Count> finals;
  std::map<CallTransition, WeightedVpa::Count> calls;
  std::map<InternalTransition, WeightedVpa::Count> internals;
  std::map<ReturnTransition, WeightedVpa::Count> returns;
};

template <class Key>
void bump(std::map<Key, WeightedVpa::Count>& m, const Key& key) {
  ++m[key];
}

}  // namespace

Learner::Learner(NamingScheme scheme, std::shared_ptr<const LexicalDatatypeSystem> dts)
    : scheme_(scheme), dts_(std::move(dts)) {
  scheme_.check();
  if (!dts_) throw std::invalid_argument("learner needs a datatype system");
  dtsHash_ = dts_->hash();
}

Learner Learner::restore(NamingScheme scheme, std::shared_ptr<const LexicalDatatypeSystem> dts, std::string dtsHash,
                         bool sanitized, std::uint64_t documents, std::vector<MindChange> series, WeightedVpa vpa) {
  Learner out(scheme, std::move(dts));
  out.dtsHash_ = std::move(dtsHash);
  out.sanitized_ = sanitized;
  out.documents_ = documents;
  out.series_ = std::move(series);
  out.vpa_ = std::move(vpa);
  return out;
}

void Learner::requireMutable(const char* operation) const {
  if (!hashMatches()) {
    throw PreconditionFailed(std::string(operation) + " refused: state was built with a different datatype system");
  }
}

std::vector<std::uint64_t> Learner::mindChangeSeries() const {
  std::vector<std::uint64_t> out;
  out.reserve(series_.size());
  for (const auto& mc : series_) out.push_back(mc.count);
  return out;
}

std::uint64_t Learner::learn(const DocumentEventStream& doc) {
  requireMutable("learn");
  Delta delta;
  std::vector<StateName> stack;
  StateName q = WeightedVpa::start();
  for (const auto& event : doc) {
    auto e = dtyped(*dts_, event);
    switch (e.kind) {
      case EventKind::StartElement: {
        StateName next = callName(scheme_, q, e.element);
        bump(delta.states, next);
        bump(delta.calls, CallTransition{q, e.element, next});
        stack.push_back(std::move(q));
        q = std::move(next);
        break;
      }
      case EventKind::EndElement: {
        StateName p = std::move(stack.back());
        stack.pop_back();
        StateName next = retName(scheme_, q, p, e.element);
        bump(delta.states, next);
        bump(delta.returns, ReturnTransition{q, e.element, std::move(p), next});
        q = std::move(next);
        break;
      }
      case EventKind::Characters: {
        StateName next = intName(scheme_, q);
        bump(delta.states, next);
        for (auto tau : e.types.ids()) bump(delta.internals, InternalTransition{q, tau, next});
        q = std::move(next);
        break;
      }
    }
  }
  bump(delta.finals, q);

  // Check every addition first so a failure leaves no trace.
  for (const auto& [k, d] : delta.states) checkedAdd(vpa_.stateWeight(k), d);
  for (const auto& [k, d] : delta.finals) checkedAdd(vpa_.finalWeight(k), d);
  for (const auto& [k, d] : delta.calls) checkedAdd(vpa_.weight(k), d);
  for (const auto& [k, d] : delta.internals) checkedAdd(vpa_.weight(k), d);
  for (const auto& [k, d] : delta.returns) checkedAdd(vpa_.weight(k), d);
  checkedAdd(documents_, 1);

  std::uint64_t changes = 0;
  for (const auto& [k, d] : delta.states) changes += vpa_.setState(k, vpa_.stateWeight(k) + d) == 0;
  for (const auto& [k, d] : delta.finals) changes += vpa_.setFinal(k, vpa_.finalWeight(k) + d) == 0;
  for (const auto& [k, d] : delta.calls) changes += vpa_.set(k, vpa_.weight(k) + d) == 0;
  for (const auto& [k, d] : delta.internals) changes += vpa_.set(k, vpa_.weight(k) + d) == 0;
  for (const auto& [k, d] : delta.returns) changes += vpa_.set(k, vpa_.weight(k) + d) == 0;
  ++documents_;
  series_.push_back({documentDigest(doc), changes});
  return changes;
}

void Learner::unlearn(const DocumentEventStream& doc) {
  requireMutable("unlearn");
  if (sanitized_) throw PreconditionFailed("unlearn refused: the state has been sanitized");
  if (documents_ == 0) throw CounterUnderflow("unlearn refused: no documents learned");
  Delta delta;
  std::vector<StateName> stack;
  StateName q = WeightedVpa::start();
  const auto& calls = vpa_.calls();
  const auto& internals = vpa_.internals();
  const auto& returns = vpa_.returns();
  for (const auto& event : doc) {
    auto e = dtyped(*dts_, event);
    switch (e.kind) {
      case EventKind::StartElement: {
        auto it = calls.lower_bound(CallTransition{q, e.element, {}});
        if (it == calls.end() || it->first.source != q || it->first.element != e.element) {
          throw MissingTransition("no call on " + e.element + " from " + q.render() + " at event " +
                                  std::to_string(event.index));
        }
        bump(delta.states, it->first.target);
        bump(delta.calls, it->first);
        stack.push_back(std::move(q));
        q = it->first.target;
        break;
      }
      case EventKind::EndElement: {
        StateName p = std::move(stack.back());
        stack.pop_back();
        auto it = returns.lower_bound(ReturnTransition{q, e.element, p, {}});
        if (it == returns.end() || it->first.source != q || it->first.element != e.element || it->first.popped != p) {
          throw MissingTransition("no return on " + e.element + " from " + q.render() + " at event " +
                                  std::to_string(event.index));
        }
        bump(delta.states, it->first.target);
        bump(delta.returns, it->first);
        q = it->first.target;
        break;
      }
      case EventKind::Characters: {
        const StateName* next = nullptr;
        for (auto tau : e.types.ids()) {
          auto it = internals.lower_bound(InternalTransition{q, tau, {}});
          if (it != internals.end() && it->first.source == q && it->first.datatype == tau) {
            next = &it->first.target;
            break;
          }
        }
        if (next == nullptr) {
          throw MissingTransition("no internal transition on {" + dts_->format(e.types) + "} from " + q.render() +
                                  " at event " + std::to_string(event.index));
        }
        StateName target = *next;
        for (auto tau : e.types.ids()) {
          InternalTransition t{q, tau, target};
          if (!internals.count(t)) {
            throw MissingTransition("no internal transition on " + dts_->name(tau) + " from " + q.render());
          }
          bump(delta.internals, t);
        }
        bump(delta.states, target);
        q = std::move(target);
        break;
      }
    }
  }
  bump(delta.finals, q);

  auto underflow = [](const std::string& what) { throw CounterUnderflow("counter underflow on " + what); };
  for (const auto& [k, d] : delta.states) {
    if (vpa_.stateWeight(k) < d) underflow("state " + k.render());
  }
  for (const auto& [k, d] : delta.finals) {
    if (vpa_.finalWeight(k) < d) underflow("final " + k.render());
  }
  for (const auto& [k, d] : delta.calls) {
    if (vpa_.weight(k) < d) underflow("call from " + k.source.render());
  }
  for (const auto& [k, d] : delta.internals) {
    if (vpa_.weight(k) < d) underflow("internal transition from " + k.source.render());
  }
  for (const auto& [k, d] : delta.returns) {
    if (vpa_.weight(k) < d) underflow("return from " + k.source.render());
  }

  for (const auto& [k, d] : delta.states) vpa_.setState(k, vpa_.stateWeight(k) - d);
  for (const auto& [k, d] : delta.finals) vpa_.setFinal(k, vpa_.finalWeight(k) - d);
  for (const auto& [k, d] : delta.calls) vpa_.set(k, vpa_.weight(k) - d);
  for (const auto& [k, d] : delta.internals) vpa_.set(k, vpa_.weight(k) - d);
  for (const auto& [k, d] : delta.returns) vpa_.set(k, vpa_.weight(k) - d);
  --documents_;
  auto digest = documentDigest(doc);
  for (auto it = series_.rbegin(); it != series_.rend(); ++it) {
    if (it->digest == digest) {
      series_.erase(std::next(it).base());
      break;
    }
  }
}

SanitizeOutcome Learner::sanitize() {
  requireMutable("sanitize");
  using Count = WeightedVpa::Count;
  auto dec = [](Count w) { return w == 0 ? Count{0} : w - 1; };

  // Stage 1: decrement transitions, recompute state weights from incoming
  // transitions. The start state keeps its weight.
  WeightedVpa next;
  next.setState(WeightedVpa::start(), vpa_.stateWeight(WeightedVpa::start()));
  std::map<StateName, Count> incoming;
  for (const auto& [t, w] : vpa_.calls()) {
    next.set(t, dec(w));
    incoming[t.target] = checkedAdd(incoming[t.target], dec(w));
  }
  for (const auto& [t, w] : vpa_.internals()) {
    next.set(t, dec(w));
    incoming[t.target] = checkedAdd(incoming[t.target], dec(w));
  }
  for (const auto& [t, w] : vpa_.returns()) {
    next.set(t, dec(w));
    incoming[t.target] = checkedAdd(incoming[t.target], dec(w));
  }
  for (const auto& [q, w] : vpa_.states()) {
    if (q.isStart()) continue;
    next.setState(q, incoming[q]);
  }
  for (const auto& [q, w] : vpa_.finals()) {
    next.setFinal(q, q.isStart() ? w : incoming[q]);
  }

  // Stage 2: states the trimmed automaton cannot reach.
  WeightedVpa trimmed = next.trim(*dts_);
  auto reachable = trimmed.reachableStates();
  std::set<StateName> reached(reachable.begin(), reachable.end());
  std::set<StateName> unreachable;
  for (const auto& [q, w] : trimmed.states()) {
    if (!reached.count(q)) unreachable.insert(q);
  }
  bool finalSurvives = false;
  for (const auto& [q, w] : trimmed.finals()) {
    if (!unreachable.count(q)) finalSurvives = true;
  }
  if (!finalSurvives) return SanitizeOutcome::NotApplicable;

  if (!unreachable.empty()) {
    auto gone = [&](const StateName& q) { return unreachable.count(q) > 0; };
    for (const auto& [t, w] : trimmed.calls()) {
      if (gone(t.source) || gone(t.target)) next.set(t, 0);
    }
    std::vector<InternalTransition> deadInternals;
    for (const auto& [t, w] : next.internals()) {
      if (gone(t.source) || gone(t.target)) deadInternals.push_back(t);
    }
    for (const auto& t : deadInternals) next.set(t, 0);
    std::vector<ReturnTransition> deadReturns;
    for (const auto& [t, w] : next.returns()) {
      if (gone(t.source) || gone(t.popped) || gone(t.target)) deadReturns.push_back(t);
    }
    for (const auto& t : deadReturns) next.set(t, 0);
    for (const auto& q : unreachable) {
      next.setState(q, 0);
      next.setFinal(q, 0);
    }
  }
  vpa_ = std::move(next);
  sanitized_ = true;
  return SanitizeOutcome::Applied;
}

}  // namespace xvpa
