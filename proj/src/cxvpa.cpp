#include "xvpa/cxvpa.hpp"

namespace xvpa {

std::string_view reasonName(RejectReason reason) {
  switch (reason) {
    case RejectReason::None: return "-";
    case RejectReason::UnexpectedElement: return "unexpected-element";
    case RejectReason::UnexpectedEnd: return "unexpected-end";
    case RejectReason::DatatypeMismatch: return "datatype-mismatch";
    case RejectReason::PrematureEof: return "premature-eof";
    case RejectReason::TrailingContent: return "trailing-content";
    case RejectReason::EmptyLanguage: return "empty-language";
  }
  return "?";
}

std::shared_ptr<const automata::Dfa> PredicateCache::get(DatatypeSet types) {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(types.bits());
  if (it != cache_.end()) return it->second;
  auto dfa = std::make_shared<const automata::Dfa>(dts_->unionDfa(types));
  cache_.emplace(types.bits(), dfa);
  return dfa;
}

std::size_t Cxvpa::ReturnHash::operator()(const ReturnKey& k) const noexcept {
  std::uint64_t h = (std::uint64_t{k.source} << 32) ^ k.popped;
  h ^= std::uint64_t{k.element} * 0x9E3779B97F4A7C15ULL;
  h ^= h >> 29;
  return static_cast<std::size_t>(h * 0xBF58476D1CE4E5B9ULL);
}

Cxvpa Cxvpa::compile(const Dxvpa& dxvpa, std::shared_ptr<const LexicalDatatypeSystem> dts) {
  PredicateCache cache(std::move(dts));
  return compile(dxvpa, cache);
}

Cxvpa Cxvpa::compile(const Dxvpa& dxvpa, PredicateCache& cache) {
  Cxvpa c;
  c.structure_ = dxvpa;
  auto intern = [&](const std::string& element) {
    return c.elements_.emplace(element, static_cast<std::uint32_t>(c.elements_.size())).first->second;
  };
  for (const auto& [key, target] : dxvpa.calls()) c.calls_.emplace(callKey(key.first, intern(key.second)), target);
  for (const auto& [key, target] : dxvpa.returns()) {
    const auto& [source, element, popped] = key;
    c.returns_.emplace(ReturnKey{source, intern(element), popped}, target);
  }
  const auto n = dxvpa.stateCount();
  c.predicateOf_.assign(n, kNone);
  c.textTarget_.assign(n, 0);
  c.final_.assign(n, false);
  for (StateId q : dxvpa.finals()) c.final_[q] = true;
  std::map<std::uint64_t, std::uint32_t> predicateIds;
  for (const auto& [q, choice] : dxvpa.internals()) {
    auto [it, fresh] = predicateIds.emplace(choice.types.bits(), static_cast<std::uint32_t>(c.predicates_.size()));
    if (fresh) c.predicates_.push_back(cache.get(choice.types));
    c.predicateOf_[q] = it->second;
    c.textTarget_[q] = choice.target;
  }
  return c;
}

const automata::Dfa* Cxvpa::predicate(StateId q) const {
  auto id = predicateOf_.at(q);
  return id == kNone ? nullptr : predicates_[id].get();
}

DatatypeSet Cxvpa::predicateTypes(StateId q) const {
  const auto* c = structure_.choice(q);
  return c == nullptr ? DatatypeSet{} : c->types;
}

std::uint32_t Cxvpa::elementId(const QualifiedName& name) const {
  auto it = elements_.find(name.render());
  return it == elements_.end() ? kNone : it->second;
}

Verdict Cxvpa::validate(const DocumentEventStream& stream) const {
  Run run(*this);
  for (const auto& e : stream) {
    if (!run.step(e)) break;
  }
  return run.finish();
}

Cxvpa::Run::Run(const Cxvpa& automaton) : a_(&automaton), q_(automaton.structure_.start()) {}

bool Cxvpa::Run::fail(RejectReason reason, std::size_t index) {
  failed_ = true;
  failure_ = Verdict{false, reason, index, a_->structure_.name(q_).render()};
  return false;
}

bool Cxvpa::Run::step(const Event& e) {
  if (failed_) return false;
  const std::size_t index = seen_++;
  if (stack_.empty() && q_ != a_->structure_.start()) return fail(RejectReason::TrailingContent, index);
  switch (e.kind) {
    case EventKind::StartElement: {
      auto element = a_->elementId(e.name);
      if (element == kNone) return fail(RejectReason::UnexpectedElement, index);
      auto it = a_->calls_.find(callKey(q_, element));
      if (it == a_->calls_.end()) return fail(RejectReason::UnexpectedElement, index);
      stack_.push_back(q_);
      q_ = it->second;
      return true;
    }
    case EventKind::EndElement: {
      auto element = a_->elementId(e.name);
      if (stack_.empty() || element == kNone) return fail(RejectReason::UnexpectedEnd, index);
      auto it = a_->returns_.find(ReturnKey{q_, element, stack_.back()});
      if (it == a_->returns_.end()) return fail(RejectReason::UnexpectedEnd, index);
      stack_.pop_back();
      q_ = it->second;
      return true;
    }
    case EventKind::Characters: {
      auto id = a_->predicateOf_[q_];
      if (id == kNone || !a_->predicates_[id]->acceptsUtf8(e.text)) {
        return fail(RejectReason::DatatypeMismatch, index);
      }
      q_ = a_->textTarget_[q_];
      return true;
    }
  }
  return true;
}

Verdict Cxvpa::Run::finish() const {
  if (failed_) return failure_;
  if (stack_.empty() && a_->final_[q_]) return Verdict::accept();
  return Verdict{false, RejectReason::PrematureEof, seen_, a_->structure_.name(q_).render()};
}

}  // namespace xvpa
