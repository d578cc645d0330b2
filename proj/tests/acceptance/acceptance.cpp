// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/test_support.hpp"
#include "xvpa/corpus/evaluation.hpp"
#include "xvpa/corpus/grammar.hpp"
#include "xvpa/corpus/scenario.hpp"
#include "xvpa/cxvpa.hpp"
#include "xvpa/dxvpa.hpp"
#include "xvpa/learner.hpp"
#include "xvpa/persistence.hpp"

using namespace xvpa;
using Clock = std::chrono::steady_clock;

namespace {

const LexicalDatatypeSystem& D() { return *test::dts(); }

/// Thrown by require() with the reason a criterion failed.
struct Unmet {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Unmet{why};
}

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

template <class Map>
std::set<typename Map::key_type> keys(const Map& m) {
  std::set<typename Map::key_type> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

bool sameStructure(const WeightedVpa& a, const WeightedVpa& b) {
  return keys(a.states()) == keys(b.states()) && keys(a.calls()) == keys(b.calls()) &&
         keys(a.internals()) == keys(b.internals()) && keys(a.returns()) == keys(b.returns()) &&
         keys(a.finals()) == keys(b.finals());
}

NamingScheme randomScheme(Rng& rng) {
  return {chance(rng, 0.5) ? NamingMode::Ancestor : NamingMode::AncestorSibling,
          static_cast<unsigned>(1 + uniformBelow(rng, 2)), static_cast<unsigned>(1 + uniformBelow(rng, 2))};
}

Cxvpa modelOf(const Learner& l) { return Cxvpa::compile(Dxvpa::generate(l.snapshot()), test::dts()); }

corpus::LabeledCorpus bundledScenario() {
  auto c = corpus::loadCorpus(test::sourceDir() + "/scenarios/cardealer");
  require(!c.training.empty(), "bundled scenario missing");
  return c;
}

std::string ac1() {
  auto t0 = Clock::now();
  auto lex = D().minLexUtf8("false");
  require(lex == test::named(D(), {"language", "boolean", "NCName"}), "minLex(false) = " + D().format(lex));
  DatatypeSet acc = D().minReqUtf8("1");
  for (const char* w : {"0", "true", "33"}) acc = D().aggregate(acc, D().minReqUtf8(w));
  require(acc == test::named(D(), {"boolean", "unsignedByte"}), "folded minReq = " + D().format(acc));
  auto t = seconds(t0);
  require(t < 1.0, "took " + std::to_string(t) + " s");
  return "minLex(false) and folded minReq exact";
}

std::string ac2() {
  auto t0 = Clock::now();
  auto docs = corpus::cardealerGrammar(test::dts()).generate(40, 1);
  std::set<std::string> elements;
  DatatypeSet yearTypes;
  bool newAd = false, usedAd = false;
  for (const auto& d : docs) {
    std::string why;
    require(test::conformsToCardealer(d, &why), "generated document off schema: " + why);
    std::string parent;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i].kind != EventKind::StartElement) continue;
      const auto& name = d[i].name.local;
      elements.insert(name);
      if (name == "newcars" || name == "usedcars") parent = name;
      if (name == "ad") (parent == "newcars" ? newAd : usedAd) = true;
      if (name == "year") yearTypes = yearTypes.unite(test::oracleMinReq(D(), d[i + 1].text));
    }
  }
  require(newAd && usedAd && elements.size() == 6, "generated documents miss a production");
  require(yearTypes == test::named(D(), {"gYear", "gYearMonth"}), "year texts cover " + D().format(yearTypes));

  Learner l({NamingMode::Ancestor, 1, 2}, test::dts());
  for (const auto& d : docs) l.learn(d);
  auto a = Dxvpa::generate(l.snapshot());
  require(a.problems().empty(), "automaton invariants violated");
  require(a.modules().size() == 7, std::to_string(a.modules().size()) + " modules");
  std::vector<ModuleId> model, year, ads;
  for (ModuleId m = 0; m < a.modules().size(); ++m) {
    if (a.module(m).element == "model") model.push_back(m);
    if (a.module(m).element == "year") year.push_back(m);
    if (a.module(m).element == "ad") ads.push_back(m);
  }
  require(model.size() == 1 && year.size() == 1 && ads.size() == 2, "unexpected module split");
  std::set<ModuleId> modelCallers;
  for (const auto& [key, target] : a.calls()) {
    if (target == a.module(model[0]).entry) modelCallers.insert(a.moduleOf(key.first));
  }
  require(modelCallers == std::set<ModuleId>(ads.begin(), ads.end()), "model module not shared by both ads");
  const auto* choice = a.choice(a.module(year[0]).entry);
  require(choice && choice->types == test::named(D(), {"gYear", "gYearMonth"}), "year choice differs");
  auto t = seconds(t0);
  require(t < 10.0, "took " + std::to_string(t) + " s");
  return "40 documents, 7 modules, shared model, year {gYear, gYearMonth}";
}

std::string ac3() {
  auto t0 = Clock::now();
  auto c = bundledScenario();
  std::size_t normal = 0, scored = 0;
  std::set<std::string> structural;
  for (const auto& d : c.testing) {
    if (!d.attack) {
      ++normal;
      continue;
    }
    auto kind = corpus::parseAttackKind(d.kind);
    require(kind.has_value(), "unknown attack kind " + d.kind);
    auto cls = corpus::attackClass(*kind);
    if (cls != corpus::AttackClass::Repetition) ++scored;
    if (cls == corpus::AttackClass::Structural) structural.insert(d.kind);
  }
  require(c.training.size() == 50 && normal == 1000 && scored >= 15, "scenario shape differs");
  auto model = corpus::trainModel(c.training, corpus::cardealerScenarioScheme(), test::dts());
  auto r = corpus::evaluate(model.get(), c.testing);
  std::vector<std::string> kinds(structural.begin(), structural.end());
  std::ostringstream out;
  out << "Pr=" << r.precision() << " FPR=" << r.falsePositiveRate() << " Re(structural)=" << r.recall(kinds)
      << " over " << scored << " structural+datatype attacks";
  require(r.precision() == 1.0 && r.falsePositiveRate() == 0.0 && r.recall(kinds) == 1.0, out.str());
  auto t = seconds(t0);
  require(t < 60.0, "took " + std::to_string(t) + " s");
  return out.str();
}

std::string ac4() {
  auto c = bundledScenario();
  auto model = corpus::trainModel(c.training, corpus::cardealerScenarioScheme(), test::dts());
  require(model != nullptr, "empty model");
  const auto& a = model->structure();
  bool normalized = false;
  for (ModuleId m = 0; m < a.modules().size(); ++m) {
    if (a.module(m).element != "slogan") continue;
    const auto* choice = a.choice(a.module(m).entry);
    normalized = choice && choice->types == test::named(D(), {"normalizedString"});
  }
  require(normalized, "slogan not learned as normalizedString");
  auto xml = writeXml(c.training.front().stream);
  auto open = xml.find("<slogan>"), close = xml.find("</slogan>");
  require(open != std::string::npos && close != std::string::npos, "no slogan field");
  open += 8;
  xml.replace(open, close - open, "<![CDATA[<script>alert('owned')</script>]]>");
  auto doc = parseDocument(xml);
  auto v = model->validate(doc);
  require(v.accepted, "CDATA script rejected with " + std::string(reasonName(v.reason)));
  return "CDATA script in a normalizedString field is accepted (known miss)";
}

std::string ac5() {
  auto t0 = Clock::now();
  constexpr int kCases = 200;
  Rng rng(20161);
  test::TreeShape shape{{"a", "b", "c"}, {"1", "33", "true", "x y", "2015-03", "abc"}, 3, 3};
  auto randomDocs = [&](std::size_t n) {
    std::vector<DocumentEventStream> docs;
    for (std::size_t i = 0; i < n; ++i) docs.push_back(test::randomDocument(rng, shape));
    return docs;
  };

  for (int i = 0; i < kCases; ++i) {
    auto scheme = randomScheme(rng);
    auto docs = randomDocs(1 + uniformBelow(rng, 5));
    Learner l(scheme, test::dts());
    for (const auto& d : docs) l.learn(d);
    auto model = modelOf(l);
    for (const auto& d : docs) require(model.validate(d).accepted, "consistency: trained document rejected");

    auto shuffled = docs;
    shuffle(rng, shuffled);
    Learner p(scheme, test::dts());
    for (const auto& d : shuffled) p.learn(d);
    require(p.snapshot() == l.snapshot(), "permutation changed the snapshot");

    std::vector<DocumentEventStream> accepted;
    for (const auto& d : randomDocs(20)) {
      if (model.validate(d).accepted) accepted.push_back(d);
    }
    l.learn(test::randomDocument(rng, shape));
    auto grown = modelOf(l);
    for (const auto& d : accepted) require(grown.validate(d).accepted, "monotonicity: language shrank");

    auto before = serializeState(l);
    auto extra = test::randomDocument(rng, shape);
    l.learn(extra);
    l.unlearn(extra);
    require(serializeState(l) == before, "learn then unlearn changed the state file");

    auto snap = l.snapshot();
    require(snap.trim(D()) == snap, "trim not idempotent");
  }

  for (int i = 0; i < 5 * kCases; ++i) {
    auto w = test::randomText(rng);
    auto got = D().minLexUtf8(w);
    require(got == test::oracleMinLex(D(), w), "minLex differs from brute force on '" + w + "'");
    require(D().isAntichain(got), "minLex not an antichain");
  }

  for (int i = 0; i < kCases; ++i) {
    auto a = D().minReqUtf8(test::randomText(rng));
    auto b = D().minReqUtf8(test::randomText(rng));
    require(D().aggregate(a, a) == a, "aggregate not idempotent");
    require(D().aggregate(a, b) == D().aggregate(b, a), "aggregate not commutative");
  }

  auto samples = test::datatypeSamples(D());
  std::size_t enumerated = 0;
  for (int i = 0; i < kCases; ++i) {
    std::vector<std::string> texts;
    for (int t = 0; t < 2; ++t) texts.push_back(samples[uniformBelow(rng, samples.size())]);
    test::TreeShape small{{"a", "b"}, texts, 3, 3};
    Learner l(randomScheme(rng), test::dts());
    for (int j = 0; j < 3; ++j) l.learn(test::randomDocument(rng, small));
    auto d = Dxvpa::generate(l.snapshot());
    auto c = Cxvpa::compile(d, test::dts());
    std::vector<std::string> probe{texts[0], samples[uniformBelow(rng, samples.size())]};
    for (const auto& doc : test::enumerateDocuments({{"a", "b"}, probe, 3, 3}, 4)) {
      require(d.accepts(doc, D()) == c.validate(doc).accepted, "dXVPA and cXVPA disagree");
      ++enumerated;
    }
  }
  auto t = seconds(t0);
  require(t < 300.0, "took " + std::to_string(t) + " s");
  std::ostringstream out;
  out << kCases << " cases per property, " << enumerated << " enumerated documents, " << static_cast<int>(t) << " s";
  return out.str();
}

std::string ac6() {
  const NamingScheme scheme{NamingMode::Ancestor, 1, 2};
  auto a = parseDocument("<r><x>1</x><y>abc</y></r>");
  auto b = parseDocument("<r><evil><payload>DROP TABLE</payload></evil></r>");
  Learner l(scheme, test::dts());
  for (int i = 0; i < 99; ++i) l.learn(a);
  l.learn(b);
  require(l.sanitize() == SanitizeOutcome::Applied, "sanitize not applied");
  Learner clean(scheme, test::dts());
  clean.learn(a);
  require(sameStructure(l.snapshot(), clean.snapshot()), "sanitized automaton differs from learning A alone");
  auto model = modelOf(l);
  require(model.validate(a).accepted && !model.validate(b).accepted, "B branch survived");
  test::TreeShape shape{{"r", "x", "y", "evil"}, {"1", "abc"}, 3, 2};
  auto reference = modelOf(clean);
  for (const auto& d : test::enumerateDocuments(shape, 4)) {
    require(model.validate(d).accepted == reference.validate(d).accepted, "languages differ");
  }

  Learner single(scheme, test::dts());
  single.learn(a);
  auto before = serializeState(single);
  require(single.sanitize() == SanitizeOutcome::NotApplicable, "single document sanitized");
  require(serializeState(single) == before, "not-applicable sanitize changed the state");
  return "poisoned branch removed, single-document state reverted";
}

std::string ac7() {
  auto c = bundledScenario();
  // Mind changes do not depend on the test set; evaluating it every step only costs time.
  c.testing.clear();
  auto curve = corpus::learningCurve(c, corpus::cardealerScenarioScheme(), test::dts(), 15, 1);
  require(curve.mindChanges.size() == 15, "trial count");
  std::size_t latest = 0;
  for (const auto& mc : curve.mindChanges) {
    require(mc.size() == c.training.size(), "step count");
    std::size_t last = 0;
    for (std::size_t s = 0; s < mc.size(); ++s) {
      if (mc[s] != 0) last = s;
    }
    latest = std::max(latest, last + 1);
    require(last < mc.size() / 2, "mind change at step " + std::to_string(last + 1));
    require(*std::max_element(mc.begin(), mc.end()) == mc.front(), "first step is not the maximum");
  }
  return "15 trials converge by step " + std::to_string(latest) + " of " + std::to_string(c.training.size());
}

double bestValidationTime(const Cxvpa& model, const DocumentEventStream& doc) {
  double best = 1e9;
  for (int r = 0; r < 7; ++r) {
    auto t0 = Clock::now();
    auto v = model.validate(doc);
    best = std::min(best, seconds(t0));
    require(v.accepted, "synthetic document rejected");
  }
  return best;
}

std::string ac8() {
  Learner wide({NamingMode::Ancestor, 1, 2}, test::dts());
  wide.learn(test::wideDocument(300));
  Learner deep({NamingMode::Ancestor, 1, 2}, test::dts());
  deep.learn(test::deepDocument(5));
  auto wideModel = modelOf(wide), deepModel = modelOf(deep);
  double worst = 0;
  for (std::size_t events : {12500, 25000, 50000}) {
    // wide: 3 events per child; deep: 2 events per level.
    double w1 = bestValidationTime(wideModel, test::wideDocument(events / 3));
    double w2 = bestValidationTime(wideModel, test::wideDocument(2 * events / 3));
    double d1 = bestValidationTime(deepModel, test::deepDocument(events / 2));
    double d2 = bestValidationTime(deepModel, test::deepDocument(events));
    worst = std::max({worst, w2 / w1, d2 / d1});
  }
  std::ostringstream out;
  out << "worst time ratio " << worst << " for 2x events";
  require(worst <= 3.0, out.str());
  return out.str();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> checks{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    std::string verdict, detail;
    try {
      detail = check();
      verdict = "PASS";
    } catch (const Unmet& u) {
      detail = u.why;
      verdict = "FAIL";
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
      verdict = "FAIL";
    }
    if (verdict == "FAIL") ++failed;
    std::cout << name << ' ' << verdict << ' ' << detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
