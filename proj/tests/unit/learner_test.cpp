#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"
#include "xvpa/cxvpa.hpp"
#include "xvpa/dxvpa.hpp"
#include "xvpa/learner.hpp"
#include "xvpa/persistence.hpp"

using namespace xvpa;

namespace {

const LexicalDatatypeSystem& D() { return *test::dts(); }

StateName S(std::vector<std::string> u, std::vector<std::string> v = {}) { return {std::move(u), std::move(v)}; }

const NamingScheme kAnc11{NamingMode::Ancestor, 1, 1};
const NamingScheme kAnc12{NamingMode::Ancestor, 1, 2};
const NamingScheme kSib11{NamingMode::AncestorSibling, 1, 1};

template <class Map>
std::set<typename Map::key_type> keys(const Map& m) {
  std::set<typename Map::key_type> out;
  for (const auto& [k, v] : m) out.insert(k);
  return out;
}

}  // namespace

TEST(NamingScheme, ParseAndRender) {
  EXPECT_EQ(NamingScheme::parse("ancestor k=1 l=2"), kAnc12);
  EXPECT_EQ(NamingScheme::parse("mode=ancestor-sibling k=1 l=1"), kSib11);
  EXPECT_EQ(NamingScheme::parse(kAnc12.render()), kAnc12);
  EXPECT_EQ(kSib11.render(), "ancestor-sibling k=1 l=1");
  EXPECT_THROW(NamingScheme::parse("ancestor k=0 l=1"), std::invalid_argument);
  EXPECT_THROW(NamingScheme::parse("sibling k=1 l=1"), std::invalid_argument);
  EXPECT_THROW(NamingScheme::parse("ancestor k=1"), std::invalid_argument);
  EXPECT_THROW(NamingScheme::parse("ancestor k=x l=1"), std::invalid_argument);
}

TEST(CallName, Examples) {
  EXPECT_EQ(callName(kAnc11, S({"a"}, {"x"}), "b"), S({"b"}));
  EXPECT_EQ(callName(kAnc12, S({"dealer", "newcars"}, {"ad"}), "ad"), S({"newcars", "ad"}));
  EXPECT_EQ(callName(kSib11, S({"x", "#", "ad"}, {"m"}), "year"), S({"ad", "#", "year"}));
  EXPECT_EQ(callName(kSib11, WeightedVpa::start(), "r"), S({"r"}));
}

TEST(IntName, Examples) {
  EXPECT_EQ(intName({NamingMode::Ancestor, 1, 1}, S({"m"}, {"a"})), S({"m"}, {"$"}));
  EXPECT_EQ(intName({NamingMode::Ancestor, 2, 1}, S({"m"})), S({"m"}, {"$"}));
  auto q = S({"m"}, {"a"});
  EXPECT_EQ(intName(kAnc11, intName(kAnc11, q)), intName(kAnc11, q));
}

TEST(RetName, Examples) {
  EXPECT_EQ(retName(kAnc11, S({"newcars"}), S({"dealer"}), "newcars"), S({"dealer"}, {"newcars"}));
  EXPECT_EQ(retName(kAnc11, S({"usedcars"}), S({"dealer"}, {"newcars"}), "usedcars"), S({"dealer"}, {"usedcars"}));
  EXPECT_EQ(retName({NamingMode::Ancestor, 2, 1}, S({"b"}), S({"m"}, {"a"}), "b"), S({"m"}, {"a", "b"}));
}

TEST(Learn, MindChangesOfEmptyElement) {
  Learner l(kAnc11, test::dts());
  EXPECT_EQ(l.learn(parseDocument("<a/>")), 5U);
  EXPECT_EQ(l.learn(parseDocument("<a/>")), 0U);
}

TEST(Learn, TextCreatesDatatypedInternalTransition) {
  Learner l(kAnc11, test::dts());
  l.learn(parseDocument("<m>false</m>"));
  EXPECT_TRUE(l.vpa().internals().count(InternalTransition{S({"m"}), D().id("boolean"), S({"m"}, {"$"})}));
  EXPECT_EQ(l.vpa().internals().size(), 1U);
}

TEST(Learn, InvalidStreamLeavesNoTrace) {
  Learner l(kAnc11, test::dts());
  l.learn(parseDocument("<a/>"));
  auto before = serializeState(l);
  // The learner never sees an invalid stream: construction already fails.
  EXPECT_THROW(l.learn(streamFromEvents({Event::start("a", 0), Event::end("b", 1)})), InvariantViolation);
  EXPECT_EQ(serializeState(l), before);
}

TEST(MindChangeSeries, Examples) {
  Learner l(kAnc12, test::dts());
  EXPECT_TRUE(l.mindChangeSeries().empty());
  auto doc = parseDocument("<r><x>1</x></r>");
  for (int i = 0; i < 3; ++i) l.learn(doc);
  auto series = l.mindChangeSeries();
  ASSERT_EQ(series.size(), 3U);
  EXPECT_GT(series[0], 0U);
  EXPECT_EQ(series[1], 0U);
  EXPECT_EQ(series[2], 0U);
  EXPECT_EQ(l.mindChangeLog()[0].digest, documentDigest(doc));
}

TEST(MindChangeSeries, ZeroWindowLeavesSnapshotStructure) {
  Rng rng(3);
  test::TreeShape shape{{"a", "b"}, {"1", "x"}, 3, 2};
  for (int i = 0; i < 50; ++i) {
    Learner l(kAnc12, test::dts());
    for (int j = 0; j < 8; ++j) {
      auto before = l.snapshot();
      auto mc = l.learn(test::randomDocument(rng, shape));
      if (mc == 0) {
        auto after = l.snapshot();
        EXPECT_EQ(keys(after.states()), keys(before.states()));
        EXPECT_EQ(keys(after.calls()), keys(before.calls()));
        EXPECT_EQ(keys(after.internals()), keys(before.internals()));
        EXPECT_EQ(keys(after.returns()), keys(before.returns()));
        EXPECT_EQ(keys(after.finals()), keys(before.finals()));
      }
    }
  }
}

TEST(Unlearn, InverseOnFreshState) {
  Learner l(kAnc12, test::dts());
  auto fresh = serializeState(l);
  auto doc = parseDocument("<r a=\"1\"><x>1</x><y>abc</y></r>");
  l.learn(doc);
  l.unlearn(doc);
  EXPECT_EQ(serializeState(l), fresh);
}

TEST(Unlearn, RemovesOneDocumentInAnyOrder) {
  Rng rng(41);
  test::TreeShape shape{{"a", "b", "c"}, {"1", "33", "true", "x y"}, 3, 3};
  for (int i = 0; i < 100; ++i) {
    std::vector<DocumentEventStream> docs;
    for (int j = 0; j < 4; ++j) docs.push_back(test::randomDocument(rng, shape));
    auto w = test::randomDocument(rng, shape);
    Learner base(kSib11, test::dts());
    for (const auto& d : docs) base.learn(d);
    auto all = docs;
    all.push_back(w);
    shuffle(rng, all);
    Learner l(kSib11, test::dts());
    for (const auto& d : all) l.learn(d);
    l.unlearn(w);
    ASSERT_EQ(l.vpa(), base.vpa());
    ASSERT_EQ(l.documentsLearned(), base.documentsLearned());
  }
}

TEST(Unlearn, NeverLearnedDocumentIsRefused) {
  Learner l(kAnc12, test::dts());
  l.learn(parseDocument("<r><x>1</x></r>"));
  auto before = serializeState(l);
  EXPECT_THROW(l.unlearn(parseDocument("<r><y>1</y></r>")), MissingTransition);
  EXPECT_THROW(l.unlearn(parseDocument("<r><x>abc</x></r>")), MissingTransition);
  EXPECT_EQ(serializeState(l), before);
  EXPECT_EQ(serializeState(l), before);
  // Every transition exists, but the repeated sibling call has weight 1.
  Learner twice(kAnc12, test::dts());
  twice.learn(parseDocument("<r><x/><x/></r>"));
  auto learned = serializeState(twice);
  EXPECT_THROW(twice.unlearn(parseDocument("<r><x/><x/><x/></r>")), CounterUnderflow);
  EXPECT_EQ(serializeState(twice), learned);
  Learner empty(kAnc12, test::dts());
  EXPECT_THROW(empty.unlearn(parseDocument("<r/>")), CounterUnderflow);
}

TEST(Unlearn, RefusedAfterSanitizeOrDatatypeChange) {
  Learner l(kAnc12, test::dts());
  auto a = parseDocument("<r><x>1</x></r>");
  for (int i = 0; i < 3; ++i) l.learn(a);
  ASSERT_EQ(l.sanitize(), SanitizeOutcome::Applied);
  EXPECT_TRUE(l.sanitized());
  EXPECT_THROW(l.unlearn(a), PreconditionFailed);

  auto other = std::make_shared<const LexicalDatatypeSystem>(
      LexicalDatatypeSystem::parse(std::string(LexicalDatatypeSystem::builtinText()) + "\n"));
  Learner fresh(kAnc12, test::dts());
  fresh.learn(a);
  auto moved = parseState(serializeState(fresh), other);
  EXPECT_FALSE(moved.hashMatches());
  EXPECT_THROW(moved.learn(a), PreconditionFailed);
  EXPECT_THROW(moved.unlearn(a), PreconditionFailed);
  EXPECT_THROW(moved.sanitize(), PreconditionFailed);
}

TEST(Sanitize, HighCountersDecrementByOne) {
  Learner l(kAnc12, test::dts());
  auto doc = parseDocument("<r><x>1</x><y>abc</y></r>");
  l.learn(doc);
  l.learn(doc);
  auto before = l.vpa();
  ASSERT_EQ(l.sanitize(), SanitizeOutcome::Applied);
  const auto& after = l.vpa();
  EXPECT_EQ(keys(after.calls()), keys(before.calls()));
  for (const auto& [t, w] : before.calls()) EXPECT_EQ(after.weight(t), w - 1);
  for (const auto& [t, w] : before.internals()) EXPECT_EQ(after.weight(t), w - 1);
  for (const auto& [t, w] : before.returns()) EXPECT_EQ(after.weight(t), w - 1);
  auto a = Cxvpa::compile(Dxvpa::generate(l.snapshot()), test::dts());
  EXPECT_TRUE(a.validate(doc).accepted);
}

TEST(Sanitize, SingleDocumentIsNotApplicable) {
  Learner l(kAnc12, test::dts());
  l.learn(parseDocument("<r><x>1</x></r>"));
  auto before = serializeState(l);
  EXPECT_EQ(l.sanitize(), SanitizeOutcome::NotApplicable);
  EXPECT_EQ(serializeState(l), before);
  EXPECT_FALSE(l.sanitized());
}

TEST(Sanitize, PoisonedBranchIsRemoved) {
  auto a = parseDocument("<r><x>1</x><y>abc</y></r>");
  auto b = parseDocument("<r><evil><payload>DROP</payload></evil></r>");
  Learner l(kAnc12, test::dts());
  for (int i = 0; i < 99; ++i) l.learn(a);
  l.learn(b);
  ASSERT_EQ(l.sanitize(), SanitizeOutcome::Applied);
  Learner clean(kAnc12, test::dts());
  for (int i = 0; i < 99; ++i) clean.learn(a);
  auto got = l.snapshot(), want = clean.snapshot();
  EXPECT_EQ(keys(got.states()), keys(want.states()));
  EXPECT_EQ(keys(got.calls()), keys(want.calls()));
  EXPECT_EQ(keys(got.internals()), keys(want.internals()));
  EXPECT_EQ(keys(got.returns()), keys(want.returns()));
  EXPECT_EQ(keys(got.finals()), keys(want.finals()));
  auto model = Cxvpa::compile(Dxvpa::generate(got), test::dts());
  EXPECT_TRUE(model.validate(a).accepted);
  EXPECT_FALSE(model.validate(b).accepted);
}

TEST(LearnerProperty, ConsistencyAndMonotonicity) {
  Rng rng(5);
  test::TreeShape shape{{"a", "b", "c"}, {"1", "33", "true", "x", "2015"}, 3, 3};
  for (int i = 0; i < 60; ++i) {
    NamingScheme scheme{chance(rng, 0.5) ? NamingMode::Ancestor : NamingMode::AncestorSibling,
                        static_cast<unsigned>(1 + uniformBelow(rng, 2)), static_cast<unsigned>(1 + uniformBelow(rng, 2))};
    Learner l(scheme, test::dts());
    std::vector<DocumentEventStream> learned;
    std::vector<DocumentEventStream> accepted;
    for (int step = 0; step < 5; ++step) {
      auto doc = test::randomDocument(rng, shape);
      l.learn(doc);
      learned.push_back(doc);
      auto model = Cxvpa::compile(Dxvpa::generate(l.snapshot()), test::dts());
      for (const auto& d : learned) ASSERT_TRUE(model.validate(d).accepted) << scheme.render();
      for (const auto& d : accepted) ASSERT_TRUE(model.validate(d).accepted) << scheme.render();
      for (int probe = 0; probe < 20; ++probe) {
        auto d = test::randomDocument(rng, shape);
        if (model.validate(d).accepted) accepted.push_back(d);
      }
    }
  }
}
