#include <gtest/gtest.h>

#include "test_support.hpp"
#include "xvpa/automata/utf8.hpp"
#include "xvpa/datatypes.hpp"
#include "xvpa/learner.hpp"

using namespace xvpa;
using test::named;

namespace {

const LexicalDatatypeSystem& D() { return *test::dts(); }

DatatypeSet set(std::initializer_list<const char*> names) {
  return named(D(), std::vector<std::string>(names.begin(), names.end()));
}

}  // namespace

TEST(Datatypes, SystemShape) {
  EXPECT_EQ(D().name(D().top()), "⊤");
  EXPECT_TRUE(D().lexAcceptsUtf8(D().top(), "\x01\xF4\x8F\xBF\xBF"));
  for (const char* excluded : {"float", "ENTITY", "ID", "IDREF", "ENTITIES", "IDREFS"}) {
    EXPECT_FALSE(D().find(excluded)) << excluded;
  }
  for (std::size_t i = 0; i < D().size(); ++i) {
    auto id = static_cast<DatatypeId>(i);
    EXPECT_FALSE(D().lexLess(id, id));
    if (id != D().top()) EXPECT_TRUE(D().lexLess(id, D().top())) << D().name(id);
  }
  EXPECT_EQ(D().kindCount(), 10U);
}

TEST(Datatypes, OrdersMatchOracleClosure) {
  for (std::size_t a = 0; a < D().size(); ++a) {
    for (std::size_t b = 0; b < D().size(); ++b) {
      auto x = static_cast<DatatypeId>(a), y = static_cast<DatatypeId>(b);
      EXPECT_EQ(D().lexLess(x, y), test::oracleLexLess(D(), x, y)) << D().name(x) << " " << D().name(y);
    }
  }
  for (std::size_t a = 0; a < D().kindCount(); ++a) {
    for (std::size_t b = 0; b < D().kindCount(); ++b) {
      auto x = static_cast<KindId>(a), y = static_cast<KindId>(b);
      EXPECT_EQ(D().kindLess(x, y), test::oracleKindLess(D(), x, y));
    }
  }
}

TEST(Datatypes, ExactInclusionAndDistinctness) {
  auto problems = D().verify();
  for (const auto& p : problems) ADD_FAILURE() << p.what;
}

TEST(LexAccepts, Examples) {
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("boolean"), "true"));
  EXPECT_FALSE(D().lexAcceptsUtf8(D().id("gYear"), "20x5"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("gYear"), "2015"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("gYearMonth"), "2015-03"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("byte"), "-128"));
  EXPECT_FALSE(D().lexAcceptsUtf8(D().id("byte"), "128"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("unsignedByte"), "255"));
  EXPECT_FALSE(D().lexAcceptsUtf8(D().id("unsignedByte"), "256"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("double"), "-INF"));
  EXPECT_TRUE(D().lexAcceptsUtf8(D().id("base64Binary"), "dGVzdA=="));
  EXPECT_FALSE(D().lexAcceptsUtf8(D().id("normalizedString"), "a\tb"));
}

TEST(MinLex, Examples) {
  EXPECT_EQ(D().minLexUtf8("false"), set({"language", "boolean", "NCName"}));
  // "33" is also one hex octet, and nothing lies below positiveInteger.
  EXPECT_EQ(D().minLexUtf8("33"), set({"unsignedByte", "byte", "hexBinary", "positiveInteger"}));
  EXPECT_EQ(D().minLexUtf8("\x01"), set({"⊤"}));
  EXPECT_EQ(D().minLexUtf8("Berlin"), set({"NCName", "language"}));
  EXPECT_EQ(D().minLexUtf8("Bad_Homburg"), set({"anyURI", "Name", "NCName"}));
}

TEST(Pref, Examples) {
  EXPECT_EQ(D().pref(set({"language", "boolean", "NCName"})), set({"boolean"}));
  EXPECT_EQ(D().pref(set({"unsignedByte", "byte"})), set({"unsignedByte"}));
  EXPECT_EQ(D().pref(set({"boolean"})), set({"boolean"}));
  EXPECT_THROW((void)D().pref(DatatypeSet()), std::invalid_argument);
}

TEST(MinReq, Examples) {
  EXPECT_EQ(D().minReqUtf8("false"), set({"boolean"}));
  // Numeric kinds are preferred over temporal ones; a zoned year stays a year.
  EXPECT_EQ(D().minReqUtf8("2015"), set({"unsignedShort"}));
  EXPECT_EQ(D().minReqUtf8("2015Z"), set({"gYear"}));
  EXPECT_EQ(D().minReqUtf8("hello world"), set({"NMTOKENS"}));
  EXPECT_EQ(D().minReqUtf8(""), test::oracleMinReq(D(), ""));
}

TEST(Aggregate, Examples) {
  DatatypeSet acc = D().minReqUtf8("1");
  for (const char* w : {"0", "true", "33"}) acc = D().aggregate(acc, D().minReqUtf8(w));
  EXPECT_EQ(acc, set({"boolean", "unsignedByte"}));
  EXPECT_EQ(D().aggregate(set({"byte"}), set({"short"})), set({"short"}));
  EXPECT_EQ(D().aggregate(acc, acc), acc);
}

TEST(Dtyped, Examples) {
  auto d = dtyped(D(), Event::chars("false"));
  EXPECT_EQ(d.kind, EventKind::Characters);
  EXPECT_EQ(d.types, set({"boolean"}));
  auto s = dtyped(D(), Event::start("a"));
  EXPECT_EQ(s.kind, EventKind::StartElement);
  EXPECT_EQ(s.element, "a");
}

TEST(MinLexProperty, MatchesBruteForceOracle) {
  Rng rng(2024);
  for (int i = 0; i < 3000; ++i) {
    auto w = test::randomText(rng);
    auto got = D().minLexUtf8(w);
    ASSERT_EQ(got, test::oracleMinLex(D(), w)) << "text: " << w;
    ASSERT_FALSE(got.empty());
    ASSERT_TRUE(D().isAntichain(got));
    for (auto t : got.ids()) ASSERT_TRUE(D().lexAcceptsUtf8(t, w));
    ASSERT_EQ(D().pref(got), test::oraclePref(D(), got));
    ASSERT_TRUE(D().isAntichain(D().pref(got)));
  }
}

TEST(OrderSoundness, SampledMembersOfLowerTypeAreAcceptedAbove) {
  Rng rng(7);
  for (const auto& [lo, hi] : D().lexEdges()) {
    const auto& dfa = D().datatype(lo).dfa;
    for (int i = 0; i < 1000; ++i) {
      auto s = dfa.sample(rng);
      ASSERT_TRUE(s) << D().name(lo);
      ASSERT_TRUE(D().lexAccepts(hi, *s)) << D().name(lo) << " <= " << D().name(hi) << " on "
                                          << automata::encodeUtf8(*s);
    }
  }
}

TEST(AggregateProperty, LatticeLaws) {
  Rng rng(31);
  for (int i = 0; i < 500; ++i) {
    auto a = D().minReqUtf8(test::randomText(rng));
    auto b = D().minReqUtf8(test::randomText(rng));
    auto c = D().minReqUtf8(test::randomText(rng));
    ASSERT_EQ(D().aggregate(a, b), D().aggregate(b, a));
    ASSERT_EQ(D().aggregate(D().aggregate(a, b), c), D().aggregate(a, D().aggregate(b, c)));
    ASSERT_EQ(D().aggregate(a, a), a);
    auto ab = D().aggregate(a, b);
    ASSERT_EQ(ab, test::oracleMaxLex(D(), a.unite(b)));
    // Every member of a or b is below or equal to some member of the result.
    for (auto t : a.unite(b).ids()) {
      bool covered = false;
      for (auto u : ab.ids()) covered = covered || D().lexLessEq(t, u);
      ASSERT_TRUE(covered);
    }
  }
}

TEST(DatatypeFile, ParseErrorsCarryLines) {
  EXPECT_THROW(LexicalDatatypeSystem::parse("bogus 1\n"), DatatypeFileError);
  try {
    LexicalDatatypeSystem::parse("xvpa-datatypes 1\nkind ⊤\ntype ⊤ nokind .*\n");
    FAIL();
  } catch (const DatatypeFileError& e) {
    EXPECT_EQ(e.line(), 3U);
  }
}

TEST(DatatypeFile, HashTracksContent) {
  auto text = std::string(LexicalDatatypeSystem::builtinText());
  auto again = LexicalDatatypeSystem::parse(text);
  EXPECT_EQ(again.hash(), D().hash());
  auto changed = LexicalDatatypeSystem::parse(text + "\n");
  EXPECT_NE(changed.hash(), D().hash());
  EXPECT_EQ(D().hash(), sha256Hex(text));
}

TEST(DatatypeSetFormat, RoundTrip) {
  auto s = set({"gYear", "gYearMonth"});
  EXPECT_EQ(D().parseSet(D().format(s)), s);
  EXPECT_THROW((void)D().parseSet("nope"), std::out_of_range);
}
