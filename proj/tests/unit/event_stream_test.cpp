#include <gtest/gtest.h>

#include "test_support.hpp"
#include "xvpa/event_stream.hpp"

using namespace xvpa;

namespace {

std::vector<Event> plain(const DocumentEventStream& s) {
  std::vector<Event> out = s.events();
  for (auto& e : out) e.index = 0;
  return out;
}

}  // namespace

TEST(ParseDocument, EmptyElement) {
  auto s = parseDocument("<a/>");
  EXPECT_EQ(plain(s), (std::vector<Event>{Event::start("a"), Event::end("a")}));
}

TEST(ParseDocument, AttributesAndCdata) {
  auto s = parseDocument(R"(<a b="1">x<![CDATA[<y>]]></a>)");
  EXPECT_EQ(plain(s), (std::vector<Event>{Event::start("a"), Event::start(QualifiedName::attr("b")),
                                          Event::chars("1"), Event::end(QualifiedName::attr("b")),
                                          Event::chars("x<y>"), Event::end("a")}));
}

TEST(ParseDocument, AttributesSorted) {
  auto s = parseDocument(R"(<a c="2" b="1"/>)");
  EXPECT_EQ(toDebugText(s), "S a\nS @b\nC 1\nE @b\nS @c\nC 2\nE @c\nE a\n");
}

TEST(ParseDocument, DropsCommentsPisAndIndentation) {
  auto s = parseDocument("<?xml version=\"1.0\"?>\n<a>\n  <!-- c -->\n  <b>x<?pi y?>z</b>\n</a>\n");
  EXPECT_EQ(toDebugText(s), "S a\nS b\nC xz\nE b\nE a\n");
}

TEST(ParseDocument, EntitiesAreExpandedInline) {
  auto s = parseDocument("<a>x &amp; &#x41;</a>");
  EXPECT_EQ(s[1].text, "x & A");
}

TEST(ParseDocument, EmptyAttributeKeepsTriple) {
  auto s = parseDocument(R"(<a b=""/>)");
  ASSERT_EQ(s.size(), 5U);
  EXPECT_EQ(s[2], Event::chars("", 2));
}

TEST(ParseDocument, NamespacesEraseprefixes) {
  auto a = parseDocument(R"(<p:a xmlns:p="urn:x" p:k="1"/>)");
  auto b = parseDocument(R"(<q:a xmlns:q="urn:x" q:k="1"/>)");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].name.render(), "{urn:x}a");
  EXPECT_EQ(a[1].name.render(), "@{urn:x}k");
}

TEST(ParseDocument, Errors) {
  EXPECT_THROW(parseDocument("<a>"), MalformedXml);
  EXPECT_THROW(parseDocument("<a></b>"), MalformedXml);
  EXPECT_THROW(parseDocument("<a/><b/>"), MalformedXml);
  EXPECT_THROW(parseDocument("<!DOCTYPE a [<!ENTITY x \"y\">]><a>&x;</a>"), DoctypeRejected);
  try {
    parseDocument("<a>\n<b></a>");
    FAIL();
  } catch (const MalformedXml& e) {
    EXPECT_EQ(e.line(), 2U);
  }
}

TEST(ParseDocument, Deterministic) {
  const char* doc = R"(<r z="1" a="2"><x>t</x><y/></r>)";
  EXPECT_EQ(parseDocument(doc), parseDocument(doc));
}

TEST(StreamFromEvents, ValidStream) {
  EXPECT_NO_THROW(streamFromEvents({Event::start("a", 0), Event::end("a", 1)}));
}

TEST(StreamFromEvents, ConsecutiveCharacters) {
  try {
    streamFromEvents({Event::start("a", 0), Event::chars("x", 1), Event::chars("y", 2), Event::end("a", 3)});
    FAIL();
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.index(), 2U);
  }
}

TEST(StreamFromEvents, MismatchedNesting) {
  try {
    streamFromEvents({Event::start("a", 0), Event::end("b", 1)});
    FAIL();
  } catch (const InvariantViolation& e) {
    EXPECT_EQ(e.index(), 1U);
  }
}

TEST(StreamFromEvents, OtherViolations) {
  EXPECT_THROW(streamFromEvents({}), InvariantViolation);
  EXPECT_THROW(streamFromEvents({Event::chars("x", 0)}), InvariantViolation);
  EXPECT_THROW(streamFromEvents({Event::start("a", 0), Event::end("a", 1), Event::start("b", 2), Event::end("b", 3)}),
               InvariantViolation);
  EXPECT_THROW(streamFromEvents({Event::start("a", 3), Event::end("a", 3)}), InvariantViolation);
  // Gaps in the indices are allowed.
  EXPECT_NO_THROW(streamFromEvents({Event::start("a", 0), Event::end("a", 5)}));
  // Attributes out of order.
  EXPECT_THROW(streamFromEvents({Event::start("a", 0), Event::start(QualifiedName::attr("c"), 1),
                                 Event::chars("1", 2), Event::end(QualifiedName::attr("c"), 3),
                                 Event::start(QualifiedName::attr("b"), 4), Event::chars("1", 5),
                                 Event::end(QualifiedName::attr("b"), 6), Event::end("a", 7)}),
               InvariantViolation);
}

TEST(StreamRoundTrip, ParsedStreamsRevalidate) {
  Rng rng(11);
  test::TreeShape shape{{"a", "b", "c"}, {"x", "1 2", "<&>"}, 4, 3};
  for (int i = 0; i < 200; ++i) {
    auto doc = test::randomDocument(rng, shape);
    EXPECT_NO_THROW(streamFromEvents(doc.events()));
    auto reparsed = parseDocument(writeXml(doc));
    EXPECT_EQ(reparsed, doc);
    EXPECT_EQ(fromDebugText(toDebugText(doc)), doc);
  }
}

TEST(StreamRoundTrip, DebugTextEscapes) {
  auto doc = StreamBuilder().start("a").text("x\ny\t\\z\r").end("a").build();
  EXPECT_EQ(toDebugText(doc), "S a\nC x\\ny\\t\\\\z\\r\nE a\n");
  EXPECT_EQ(fromDebugText(toDebugText(doc)), doc);
}
