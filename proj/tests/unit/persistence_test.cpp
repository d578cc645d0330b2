#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "test_support.hpp"
#include "xvpa/persistence.hpp"

using namespace xvpa;
namespace fs = std::filesystem;

namespace {

std::string golden() {
  return "xvpa-state 1\n"
         "scheme ancestor k=1 l=1\n"
         "datatypes " +
         test::dts()->hash() +
         "\n"
         "sanitized 0\n"
         "documents 1\n"
         "mc b080a29e31914dfa1b31ac9f269407d521e2b4e0fa8409311acc3d6ab98d8be5 13\n"
         "state 0 |\n"
         "state 1 |a\n"
         "state 1 @b|\n"
         "state 1 @b|$\n"
         "state 1 a|\n"
         "state 1 a|$\n"
         "state 1 a|@b\n"
         "final 1 |a\n"
         "call 1 | a a|\n"
         "call 1 a| @b @b|\n"
         "int 1 @b| NMTOKENS @b|$\n"
         "int 1 a|@b boolean a|$\n"
         "ret 1 @b|$ @b a| a|@b\n"
         "ret 1 a|$ a | |a\n"
         "end\n";
}

Learner goldenLearner() {
  Learner l({NamingMode::Ancestor, 1, 1}, test::dts());
  l.learn(parseDocument(R"(<a b="x y">false</a>)"));
  return l;
}

fs::path tempDir() {
  auto dir = fs::temp_directory_path() / ("xvpa-persist-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t errorLine(const std::string& text) {
  try {
    (void)parseState(text, test::dts());
  } catch (const StateFileError& e) {
    return e.line();
  }
  return 0;
}

std::string replaceLine(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST(StateFile, GoldenSerialization) { EXPECT_EQ(serializeState(goldenLearner()), golden()); }

TEST(StateFile, ParseRestoresEverything) {
  auto l = parseState(golden(), test::dts());
  EXPECT_EQ(l.scheme(), (NamingScheme{NamingMode::Ancestor, 1, 1}));
  EXPECT_EQ(l.documentsLearned(), 1U);
  EXPECT_EQ(l.mindChangeSeries(), std::vector<std::uint64_t>{13});
  EXPECT_EQ(l.vpa(), goldenLearner().vpa());
  EXPECT_EQ(serializeState(l), golden());
}

TEST(StateFile, RoundTripOnRandomStates) {
  Rng rng(4);
  test::TreeShape shape{{"a", "b", "c"}, {"1", "x y", "a,b", "%", "|", "true"}, 3, 3};
  for (int i = 0; i < 100; ++i) {
    NamingScheme scheme{chance(rng, 0.5) ? NamingMode::Ancestor : NamingMode::AncestorSibling,
                        static_cast<unsigned>(1 + uniformBelow(rng, 2)), static_cast<unsigned>(1 + uniformBelow(rng, 3))};
    Learner l(scheme, test::dts());
    for (int j = 0; j < 3; ++j) l.learn(test::randomDocument(rng, shape));
    if (chance(rng, 0.3)) (void)l.sanitize();
    auto text = serializeState(l);
    auto back = parseState(text, test::dts());
    ASSERT_EQ(serializeState(back), text);
    ASSERT_EQ(back.vpa(), l.vpa());
    ASSERT_EQ(back.sanitized(), l.sanitized());
  }
}

TEST(StateFile, NamespacedAndEscapedNames) {
  Learner l({NamingMode::AncestorSibling, 2, 2}, test::dts());
  l.learn(parseDocument(R"(<p:a xmlns:p="urn:a,b|c%d" p:q="1"><b>x</b></p:a>)"));
  auto text = serializeState(l);
  EXPECT_EQ(serializeState(parseState(text, test::dts())), text);
}

TEST(StateFile, RejectsMalformedInput) {
  auto g = golden();
  EXPECT_EQ(errorLine("xvpa-state 2\n"), 1U);
  EXPECT_EQ(errorLine(replaceLine(g, "scheme ancestor k=1 l=1", "scheme ancestor k=0 l=1")), 2U);
  EXPECT_EQ(errorLine(replaceLine(g, "documents 1", "documents 01")), 5U);
  EXPECT_EQ(errorLine(replaceLine(g, "sanitized 0", "sanitized 2")), 4U);
  EXPECT_EQ(errorLine(replaceLine(g, "state 1 |a\n", "state 0 |a\n")), 8U);
  EXPECT_EQ(errorLine(replaceLine(g, "int 1 @b| NMTOKENS", "int 1 @b| nonsense")), 17U);
  // Sections out of order.
  EXPECT_EQ(errorLine(replaceLine(g, "final 1 |a\ncall 1 | a a|\n", "call 1 | a a|\nfinal 1 |a\n")), 15U);
  // Truncated file.
  EXPECT_GT(errorLine(g.substr(0, g.size() - 4)), 0U);
  EXPECT_GT(errorLine(g + "extra\n"), 0U);
}

TEST(StateFile, DatatypeHashMismatchIsKept) {
  auto text = replaceLine(golden(), test::dts()->hash(), std::string(64, 'a'));
  auto l = parseState(text, test::dts());
  EXPECT_FALSE(l.hashMatches());
  EXPECT_EQ(serializeState(l), text);
}

TEST(StateFile, SaveLoadSaveIsByteIdentical) {
  auto dir = tempDir();
  auto path = dir / "state.xvpa";
  saveState(path, goldenLearner());
  EXPECT_EQ(slurp(path), golden());
  auto loaded = loadState(path, test::dts());
  saveState(path, loaded);
  EXPECT_EQ(slurp(path), golden());
  // No temporary files left behind.
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  EXPECT_EQ(files, 1U);
  EXPECT_THROW(loadState(dir / "missing.xvpa", test::dts()), std::runtime_error);
  fs::remove_all(dir);
}

TEST(StateFile, LockIsExclusive) {
  auto dir = tempDir();
  auto path = dir / "state.xvpa";
  {
    StateLock lock(path);
    EXPECT_TRUE(fs::exists(dir / "state.xvpa.lock"));
  }
  StateLock again(path);
  fs::remove_all(dir);
}
