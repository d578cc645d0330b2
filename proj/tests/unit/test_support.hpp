#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "xvpa/datatypes.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/learner.hpp"
#include "xvpa/random.hpp"
#include "xvpa/weighted_vpa.hpp"

namespace xvpa::test {

/// Builtin datatype system, shared by all tests.
std::shared_ptr<const LexicalDatatypeSystem> dts();

/// Root of the source tree, for bundled data.
std::string sourceDir();

// Datatype oracles. They recompute the order closures from the edge lists by
// plain graph search and test every datatype, without candidate pruning.

bool oracleLexLess(const LexicalDatatypeSystem& d, DatatypeId a, DatatypeId b);
bool oracleKindLess(const LexicalDatatypeSystem& d, KindId a, KindId b);
DatatypeSet oracleMinLex(const LexicalDatatypeSystem& d, std::string_view text);
DatatypeSet oraclePref(const LexicalDatatypeSystem& d, DatatypeSet types);
DatatypeSet oracleMinReq(const LexicalDatatypeSystem& d, std::string_view text);
DatatypeSet oracleMaxLex(const LexicalDatatypeSystem& d, DatatypeSet types);
DatatypeSet named(const LexicalDatatypeSystem& d, const std::vector<std::string>& names);

/// Random strings for datatype properties: pool values, mutations of them and
/// random character soup.
std::string randomText(Rng& rng);

/// Independent replay of the incremental update: naming functions rebuilt
/// from their definitions over rendered strings, counting every traversal.
class Replay {
 public:
  Replay(NamingScheme scheme, std::shared_ptr<const LexicalDatatypeSystem> d);
  /// Returns the number of counters that went from zero to one.
  std::uint64_t learn(const DocumentEventStream& doc);
  [[nodiscard]] const WeightedVpa& vpa() const { return vpa_; }

 private:
  StateName call(const StateName& q, const std::string& element) const;
  StateName internal(const StateName& q) const;
  StateName ret(const StateName& popped, const std::string& element) const;

  NamingScheme scheme_;
  std::shared_ptr<const LexicalDatatypeSystem> dts_;
  WeightedVpa vpa_;
};

/// Recursive-descent checker for the car dealer schema: dealer holds
/// newcars then usedcars, each with up to three ads; a new ad holds a model,
/// a used ad a model and a year of gYear or gYearMonth form.
bool conformsToCardealer(const DocumentEventStream& doc, std::string* why = nullptr);

struct TreeShape {
  std::vector<std::string> alphabet;
  std::vector<std::string> texts;
  std::size_t maxDepth = 3;  // the root is at depth 1
  std::size_t maxWidth = 3;
};

/// Random well-nested document within the shape; text never follows text.
DocumentEventStream randomDocument(Rng& rng, const TreeShape& shape, double textProbability = 0.3);

/// Every well-nested document within the shape with at most `maxElements`
/// elements, in a fixed order.
std::vector<DocumentEventStream> enumerateDocuments(const TreeShape& shape, std::size_t maxElements);

/// Documents of a small one-element language: `<r>` with `n` children `i`
/// holding text, or `n` nested `n` elements.
DocumentEventStream wideDocument(std::size_t children);
DocumentEventStream deepDocument(std::size_t depth);

/// Sample texts, one per datatype that has a short member.
std::vector<std::string> datatypeSamples(const LexicalDatatypeSystem& d);

}  // namespace xvpa::test
