#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xvpa/datatypes.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/random.hpp"

namespace xvpa::corpus {

class InvalidGrammar : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Content model over types: type reference, sequence, choice, optional and
/// bounded repetition.
struct Particle {
  enum class Kind : std::uint8_t { Type, Sequence, Choice, Optional, Repeat };
  Kind kind = Kind::Sequence;
  std::string type;                // Kind::Type
  std::vector<Particle> children;  // one child for Optional and Repeat
  unsigned min = 0;                // Kind::Repeat
  unsigned max = 0;
  /// Optional: probability of presence. Repeat: unused.
  double probability = 0.5;
  /// Repeat: relative weight of each count min..max; uniform when empty.
  std::vector<double> weights;

  static Particle ref(std::string type);
  static Particle sequence(std::vector<Particle> items);
  static Particle choice(std::vector<Particle> options);
  static Particle optional(Particle item, double probability = 0.5);
  static Particle repeat(Particle item, unsigned min, unsigned max, std::vector<double> weights = {});
};

/// A type of an EDTD-shaped grammar: an element name plus either a content
/// model (complex type) or a text sampler target (simple type).
struct TypeDef {
  std::string name;
  std::string element;
  std::optional<Particle> content;
  /// Simple types: alternative datatype sets, each space-separated; every
  /// text has minimally required datatypes equal to one of them.
  std::vector<std::string> textTypes;
};

/// Draws texts whose minimally required datatypes equal a target set, by
/// rejection over random walks of the lexical acceptors of its members.
class TextSampler {
 public:
  TextSampler(std::shared_ptr<const LexicalDatatypeSystem> dts, std::vector<std::string> targets);
  std::string sample(Rng& rng) const;
  /// A text for one particular target set.
  std::string sample(Rng& rng, DatatypeSet target) const;
  [[nodiscard]] const std::vector<DatatypeSet>& targets() const { return targets_; }

 private:
  std::shared_ptr<const LexicalDatatypeSystem> dts_;
  std::vector<DatatypeSet> targets_;
};

struct GenerateOptions {
  /// Pick the smallest choice for every optional, repeat and choice.
  bool minimal = false;
};

class Grammar {
 public:
  Grammar(std::string startType, std::vector<TypeDef> types, std::shared_ptr<const LexicalDatatypeSystem> dts);

  [[nodiscard]] const std::string& startType() const { return start_; }
  [[nodiscard]] const TypeDef& type(const std::string& name) const;
  [[nodiscard]] const std::map<std::string, TypeDef>& types() const { return types_; }

  [[nodiscard]] DocumentEventStream generate(Rng& rng, const GenerateOptions& options = {}) const;
  /// n documents from one seeded generator.
  [[nodiscard]] std::vector<DocumentEventStream> generate(std::size_t n, std::uint64_t seed,
                                                          const GenerateOptions& options = {}) const;

 private:
  void emit(const std::string& typeName, Rng& rng, const GenerateOptions& options, StreamBuilder& out,
            std::size_t depth) const;
  void emit(const Particle& p, Rng& rng, const GenerateOptions& options, StreamBuilder& out, std::size_t depth) const;

  std::string start_;
  std::map<std::string, TypeDef> types_;
  std::map<std::string, TextSampler> samplers_;
  std::shared_ptr<const LexicalDatatypeSystem> dts_;
};

/// The six-type car dealer schema with `ad` typed by its parent and a year
/// field of gYear or gYearMonth.
Grammar cardealerGrammar(std::shared_ptr<const LexicalDatatypeSystem> dts);
/// The same schema extended with a dealer information block and priced ads;
/// used for the bundled detection scenario.
Grammar cardealerScenarioGrammar(std::shared_ptr<const LexicalDatatypeSystem> dts);

}  // namespace xvpa::corpus
