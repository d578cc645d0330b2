#include <algorithm>
#include <set>

#include "xvpa/automata/utf8.hpp"
#include "xvpa/corpus/grammar.hpp"

namespace xvpa::corpus {

namespace {

constexpr std::size_t kMaxDepth = 64;
constexpr int kSampleAttempts = 20000;

bool isXmlChar(char32_t c) {
  return c == 0x9 || c == 0xA || c == 0xD || (c >= 0x20 && c <= 0xD7FF) || (c >= 0xE000 && c <= 0xFFFD) ||
         (c >= 0x10000 && c <= 0x10FFFF);
}

bool isXmlSpace(char32_t c) { return c == 0x20 || c == 0x9 || c == 0xA || c == 0xD; }

// Element name to type for every type reference of a content model, without
// descending into referenced types.
void collectRefs(const Particle& p, std::map<std::string, std::string>& seen,
                 const std::map<std::string, TypeDef>& types, const std::string& owner) {
  if (p.kind == Particle::Kind::Type) {
    auto it = types.find(p.type);
    if (it == types.end()) throw InvalidGrammar("type " + owner + " refers to unknown type " + p.type);
    auto [at, fresh] = seen.emplace(it->second.element, p.type);
    if (!fresh && at->second != p.type) {
      throw InvalidGrammar("content of " + owner + " gives element " + it->second.element + " two types");
    }
    return;
  }
  for (const auto& c : p.children) collectRefs(c, seen, types, owner);
}

void checkParticle(const Particle& p, const std::string& owner) {
  switch (p.kind) {
    case Particle::Kind::Type:
      if (!p.children.empty()) throw InvalidGrammar("type reference with children in " + owner);
      return;
    case Particle::Kind::Sequence:
    case Particle::Kind::Choice:
      if (p.kind == Particle::Kind::Choice && p.children.empty()) throw InvalidGrammar("empty choice in " + owner);
      break;
    case Particle::Kind::Optional:
      if (p.children.size() != 1 || p.probability < 0 || p.probability > 1) {
        throw InvalidGrammar("malformed optional in " + owner);
      }
      break;
    case Particle::Kind::Repeat:
      if (p.children.size() != 1 || p.min > p.max) throw InvalidGrammar("malformed repetition in " + owner);
      if (!p.weights.empty()) {
        if (p.weights.size() != p.max - p.min + 1) throw InvalidGrammar("repetition weights do not match bounds");
        double sum = 0;
        for (double w : p.weights) {
          if (w < 0) throw InvalidGrammar("negative repetition weight in " + owner);
          sum += w;
        }
        if (sum <= 0) throw InvalidGrammar("repetition weights sum to zero in " + owner);
      }
      break;
  }
  for (const auto& c : p.children) checkParticle(c, owner);
}

}  // namespace

Particle Particle::ref(std::string type) {
  Particle p;
  p.kind = Kind::Type;
  p.type = std::move(type);
  return p;
}

Particle Particle::sequence(std::vector<Particle> items) {
  Particle p;
  p.kind = Kind::Sequence;
  p.children = std::move(items);
  return p;
}

Particle Particle::choice(std::vector<Particle> options) {
  Particle p;
  p.kind = Kind::Choice;
  p.children = std::move(options);
  return p;
}

Particle Particle::optional(Particle item, double probability) {
  Particle p;
  p.kind = Kind::Optional;
  p.children.push_back(std::move(item));
  p.probability = probability;
  return p;
}

Particle Particle::repeat(Particle item, unsigned min, unsigned max, std::vector<double> weights) {
  Particle p;
  p.kind = Kind::Repeat;
  p.children.push_back(std::move(item));
  p.min = min;
  p.max = max;
  p.weights = std::move(weights);
  return p;
}

TextSampler::TextSampler(std::shared_ptr<const LexicalDatatypeSystem> dts, std::vector<std::string> targets)
    : dts_(std::move(dts)) {
  if (targets.empty()) throw InvalidGrammar("text sampler without target datatypes");
  for (const auto& names : targets) {
    DatatypeSet set;
    try {
      set = dts_->parseSet(names);
    } catch (const std::out_of_range&) {
      throw InvalidGrammar("unknown datatype in '" + names + "'");
    }
    if (set.empty()) throw InvalidGrammar("empty text datatype set");
    targets_.push_back(set);
  }
}

std::string TextSampler::sample(Rng& rng) const { return sample(rng, targets_[uniformBelow(rng, targets_.size())]); }

std::string TextSampler::sample(Rng& rng, DatatypeSet target) const {
  const auto members = target.ids();
  automata::Dfa::SampleOptions options;
  options.maxLength = 16;
  options.stopProbability = 0.2;
  for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
    const auto& dfa = dts_->datatype(members[static_cast<std::size_t>(attempt) % members.size()]).dfa;
    auto text = dfa.sample(rng, options);
    if (!text || text->empty()) continue;
    if (std::all_of(text->begin(), text->end(), isXmlSpace)) continue;
    if (!std::all_of(text->begin(), text->end(), isXmlChar)) continue;
    if (dts_->minReq(*text) == target) return automata::encodeUtf8(*text);
  }
  throw InvalidGrammar("no text with minimally required datatypes {" + dts_->format(target) + "} found");
}

Grammar::Grammar(std::string startType, std::vector<TypeDef> types, std::shared_ptr<const LexicalDatatypeSystem> dts)
    : start_(std::move(startType)), dts_(std::move(dts)) {
  for (auto& t : types) {
    if (!isNcName(t.element)) throw InvalidGrammar("type " + t.name + " has invalid element name '" + t.element + "'");
    std::string name = t.name;
    if (!types_.emplace(name, std::move(t)).second) throw InvalidGrammar("duplicate type " + name);
  }
  if (!types_.count(start_)) throw InvalidGrammar("unknown start type " + start_);
  for (const auto& [name, t] : types_) {
    if (t.content.has_value() == !t.textTypes.empty()) {
      throw InvalidGrammar("type " + name + " needs exactly one of content model and text datatypes");
    }
    if (t.content) {
      checkParticle(*t.content, name);
      std::map<std::string, std::string> seen;
      collectRefs(*t.content, seen, types_, name);
    } else {
      samplers_.emplace(name, TextSampler(dts_, t.textTypes));
    }
  }
  // Every sampler target must be reachable.
  Rng probe(0);
  for (const auto& [name, sampler] : samplers_) {
    for (auto target : sampler.targets()) (void)sampler.sample(probe, target);
  }
  // The minimal document must be finite.
  Rng rng(0);
  StreamBuilder out;
  emit(start_, rng, GenerateOptions{true}, out, 0);
}

const TypeDef& Grammar::type(const std::string& name) const {
  auto it = types_.find(name);
  if (it == types_.end()) throw InvalidGrammar("unknown type " + name);
  return it->second;
}

void Grammar::emit(const std::string& typeName, Rng& rng, const GenerateOptions& options, StreamBuilder& out,
                   std::size_t depth) const {
  if (depth > kMaxDepth) throw InvalidGrammar("grammar nests deeper than " + std::to_string(kMaxDepth));
  const auto& t = type(typeName);
  out.start(t.element);
  if (t.content) {
    emit(*t.content, rng, options, out, depth + 1);
  } else {
    out.text(samplers_.at(typeName).sample(rng));
  }
  out.end(t.element);
}

void Grammar::emit(const Particle& p, Rng& rng, const GenerateOptions& options, StreamBuilder& out,
                   std::size_t depth) const {
  switch (p.kind) {
    case Particle::Kind::Type:
      emit(p.type, rng, options, out, depth);
      return;
    case Particle::Kind::Sequence:
      for (const auto& c : p.children) emit(c, rng, options, out, depth);
      return;
    case Particle::Kind::Choice:
      emit(p.children[options.minimal ? 0 : uniformBelow(rng, p.children.size())], rng, options, out, depth);
      return;
    case Particle::Kind::Optional:
      if (!options.minimal && chance(rng, p.probability)) emit(p.children[0], rng, options, out, depth);
      return;
    case Particle::Kind::Repeat: {
      unsigned count = p.min;
      if (!options.minimal) {
        if (p.weights.empty()) {
          count = static_cast<unsigned>(uniformBetween(rng, p.min, p.max));
        } else {
          double total = 0;
          for (double w : p.weights) total += w;
          double x = uniformUnit(rng) * total;
          std::size_t i = 0;
          while (i + 1 < p.weights.size() && x >= p.weights[i]) x -= p.weights[i++];
          count = p.min + static_cast<unsigned>(i);
        }
      }
      for (unsigned i = 0; i < count; ++i) emit(p.children[0], rng, options, out, depth);
      return;
    }
  }
}

DocumentEventStream Grammar::generate(Rng& rng, const GenerateOptions& options) const {
  StreamBuilder out;
  emit(start_, rng, options, out, 0);
  return out.build();
}

std::vector<DocumentEventStream> Grammar::generate(std::size_t n, std::uint64_t seed,
                                                   const GenerateOptions& options) const {
  if (n == 0) throw InvalidGrammar("document count must be at least 1");
  Rng rng(seed);
  std::vector<DocumentEventStream> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate(rng, options));
  return out;
}

namespace {

TypeDef complexType(std::string name, std::string element, Particle content) {
  return TypeDef{std::move(name), std::move(element), std::move(content), {}};
}

TypeDef simpleType(std::string name, std::string element, std::vector<std::string> datatypes) {
  return TypeDef{std::move(name), std::move(element), std::nullopt, std::move(datatypes)};
}

}  // namespace

Grammar cardealerGrammar(std::shared_ptr<const LexicalDatatypeSystem> dts) {
  using P = Particle;
  std::vector<TypeDef> types{
      complexType("dealer", "dealer", P::sequence({P::ref("newcars"), P::ref("usedcars")})),
      complexType("newcars", "newcars", P::repeat(P::ref("ad_new"), 0, 3)),
      complexType("usedcars", "usedcars", P::repeat(P::ref("ad_used"), 0, 3)),
      complexType("ad_new", "ad", P::ref("model")),
      complexType("ad_used", "ad", P::sequence({P::ref("model"), P::ref("year")})),
      simpleType("model", "model", {"string"}),
      simpleType("year", "year", {"gYear", "gYearMonth"}),
  };
  return Grammar("dealer", std::move(types), std::move(dts));
}

Grammar cardealerScenarioGrammar(std::shared_ptr<const LexicalDatatypeSystem> dts) {
  using P = Particle;
  // Empty ad lists and two-ad lists are common so that every sibling pair
  // shows up early in training.
  std::vector<double> adCounts{0.3, 0.3, 0.25, 0.15};
  std::vector<TypeDef> types{
      complexType("dealer", "dealer", P::sequence({P::ref("info"), P::ref("newcars"), P::ref("usedcars")})),
      complexType("info", "info",
                  P::sequence({P::ref("name"), P::ref("slogan"), P::ref("street"), P::ref("zip"), P::ref("city"),
                               P::ref("phone"), P::optional(P::ref("email"), 0.5), P::ref("established")})),
      complexType("newcars", "newcars", P::repeat(P::ref("ad_new"), 0, 3, adCounts)),
      complexType("usedcars", "usedcars", P::repeat(P::ref("ad_used"), 0, 3, adCounts)),
      complexType("ad_new", "ad", P::sequence({P::ref("model"), P::ref("price")})),
      complexType("ad_used", "ad",
                  P::sequence({P::ref("model"), P::ref("year"), P::ref("price"), P::optional(P::ref("mileage"), 0.5)})),
      simpleType("name", "name", {"token"}),
      simpleType("slogan", "slogan", {"normalizedString"}),
      simpleType("street", "street", {"token"}),
      simpleType("zip", "zip", {"unsignedShort"}),
      simpleType("city", "city", {"NCName language", "anyURI Name NCName"}),
      simpleType("phone", "phone", {"token"}),
      simpleType("email", "email", {"anyURI"}),
      simpleType("established", "established", {"date"}),
      simpleType("model", "model", {"token"}),
      simpleType("year", "year", {"gYear", "gYearMonth"}),
      simpleType("price", "price", {"decimal"}),
      simpleType("mileage", "mileage", {"unsignedInt"}),
  };
  return Grammar("dealer", std::move(types), std::move(dts));
}

}  // namespace xvpa::corpus
