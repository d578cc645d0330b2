#include "xvpa/datatypes.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "xvpa/automata/utf8.hpp"

namespace xvpa {

std::vector<DatatypeId> DatatypeSet::ids() const {
  std::vector<DatatypeId> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(static_cast<DatatypeId>(std::countr_zero(b)));
  }
  return out;
}

std::string sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

namespace {

std::vector<std::string_view> splitFields(std::string_view line, std::size_t maxFields) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size() && out.size() + 1 < maxFields) {
    while (i < line.size() && line[i] == ' ') ++i;
    if (i >= line.size()) break;
    std::size_t j = line.find(' ', i);
    if (j == std::string_view::npos) j = line.size();
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  while (i < line.size() && line[i] == ' ') ++i;
  if (i < line.size()) out.push_back(line.substr(i));
  return out;
}

// Transitive closure over at most 64 nodes; throws on cycles.
std::vector<std::uint64_t> closure(std::size_t n, const std::vector<std::pair<std::uint8_t, std::uint8_t>>& edges) {
  std::vector<std::uint64_t> above(n, 0);
  for (auto [a, b] : edges) above[a] |= std::uint64_t{1} << b;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      std::uint64_t next = above[a];
      for (std::uint64_t b = above[a]; b != 0; b &= b - 1) next |= above[std::countr_zero(b)];
      if (next != above[a]) {
        above[a] = next;
        changed = true;
      }
    }
  }
  return above;
}

}  // namespace

LexicalDatatypeSystem LexicalDatatypeSystem::parse(std::string_view text) {
  LexicalDatatypeSystem dts;
  dts.hash_ = sha256Hex(text);
  std::map<std::string, KindId, std::less<>> kindIndex;
  std::map<std::string, DatatypeId, std::less<>> typeIndex;
  bool sawHeader = false;
  std::size_t lineNo = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto fields = splitFields(line, 4);
    if (!sawHeader) {
      if (fields.size() != 2 || fields[0] != "xvpa-datatypes" || fields[1] != "1") {
        throw DatatypeFileError(lineNo, "expected header 'xvpa-datatypes 1'");
      }
      sawHeader = true;
      continue;
    }
    const auto& keyword = fields[0];
    if (keyword == "kind") {
      if (fields.size() != 2) throw DatatypeFileError(lineNo, "kind takes one name");
      if (kindIndex.count(fields[1])) throw DatatypeFileError(lineNo, "duplicate kind");
      if (dts.kinds_.size() >= kMaxDatatypes) throw DatatypeFileError(lineNo, "too many kinds");
      kindIndex.emplace(std::string(fields[1]), static_cast<KindId>(dts.kinds_.size()));
      dts.kinds_.emplace_back(fields[1]);
    } else if (keyword == "kind-edge") {
      if (fields.size() != 3) throw DatatypeFileError(lineNo, "kind-edge takes two kinds");
      auto a = kindIndex.find(fields[1]);
      auto b = kindIndex.find(fields[2]);
      if (a == kindIndex.end() || b == kindIndex.end()) throw DatatypeFileError(lineNo, "unknown kind");
      dts.kindEdges_.emplace_back(a->second, b->second);
    } else if (keyword == "type") {
      if (fields.size() != 4) throw DatatypeFileError(lineNo, "type takes name, kind and pattern");
      if (typeIndex.count(fields[1])) throw DatatypeFileError(lineNo, "duplicate type");
      if (dts.types_.size() >= kMaxDatatypes) throw DatatypeFileError(lineNo, "too many types");
      auto kind = kindIndex.find(fields[2]);
      if (kind == kindIndex.end()) throw DatatypeFileError(lineNo, "unknown kind");
      Datatype dt;
      dt.name = std::string(fields[1]);
      dt.kind = kind->second;
      dt.pattern = std::string(fields[3]);
      try {
        dt.dfa = automata::Dfa::fromPattern(dt.pattern);
      } catch (const automata::RegexError& e) {
        throw DatatypeFileError(lineNo, e.what());
      }
      typeIndex.emplace(dt.name, static_cast<DatatypeId>(dts.types_.size()));
      dts.types_.push_back(std::move(dt));
    } else if (keyword == "lex-edge") {
      if (fields.size() != 3) throw DatatypeFileError(lineNo, "lex-edge takes two types");
      auto a = typeIndex.find(fields[1]);
      auto b = typeIndex.find(fields[2]);
      if (a == typeIndex.end() || b == typeIndex.end()) throw DatatypeFileError(lineNo, "unknown type");
      dts.lexEdges_.emplace_back(a->second, b->second);
    } else {
      throw DatatypeFileError(lineNo, "unknown directive '" + std::string(keyword) + "'");
    }
  }
  if (!sawHeader) throw DatatypeFileError(lineNo, "missing header");
  if (dts.types_.empty()) throw DatatypeFileError(lineNo, "no datatypes");

  const std::size_t n = dts.types_.size();
  auto lexAbove = closure(n, dts.lexEdges_);
  dts.kindAbove_ = closure(dts.kinds_.size(), dts.kindEdges_);
  for (std::size_t a = 0; a < n; ++a) {
    if (lexAbove[a] >> a & 1U) throw DatatypeFileError(lineNo, "lex order has a cycle through " + dts.types_[a].name);
    dts.lexAbove_.emplace_back(lexAbove[a]);
  }
  for (std::size_t k = 0; k < dts.kinds_.size(); ++k) {
    if (dts.kindAbove_[k] >> k & 1U) throw DatatypeFileError(lineNo, "kind order has a cycle through " + dts.kinds_[k]);
  }

  // The unique maximum must lie above every other type and accept everything.
  std::optional<DatatypeId> top;
  for (std::size_t a = 0; a < n; ++a) {
    if (dts.lexAbove_[a].empty()) {
      if (top) throw DatatypeFileError(lineNo, "lex order has more than one maximal type");
      top = static_cast<DatatypeId>(a);
    }
  }
  dts.top_ = *top;
  auto everything = automata::Dfa::fromPattern("[\\x{0}-\\x{10FFFF}]*");
  if (!automata::Dfa::equivalent(dts.types_[dts.top_].dfa, everything)) {
    throw DatatypeFileError(lineNo, "maximal type " + dts.types_[dts.top_].name + " does not accept every string");
  }

  // Kahn's algorithm, ties broken by id, so the order is stable.
  std::vector<std::size_t> indegree(n, 0);
  for (auto [a, b] : dts.lexEdges_) ++indegree[b];
  std::vector<bool> done(n, false);
  while (dts.order_.size() < n) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!done[a] && indegree[a] == 0) {
        done[a] = true;
        dts.order_.push_back(static_cast<DatatypeId>(a));
        for (auto [x, y] : dts.lexEdges_) {
          if (x == a) --indegree[y];
        }
        break;
      }
    }
  }
  return dts;
}

LexicalDatatypeSystem LexicalDatatypeSystem::fromFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read datatype file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::shared_ptr<const LexicalDatatypeSystem> LexicalDatatypeSystem::builtin() {
  static std::once_flag once;
  static std::shared_ptr<const LexicalDatatypeSystem> instance;
  std::call_once(once, [] {
    instance = std::make_shared<const LexicalDatatypeSystem>(parse(builtinText()));
  });
  return instance;
}

std::shared_ptr<const LexicalDatatypeSystem> LexicalDatatypeSystem::load(
    const std::optional<std::filesystem::path>& path) {
  if (path) return std::make_shared<const LexicalDatatypeSystem>(fromFile(*path));
  if (const char* env = std::getenv("XVPA_DATATYPES"); env != nullptr && *env != '\0') {
    return std::make_shared<const LexicalDatatypeSystem>(fromFile(env));
  }
  return builtin();
}

std::optional<DatatypeId> LexicalDatatypeSystem::find(std::string_view name) const {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (types_[i].name == name) return static_cast<DatatypeId>(i);
  }
  return std::nullopt;
}

DatatypeId LexicalDatatypeSystem::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw std::out_of_range("unknown datatype '" + std::string(name) + "'");
  return *found;
}

DatatypeSet LexicalDatatypeSystem::minLex(std::u32string_view text) const {
  DatatypeSet result;
  DatatypeSet candidates(types_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << types_.size()) - 1);
  for (DatatypeId t : order_) {
    if (candidates.empty()) break;
    if (candidates.contains(t) && lexAccepts(t, text)) {
      result.insert(t);
      candidates = DatatypeSet(candidates.bits() & ~lexAbove_[t].bits());
      candidates.erase(t);
    }
  }
  return result;
}

DatatypeSet LexicalDatatypeSystem::minLexUtf8(std::string_view text) const {
  auto decoded = automata::decodeUtf8(text);
  if (!decoded) return DatatypeSet({top_});
  return minLex(*decoded);
}

DatatypeSet LexicalDatatypeSystem::pref(DatatypeSet types) const {
  if (types.empty()) throw std::invalid_argument("pref of an empty datatype set");
  DatatypeSet out = types;
  for (auto a : types.ids()) {
    for (auto b : types.ids()) {
      if (a != b && kindLess(kindOf(a), kindOf(b))) out.erase(b);
    }
  }
  return out;
}

DatatypeSet LexicalDatatypeSystem::maxLex(DatatypeSet types) const {
  DatatypeSet out = types;
  for (auto a : types.ids()) {
    if ((lexAbove_[a].bits() & types.bits()) != 0) out.erase(a);
  }
  return out;
}

bool LexicalDatatypeSystem::isAntichain(DatatypeSet types) const {
  for (auto a : types.ids()) {
    if ((lexAbove_[a].bits() & types.bits()) != 0) return false;
  }
  return true;
}

automata::Dfa LexicalDatatypeSystem::unionDfa(DatatypeSet types) const {
  automata::Dfa out;
  for (auto id : types.ids()) out = automata::Dfa::unite(out, types_[id].dfa);
  return out;
}

std::string LexicalDatatypeSystem::format(DatatypeSet types) const {
  std::string out;
  for (auto id : types.ids()) {
    if (!out.empty()) out += ' ';
    out += types_.at(id).name;
  }
  return out;
}

DatatypeSet LexicalDatatypeSystem::parseSet(std::string_view names) const {
  DatatypeSet out;
  for (auto field : splitFields(names, kMaxDatatypes + 1)) out.insert(id(field));
  return out;
}

std::vector<LexicalDatatypeSystem::Problem> LexicalDatatypeSystem::verify() const {
  std::vector<Problem> problems;
  for (auto [a, b] : lexEdges_) {
    if (!automata::Dfa::subsetOf(types_[a].dfa, types_[b].dfa)) {
      problems.push_back({"edge " + types_[a].name + " <=lex " + types_[b].name + " is unsound"});
    }
  }
  for (std::size_t a = 0; a < types_.size(); ++a) {
    for (std::size_t b = a + 1; b < types_.size(); ++b) {
      if (automata::Dfa::equivalent(types_[a].dfa, types_[b].dfa)) {
        problems.push_back({types_[a].name + " and " + types_[b].name + " are lexically equal"});
      }
    }
  }
  return problems;
}

}  // namespace xvpa
