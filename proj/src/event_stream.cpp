#include "xvpa/event_stream.hpp"

#include <expat.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>
#include <tuple>

#include "xvpa/automata/charset.hpp"
#include "xvpa/automata/utf8.hpp"

namespace xvpa {

namespace {

constexpr char kNamespaceSeparator = '\x01';

bool isXmlWhitespace(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; });
}

QualifiedName splitExpatName(const XML_Char* raw, bool attribute) {
  std::string_view name(raw);
  auto sep = name.find(kNamespaceSeparator);
  if (sep == std::string_view::npos) return {std::string(), std::string(name), attribute};
  return {std::string(name.substr(0, sep)), std::string(name.substr(sep + 1)), attribute};
}

struct ParseContext {
  XML_Parser parser = nullptr;
  std::vector<Event> events;
  std::string pending;
  bool doctype = false;

  void flushText() {
    if (!pending.empty() && !isXmlWhitespace(pending)) {
      events.push_back(Event::chars(std::move(pending), events.size()));
    }
    pending.clear();
  }
};

void XMLCALL onStart(void* data, const XML_Char* name, const XML_Char** attributes) {
  auto* ctx = static_cast<ParseContext*>(data);
  ctx->flushText();
  ctx->events.push_back(Event::start(splitExpatName(name, false), ctx->events.size()));
  std::vector<std::pair<QualifiedName, std::string>> attrs;
  for (std::size_t i = 0; attributes[i] != nullptr; i += 2) {
    attrs.emplace_back(splitExpatName(attributes[i], true), attributes[i + 1]);
  }
  std::sort(attrs.begin(), attrs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [attrName, value] : attrs) {
    ctx->events.push_back(Event::start(attrName, ctx->events.size()));
    ctx->events.push_back(Event::chars(std::move(value), ctx->events.size()));
    ctx->events.push_back(Event::end(std::move(attrName), ctx->events.size()));
  }
}

void XMLCALL onEnd(void* data, const XML_Char* name) {
  auto* ctx = static_cast<ParseContext*>(data);
  ctx->flushText();
  ctx->events.push_back(Event::end(splitExpatName(name, false), ctx->events.size()));
}

void XMLCALL onText(void* data, const XML_Char* text, int length) {
  static_cast<ParseContext*>(data)->pending.append(text, static_cast<std::size_t>(length));
}

void XMLCALL onDoctype(void* data, const XML_Char*, const XML_Char*, const XML_Char*, int) {
  auto* ctx = static_cast<ParseContext*>(data);
  ctx->doctype = true;
  XML_StopParser(ctx->parser, XML_FALSE);
}

std::string escapeDebug(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescapeDebug(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '\\') {
      out += text[i];
      continue;
    }
    if (++i >= text.size()) throw std::invalid_argument("dangling escape in debug text");
    switch (text[i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      default: throw std::invalid_argument("unknown escape in debug text");
    }
  }
  return out;
}

}  // namespace

std::string QualifiedName::render() const {
  std::string out = attribute ? "@" : "";
  if (!uri.empty()) out += "{" + uri + "}";
  return out + local;
}

QualifiedName QualifiedName::parse(std::string_view rendered) {
  QualifiedName out;
  if (!rendered.empty() && rendered.front() == '@') {
    out.attribute = true;
    rendered.remove_prefix(1);
  }
  if (!rendered.empty() && rendered.front() == '{') {
    auto close = rendered.find('}');
    if (close == std::string_view::npos) throw std::invalid_argument("unterminated namespace in name");
    out.uri = std::string(rendered.substr(1, close - 1));
    rendered.remove_prefix(close + 1);
  }
  if (!isNcName(rendered)) throw std::invalid_argument("invalid local name '" + std::string(rendered) + "'");
  out.local = std::string(rendered);
  return out;
}

std::strong_ordering operator<=>(const QualifiedName& a, const QualifiedName& b) {
  return std::tie(a.uri, a.local, a.attribute) <=> std::tie(b.uri, b.local, b.attribute);
}

bool isNcName(std::string_view name) {
  auto decoded = automata::decodeUtf8(name);
  if (!decoded || decoded->empty()) return false;
  const auto& start = automata::CharSet::nameStart();
  const auto& rest = automata::CharSet::nameChar();
  if (!start.contains((*decoded)[0]) || (*decoded)[0] == ':') return false;
  return std::all_of(decoded->begin() + 1, decoded->end(), [&](char32_t c) { return c != ':' && rest.contains(c); });
}

DocumentEventStream parseDocument(std::string_view bytes) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreateNS(nullptr, kNamespaceSeparator), &XML_ParserFree);
  if (!parser) throw std::bad_alloc();
  ParseContext ctx;
  ctx.parser = parser.get();
  XML_SetUserData(parser.get(), &ctx);
  XML_SetElementHandler(parser.get(), onStart, onEnd);
  XML_SetCharacterDataHandler(parser.get(), onText);
  XML_SetStartDoctypeDeclHandler(parser.get(), onDoctype);

  constexpr std::size_t kChunk = 1 << 20;
  std::size_t offset = 0;
  do {
    std::size_t n = std::min(kChunk, bytes.size() - offset);
    bool last = offset + n == bytes.size();
    if (XML_Parse(parser.get(), bytes.data() + offset, static_cast<int>(n), last ? XML_TRUE : XML_FALSE) !=
        XML_STATUS_OK) {
      if (ctx.doctype) throw DoctypeRejected();
      throw MalformedXml(XML_GetCurrentLineNumber(parser.get()), XML_GetCurrentColumnNumber(parser.get()),
                         XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    offset += n;
  } while (offset < bytes.size());
  if (ctx.doctype) throw DoctypeRejected();
  if (ctx.events.empty()) throw MalformedXml(1, 0, "no root element");
  return streamFromEvents(std::move(ctx.events));
}

DocumentEventStream parseFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parseDocument(buffer.str());
}

DocumentEventStream streamFromEvents(std::vector<Event> events) {
  if (events.empty()) throw InvariantViolation(0, "stream has no root element");
  std::vector<const QualifiedName*> open;
  bool rootClosed = false;
  // 0: free; 1: after start(@a), expecting chars; 2: after that chars, expecting end(@a)
  int attrPhase = 0;
  // Attributes may follow only an element start or a completed attribute.
  bool attributesAllowed = false;
  const QualifiedName* lastAttribute = nullptr;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (i > 0 && e.index <= events[i - 1].index) throw InvariantViolation(i, "stream indices must strictly increase");
    if (rootClosed) throw InvariantViolation(i, "content after the root element");
    if (attrPhase == 1) {
      if (e.kind != EventKind::Characters) throw InvariantViolation(i, "attribute start must be followed by its value");
      attrPhase = 2;
      continue;
    }
    if (attrPhase == 2) {
      if (e.kind != EventKind::EndElement || e.name != *open.back()) {
        throw InvariantViolation(i, "attribute value must be followed by the attribute end");
      }
      open.pop_back();
      attrPhase = 0;
      attributesAllowed = true;
      continue;
    }
    switch (e.kind) {
      case EventKind::StartElement:
        if (!isNcName(e.name.local)) throw InvariantViolation(i, "invalid local name '" + e.name.local + "'");
        if (e.name.attribute) {
          if (!attributesAllowed) throw InvariantViolation(i, "attribute outside an element start");
          if (lastAttribute != nullptr && !(*lastAttribute < e.name)) {
            throw InvariantViolation(i, "attributes must be sorted and unique");
          }
          lastAttribute = &e.name;
          open.push_back(&e.name);
          attrPhase = 1;
        } else {
          if (open.empty() && i != 0) throw InvariantViolation(i, "more than one root element");
          open.push_back(&e.name);
          attributesAllowed = true;
          lastAttribute = nullptr;
        }
        break;
      case EventKind::EndElement:
        if (e.name.attribute) throw InvariantViolation(i, "attribute end without its start");
        if (open.empty() || *open.back() != e.name) throw InvariantViolation(i, "mismatched end element");
        open.pop_back();
        attributesAllowed = false;
        if (open.empty()) rootClosed = true;
        break;
      case EventKind::Characters:
        if (open.empty()) throw InvariantViolation(i, "text outside the root element");
        if (i > 0 && events[i - 1].kind == EventKind::Characters) {
          throw InvariantViolation(i, "consecutive characters events");
        }
        attributesAllowed = false;
        break;
    }
  }
  if (attrPhase != 0 || !open.empty()) throw InvariantViolation(events.size(), "unclosed element at end of stream");
  return DocumentEventStream(std::move(events));
}

std::string toDebugText(const DocumentEventStream& stream) {
  std::string out;
  for (const auto& e : stream) {
    switch (e.kind) {
      case EventKind::StartElement: out += "S " + e.name.render(); break;
      case EventKind::EndElement: out += "E " + e.name.render(); break;
      case EventKind::Characters: out += "C " + escapeDebug(e.text); break;
    }
    out += '\n';
  }
  return out;
}

DocumentEventStream fromDebugText(std::string_view text) {
  std::vector<Event> events;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (line.size() < 2 || line[1] != ' ') throw std::invalid_argument("malformed debug line");
    auto label = line.substr(2);
    switch (line[0]) {
      case 'S': events.push_back(Event::start(QualifiedName::parse(label), events.size())); break;
      case 'E': events.push_back(Event::end(QualifiedName::parse(label), events.size())); break;
      case 'C': events.push_back(Event::chars(unescapeDebug(label), events.size())); break;
      default: throw std::invalid_argument("unknown event kind in debug text");
    }
  }
  return streamFromEvents(std::move(events));
}

StreamBuilder& StreamBuilder::start(QualifiedName name) {
  events_.push_back(Event::start(std::move(name), events_.size()));
  return *this;
}

StreamBuilder& StreamBuilder::attribute(QualifiedName name, std::string value) {
  name.attribute = true;
  events_.push_back(Event::start(name, events_.size()));
  events_.push_back(Event::chars(std::move(value), events_.size()));
  events_.push_back(Event::end(std::move(name), events_.size()));
  return *this;
}

StreamBuilder& StreamBuilder::text(std::string value) {
  events_.push_back(Event::chars(std::move(value), events_.size()));
  return *this;
}

StreamBuilder& StreamBuilder::end(QualifiedName name) {
  events_.push_back(Event::end(std::move(name), events_.size()));
  return *this;
}

StreamBuilder& StreamBuilder::leaf(QualifiedName name, std::string value) {
  start(name);
  text(std::move(value));
  return end(std::move(name));
}

}  // namespace xvpa
