#include <map>

#include "xvpa/automata/utf8.hpp"
#include "xvpa/event_stream.hpp"

namespace xvpa {

namespace {

bool isXmlChar(char32_t c) {
  return c == 0x9 || c == 0xA || c == 0xD || (c >= 0x20 && c <= 0xD7FF) || (c >= 0xE000 && c <= 0xFFFD) ||
         (c >= 0x10000 && c <= 0x10FFFF);
}

void checkXmlText(std::string_view text) {
  auto decoded = automata::decodeUtf8(text);
  if (!decoded) throw std::invalid_argument("text is not valid UTF-8");
  for (char32_t c : *decoded) {
    if (!isXmlChar(c)) throw std::invalid_argument("text contains a character XML cannot represent");
  }
}

std::string escapeText(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escapeAttribute(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

// Markup-looking text goes into a CDATA section when that round-trips.
std::string writeText(std::string_view text) {
  bool markup = text.find_first_of("<&") != std::string_view::npos;
  if (markup && text.find("]]>") == std::string_view::npos && text.find('\r') == std::string_view::npos) {
    return "<![CDATA[" + std::string(text) + "]]>";
  }
  return escapeText(text);
}

}  // namespace

std::string writeXml(const DocumentEventStream& stream) {
  std::map<std::string, std::string> prefixes;
  for (const auto& e : stream) {
    if (e.kind != EventKind::Characters && !e.name.uri.empty() && !prefixes.count(e.name.uri)) {
      prefixes.emplace(e.name.uri, "ns" + std::to_string(prefixes.size()));
    }
  }
  auto qname = [&](const QualifiedName& n) {
    return n.uri.empty() ? n.local : prefixes.at(n.uri) + ":" + n.local;
  };

  std::string out;
  bool tagOpen = false;
  bool root = true;
  const auto& events = stream.events();
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    switch (e.kind) {
      case EventKind::StartElement:
        if (e.name.attribute) {
          checkXmlText(events[i + 1].text);
          out += " " + qname(e.name) + "=\"" + escapeAttribute(events[i + 1].text) + "\"";
          i += 2;
          break;
        }
        if (tagOpen) out += '>';
        out += "<" + qname(e.name);
        if (root) {
          for (const auto& [uri, prefix] : prefixes) out += " xmlns:" + prefix + "=\"" + escapeAttribute(uri) + "\"";
          root = false;
        }
        tagOpen = true;
        break;
      case EventKind::EndElement:
        if (tagOpen) {
          out += "/>";
          tagOpen = false;
        } else {
          out += "</" + qname(e.name) + ">";
        }
        break;
      case EventKind::Characters:
        checkXmlText(e.text);
        if (tagOpen) {
          out += '>';
          tagOpen = false;
        }
        out += writeText(e.text);
        break;
    }
  }
  out += '\n';
  return out;
}

}  // namespace xvpa
