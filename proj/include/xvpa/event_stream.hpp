#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xvpa {

/// Element or attribute name with the prefix erased.
struct QualifiedName {
  std::string uri;
  std::string local;
  bool attribute = false;

  QualifiedName() = default;
  QualifiedName(std::string localName) : local(std::move(localName)) {}  // NOLINT(implicit)
  QualifiedName(const char* localName) : local(localName) {}             // NOLINT(implicit)
  QualifiedName(std::string ns, std::string localName, bool isAttribute = false)
      : uri(std::move(ns)), local(std::move(localName)), attribute(isAttribute) {}

  static QualifiedName attr(std::string localName, std::string ns = {}) {
    return {std::move(ns), std::move(localName), true};
  }

  /// `local`, `{uri}local`, with a leading '@' for attributes.
  [[nodiscard]] std::string render() const;
  /// Inverse of render. Throws std::invalid_argument on malformed input.
  static QualifiedName parse(std::string_view rendered);

  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
  /// Orders by (uri, local), then elements before attributes.
  friend std::strong_ordering operator<=>(const QualifiedName& a, const QualifiedName& b);
};

/// True for a nonempty XML NCName.
bool isNcName(std::string_view name);

enum class EventKind : std::uint8_t { StartElement, EndElement, Characters };

struct Event {
  EventKind kind = EventKind::Characters;
  QualifiedName name;  // start and end events
  std::string text;    // characters events, UTF-8
  std::size_t index = 0;

  static Event start(QualifiedName n, std::size_t i = 0) { return {EventKind::StartElement, std::move(n), {}, i}; }
  static Event end(QualifiedName n, std::size_t i = 0) { return {EventKind::EndElement, std::move(n), {}, i}; }
  static Event chars(std::string t, std::size_t i = 0) { return {EventKind::Characters, {}, std::move(t), i}; }

  friend bool operator==(const Event&, const Event&) = default;
};

/// Well-nested event sequence with one root, coalesced text and expanded,
/// sorted attributes. Only constructed through parseDocument or
/// streamFromEvents, which enforce those invariants.
class DocumentEventStream {
 public:
  DocumentEventStream() = default;

  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] std::size_t size() const { return events_.size(); }
  [[nodiscard]] bool empty() const { return events_.empty(); }
  [[nodiscard]] const Event& operator[](std::size_t i) const { return events_[i]; }
  [[nodiscard]] auto begin() const { return events_.begin(); }
  [[nodiscard]] auto end() const { return events_.end(); }

  friend bool operator==(const DocumentEventStream&, const DocumentEventStream&) = default;

 private:
  friend DocumentEventStream streamFromEvents(std::vector<Event> events);
  explicit DocumentEventStream(std::vector<Event> events) : events_(std::move(events)) {}
  std::vector<Event> events_;
};

class MalformedXml : public std::runtime_error {
 public:
  MalformedXml(std::size_t line, std::size_t column, const std::string& reason)
      : std::runtime_error("malformed XML at " + std::to_string(line) + ":" + std::to_string(column) + ": " + reason),
        line_(line), column_(column), reason_(reason) {}
  [[nodiscard]] std::size_t line() const { return line_; }
  [[nodiscard]] std::size_t column() const { return column_; }
  [[nodiscard]] const std::string& reason() const { return reason_; }

 private:
  std::size_t line_, column_;
  std::string reason_;
};

class DoctypeRejected : public std::runtime_error {
 public:
  DoctypeRejected() : std::runtime_error("inline DOCTYPE declarations are rejected") {}
};

class InvariantViolation : public std::runtime_error {
 public:
  InvariantViolation(std::size_t index, const std::string& invariant)
      : std::runtime_error("stream invariant violated at event " + std::to_string(index) + ": " + invariant),
        index_(index), invariant_(invariant) {}
  [[nodiscard]] std::size_t index() const { return index_; }
  [[nodiscard]] const std::string& invariant() const { return invariant_; }

 private:
  std::size_t index_;
  std::string invariant_;
};

/// Canonical event stream of a namespace-well-formed document. Comments,
/// processing instructions and whitespace-only text are dropped, CDATA is
/// unwrapped, adjacent text is coalesced and attributes are expanded into
/// sorted start/characters/end triples.
DocumentEventStream parseDocument(std::string_view bytes);
DocumentEventStream parseFile(const std::filesystem::path& path);

/// Checks every stream invariant and wraps the events. Throws
/// InvariantViolation naming the first violation.
DocumentEventStream streamFromEvents(std::vector<Event> events);

/// Line format `K label` with K in {S, E, C}; text escapes \\ \n \r \t.
std::string toDebugText(const DocumentEventStream& stream);
DocumentEventStream fromDebugText(std::string_view text);

/// Serializes a stream back to XML (UTF-8, no declaration). Throws
/// std::invalid_argument if a text holds characters XML cannot carry.
std::string writeXml(const DocumentEventStream& stream);

/// Appends events with consecutive indices; build() validates.
class StreamBuilder {
 public:
  StreamBuilder& start(QualifiedName name);
  /// Attribute triple; call right after start(), in sorted order.
  StreamBuilder& attribute(QualifiedName name, std::string value);
  StreamBuilder& text(std::string value);
  StreamBuilder& end(QualifiedName name);
  /// start + text + end.
  StreamBuilder& leaf(QualifiedName name, std::string value);
  [[nodiscard]] DocumentEventStream build() const { return streamFromEvents(events_); }
  [[nodiscard]] const std::vector<Event>& events() const { return events_; }

 private:
  std::vector<Event> events_;
};

}  // namespace xvpa
