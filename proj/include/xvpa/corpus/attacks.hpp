#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "xvpa/event_stream.hpp"

namespace xvpa::corpus {

enum class AttackKind : std::uint8_t {
  HighNodeCount,
  CoerciveParsing,
  OversizedPayload,
  CdataScriptInjection,
  SqlInjectionText,
  StructuralWrapping,
};

/// Structural attacks add or move elements; datatype attacks change a text;
/// repetition attacks only repeat learned structure.
enum class AttackClass : std::uint8_t { Structural, Datatype, Repetition };

const std::vector<AttackKind>& allAttackKinds();
std::string_view attackName(AttackKind kind);
std::optional<AttackKind> parseAttackKind(std::string_view name);
AttackClass attackClass(AttackKind kind);
std::string_view attackClassName(AttackClass c);

class InapplicableAttack : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AttackSpec {
  AttackKind kind = AttackKind::StructuralWrapping;
  /// Local name of the element the mutation applies to.
  std::string target;
  std::uint64_t seed = 0;
};

/// Sizes of the generated payloads.
struct AttackSizes {
  std::size_t copies = 1000;        // high-node-count
  std::size_t depth = 2000;         // coercive-parsing
  std::size_t payloadBytes = 65536;  // oversized-payload
};

/// Mutates a well-formed document into a well-formed attack document.
/// Throws InapplicableAttack when the target is missing or unsuitable.
DocumentEventStream injectAttack(const DocumentEventStream& doc, const AttackSpec& spec, const AttackSizes& sizes = {});

}  // namespace xvpa::corpus
