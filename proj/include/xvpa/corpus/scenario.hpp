#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "xvpa/corpus/attacks.hpp"
#include "xvpa/corpus/evaluation.hpp"
#include "xvpa/corpus/grammar.hpp"
#include "xvpa/learner.hpp"

namespace xvpa::corpus {

struct ScenarioOptions {
  std::size_t train = 50;
  std::size_t normal = 1000;
  std::size_t attacksPerKind = 4;
  std::uint64_t seed = 20161;
  AttackSizes sizes;
  /// Element targeted by each attack kind.
  std::map<AttackKind, std::string> targets;
};

/// Options of the bundled car dealer scenario.
ScenarioOptions cardealerScenarioOptions();
/// Naming scheme the bundled scenario is evaluated with.
NamingScheme cardealerScenarioScheme();

/// Writes train/*.xml, test/normal/*.xml, test/attack/<kind>/*.xml and the
/// mutation table attacks.tsv below `dir`.
void writeScenario(const std::filesystem::path& dir, const Grammar& grammar, const ScenarioOptions& options);

/// Reads a corpus directory; files are taken in name order.
LabeledCorpus loadCorpus(const std::filesystem::path& dir);

}  // namespace xvpa::corpus
