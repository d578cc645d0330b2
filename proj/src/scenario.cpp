#include "xvpa/corpus/scenario.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace xvpa::corpus {

namespace fs = std::filesystem;

namespace {

std::string numbered(std::string_view prefix, std::size_t i, int width) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%0*zu", width, i);
  return std::string(prefix) + "-" + buffer + ".xml";
}

void writeFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::vector<fs::path> xmlFiles(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

ScenarioOptions cardealerScenarioOptions() {
  ScenarioOptions o;
  o.targets = {
      {AttackKind::HighNodeCount, "ad"},         {AttackKind::CoerciveParsing, "usedcars"},
      {AttackKind::OversizedPayload, "zip"},     {AttackKind::CdataScriptInjection, "price"},
      {AttackKind::SqlInjectionText, "mileage"}, {AttackKind::StructuralWrapping, "newcars"},
  };
  return o;
}

NamingScheme cardealerScenarioScheme() { return NamingScheme{NamingMode::Ancestor, 1, 2}; }

void writeScenario(const fs::path& dir, const Grammar& grammar, const ScenarioOptions& options) {
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "test" / "normal");
  auto train = grammar.generate(options.train, deriveSeed(options.seed, 0));
  for (std::size_t i = 0; i < train.size(); ++i) writeFile(dir / "train" / numbered("train", i + 1, 3), writeXml(train[i]));
  auto normal = grammar.generate(options.normal, deriveSeed(options.seed, 1));
  for (std::size_t i = 0; i < normal.size(); ++i) {
    writeFile(dir / "test" / "normal" / numbered("normal", i + 1, 4), writeXml(normal[i]));
  }

  std::string table = "file\tkind\tclass\ttarget\tattack_seed\tbase_seed\n";
  std::uint64_t counter = 0;
  for (auto kind : allAttackKinds()) {
    auto target = options.targets.find(kind);
    if (target == options.targets.end()) continue;
    const fs::path kindDir = dir / "test" / "attack" / std::string(attackName(kind));
    fs::create_directories(kindDir);
    std::size_t written = 0;
    while (written < options.attacksPerKind) {
      if (counter > 1000 * (options.attacksPerKind + 1)) {
        throw InapplicableAttack("no base document admits " + std::string(attackName(kind)));
      }
      const std::uint64_t baseSeed = deriveSeed(options.seed, 1000 + counter);
      const std::uint64_t attackSeed = deriveSeed(options.seed, 500000 + counter);
      ++counter;
      Rng rng(baseSeed);
      auto base = grammar.generate(rng);
      DocumentEventStream attack;
      try {
        attack = injectAttack(base, AttackSpec{kind, target->second, attackSeed}, options.sizes);
      } catch (const InapplicableAttack&) {
        continue;
      }
      ++written;
      auto name = numbered(attackName(kind), written, 2);
      writeFile(kindDir / name, writeXml(attack));
      table += "test/attack/" + std::string(attackName(kind)) + "/" + name + "\t" + std::string(attackName(kind)) +
               "\t" + std::string(attackClassName(attackClass(kind))) + "\t" + target->second + "\t" +
               std::to_string(attackSeed) + "\t" + std::to_string(baseSeed) + "\n";
    }
  }
  writeFile(dir / "attacks.tsv", table);
}

LabeledCorpus loadCorpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("corpus directory " + dir.string() + " does not exist");
  LabeledCorpus corpus;
  for (const auto& path : xmlFiles(dir / "train")) {
    corpus.training.push_back({path.filename().string(), parseFile(path), false, {}});
  }
  for (const auto& path : xmlFiles(dir / "test" / "normal")) {
    corpus.testing.push_back({path.filename().string(), parseFile(path), false, {}});
  }
  const fs::path attackDir = dir / "test" / "attack";
  if (fs::is_directory(attackDir)) {
    std::vector<fs::path> kinds;
    for (const auto& entry : fs::directory_iterator(attackDir)) {
      if (entry.is_directory()) kinds.push_back(entry.path());
    }
    std::sort(kinds.begin(), kinds.end());
    for (const auto& kindDir : kinds) {
      for (const auto& path : xmlFiles(kindDir)) {
        corpus.testing.push_back({path.filename().string(), parseFile(path), true, kindDir.filename().string()});
      }
    }
  }
  return corpus;
}

}  // namespace xvpa::corpus
