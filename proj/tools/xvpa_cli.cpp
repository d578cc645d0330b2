#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "xvpa/corpus/evaluation.hpp"
#include "xvpa/corpus/scenario.hpp"
#include "xvpa/cxvpa.hpp"
#include "xvpa/datatypes.hpp"
#include "xvpa/dot.hpp"
#include "xvpa/dxvpa.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/learner.hpp"
#include "xvpa/persistence.hpp"

namespace fs = std::filesystem;
using namespace xvpa;

namespace {

enum Exit : int {
  kOk = 0,
  kReject = 1,
  kParseError = 2,
  kStateError = 3,
  kUsage = 4,
  kPrecondition = 5,
  kInternal = 6,
};

/// Error carrying its exit code.
struct Failure : std::runtime_error {
  Failure(int code, const std::string& what) : std::runtime_error(what), code(code) {}
  int code;
};

struct Options {
  std::optional<std::string> datatypes;
  std::string state;
  std::vector<std::string> files;
  std::optional<std::string> init;
  std::optional<std::string> output;
  bool cxvpa = false;
  std::string corpus;
  std::optional<std::string> report;
  std::optional<std::string> curve;
  std::size_t trials = 15;
  std::uint64_t seed = 1;
  std::string scheme = "ancestor k=1 l=2";
  std::size_t count = 50;
  std::string grammar = "cardealer";
};

std::shared_ptr<const LexicalDatatypeSystem> loadDatatypes(const Options& o) {
  try {
    std::optional<fs::path> path;
    if (o.datatypes) path = *o.datatypes;
    return LexicalDatatypeSystem::load(path);
  } catch (const std::exception& e) {
    throw Failure(kStateError, std::string("datatype system: ") + e.what());
  }
}

NamingScheme parseScheme(const std::string& text) {
  try {
    return NamingScheme::parse(text);
  } catch (const std::invalid_argument& e) {
    throw Failure(kUsage, e.what());
  }
}

Learner openState(const Options& o, std::shared_ptr<const LexicalDatatypeSystem> dts, bool mutating) {
  Learner learner = [&] {
    try {
      return loadState(o.state, std::move(dts));
    } catch (const StateFileError& e) {
      throw Failure(kStateError, e.what());
    } catch (const std::runtime_error& e) {
      throw Failure(kStateError, e.what());
    }
  }();
  if (mutating && !learner.hashMatches()) {
    throw Failure(kStateError, "state " + o.state + " was built with a different datatype system");
  }
  return learner;
}

void save(const Options& o, const Learner& learner) {
  try {
    saveState(o.state, learner);
  } catch (const std::exception& e) {
    throw Failure(kStateError, e.what());
  }
}

std::optional<DocumentEventStream> readDocument(const std::string& path) {
  try {
    return parseFile(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return std::nullopt;
  }
}

int cmdLearn(const Options& o) {
  auto dts = loadDatatypes(o);
  StateLock lock(o.state);
  std::optional<Learner> learner;
  if (fs::exists(o.state)) {
    learner.emplace(openState(o, dts, true));
    if (o.init && !(parseScheme(*o.init) == learner->scheme())) {
      throw Failure(kStateError, "state " + o.state + " uses scheme " + learner->scheme().render());
    }
  } else if (o.init) {
    learner.emplace(parseScheme(*o.init), dts);
  } else {
    throw Failure(kStateError, "state " + o.state + " does not exist; pass --init \"mode=ancestor k=1 l=2\"");
  }
  if (o.files.empty() && !o.init) throw Failure(kUsage, "learn: no documents given");
  int code = kOk;
  for (const auto& path : o.files) {
    auto doc = readDocument(path);
    if (!doc) {
      std::cout << path << "\tSKIPPED\tparse-error\n";
      code = kParseError;
      continue;
    }
    auto mc = learner->learn(*doc);
    std::cout << path << "\tMC=" << mc << "\n";
  }
  save(o, *learner);
  return code;
}

int cmdValidate(const Options& o) {
  auto dts = loadDatatypes(o);
  Learner learner = openState(o, dts, false);
  std::unique_ptr<Cxvpa> model;
  try {
    model = std::make_unique<Cxvpa>(Cxvpa::compile(Dxvpa::generate(learner.snapshot()), dts));
  } catch (const EmptyLanguage&) {
  }
  int code = kOk;
  for (const auto& path : o.files) {
    auto doc = readDocument(path);
    if (!doc) {
      std::cout << path << "\tREJECT\tparse-error\t-\n";
      code = kParseError;
      continue;
    }
    if (!model) {
      std::cout << path << "\tREJECT\t" << reasonName(RejectReason::EmptyLanguage) << "\t0\n";
      if (code == kOk) code = kReject;
      continue;
    }
    auto v = model->validate(*doc);
    if (v.accepted) {
      std::cout << path << "\tACCEPT\t-\t-\n";
    } else {
      std::cout << path << "\tREJECT\t" << reasonName(v.reason) << "\t" << v.eventIndex << "\n";
      if (code == kOk) code = kReject;
    }
  }
  return code;
}

int cmdUnlearn(const Options& o) {
  auto dts = loadDatatypes(o);
  StateLock lock(o.state);
  Learner learner = openState(o, dts, true);
  for (const auto& path : o.files) {
    auto doc = readDocument(path);
    if (!doc) throw Failure(kParseError, path + ": not unlearned, state unchanged");
    try {
      learner.unlearn(*doc);
    } catch (const LearnerError& e) {
      throw Failure(kPrecondition, path + ": " + e.what() + "; state unchanged");
    }
    std::cout << path << "\tunlearned\n";
  }
  save(o, learner);
  return kOk;
}

int cmdSanitize(const Options& o) {
  auto dts = loadDatatypes(o);
  StateLock lock(o.state);
  Learner learner = openState(o, dts, true);
  if (learner.sanitize() == SanitizeOutcome::NotApplicable) {
    std::cout << "not-applicable\n";
    return kOk;
  }
  save(o, learner);
  std::cout << "applied\n";
  return kOk;
}

int cmdStats(const Options& o) {
  auto dts = loadDatatypes(o);
  Learner learner = openState(o, dts, false);
  auto raw = learner.vpa().stats();
  auto snap = learner.snapshot().stats();
  std::cout << "scheme\t" << learner.scheme().render() << "\n";
  std::cout << "datatypes\t" << learner.dtsHash() << (learner.hashMatches() ? "" : " (mismatch)") << "\n";
  std::cout << "documents\t" << learner.documentsLearned() << "\n";
  std::cout << "sanitized\t" << (learner.sanitized() ? "yes" : "no") << "\n";
  std::cout << "states\t" << snap.states << "\n";
  std::cout << "transitions\t" << snap.transitions << "\n";
  std::cout << "finals\t" << snap.finals << "\n";
  std::cout << "stored-transitions\t" << raw.transitions << "\n";
  std::cout << "total-weight\t" << raw.totalWeight << "\n";
  try {
    auto a = Dxvpa::generate(learner.snapshot());
    std::cout << "modules\t" << a.modules().size() << "\n";
  } catch (const EmptyLanguage&) {
    std::cout << "modules\t0 (empty-language)\n";
  }
  std::cout << "mind-changes\t";
  auto series = learner.mindChangeSeries();
  for (std::size_t i = 0; i < series.size(); ++i) std::cout << (i ? " " : "") << series[i];
  std::cout << "\n";
  return kOk;
}

int cmdExportDot(const Options& o) {
  auto dts = loadDatatypes(o);
  Learner learner = openState(o, dts, false);
  Dxvpa a;
  try {
    a = Dxvpa::generate(learner.snapshot());
  } catch (const EmptyLanguage&) {
    throw Failure(kReject, "the learned language is empty");
  }
  std::string dot = o.cxvpa ? toDot(Cxvpa::compile(a, dts), *dts) : toDot(a, *dts);
  if (o.output) {
    std::ofstream out(*o.output, std::ios::binary | std::ios::trunc);
    out << dot;
    if (!out) throw Failure(kStateError, "cannot write " + *o.output);
  } else {
    std::cout << dot;
  }
  return kOk;
}

int cmdEval(const Options& o) {
  auto dts = loadDatatypes(o);
  auto scheme = parseScheme(o.scheme);
  corpus::LabeledCorpus data;
  try {
    data = corpus::loadCorpus(o.corpus);
  } catch (const std::exception& e) {
    throw Failure(kParseError, e.what());
  }
  auto model = corpus::trainModel(data.training, scheme, dts);
  auto report = corpus::evaluate(model.get(), data.testing);
  std::cout << "scheme " << scheme.render() << ", " << data.training.size() << " training documents\n";
  std::cout << report.summary();
  auto reportPath = o.report ? fs::path(*o.report) : fs::path(o.corpus) / "report.tsv";
  {
    std::ofstream out(reportPath, std::ios::binary | std::ios::trunc);
    out << report.table();
    if (!out) throw Failure(kStateError, "cannot write " + reportPath.string());
  }
  std::cout << "report written to " << reportPath.string() << "\n";
  if (o.curve) {
    auto curve = corpus::learningCurve(data, scheme, dts, o.trials, o.seed);
    std::ofstream out(*o.curve, std::ios::binary | std::ios::trunc);
    out << curve.tsv();
    if (!out) throw Failure(kStateError, "cannot write " + *o.curve);
    std::cout << "learning curve written to " << *o.curve << "\n";
  }
  return kOk;
}

int cmdEvents(const Options& o) {
  int code = kOk;
  for (const auto& path : o.files) {
    auto doc = readDocument(path);
    if (!doc) {
      code = kParseError;
      continue;
    }
    std::cout << toDebugText(*doc);
  }
  return code;
}

int cmdScenario(const Options& o) {
  auto dts = loadDatatypes(o);
  auto options = corpus::cardealerScenarioOptions();
  if (o.seed != 1) options.seed = o.seed;
  corpus::writeScenario(o.corpus, corpus::cardealerScenarioGrammar(dts), options);
  std::cout << "scenario written to " << o.corpus << "\n";
  return kOk;
}

int cmdGenerate(const Options& o) {
  auto dts = loadDatatypes(o);
  std::optional<corpus::Grammar> grammar;
  if (o.grammar == "cardealer") {
    grammar.emplace(corpus::cardealerGrammar(dts));
  } else if (o.grammar == "cardealer-scenario") {
    grammar.emplace(corpus::cardealerScenarioGrammar(dts));
  } else {
    throw Failure(kUsage, "unknown grammar " + o.grammar + " (cardealer, cardealer-scenario)");
  }
  fs::create_directories(o.corpus);
  auto docs = grammar->generate(o.count, o.seed);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "doc-%04zu.xml", i + 1);
    std::ofstream out(fs::path(o.corpus) / name, std::ios::binary | std::ios::trunc);
    out << writeXml(docs[i]);
    if (!out) throw Failure(kStateError, "cannot write " + (fs::path(o.corpus) / name).string());
  }
  std::cout << docs.size() << " documents written to " << o.corpus << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn datatyped XML visibly pushdown automata from example documents and validate against them."};
  app.require_subcommand(1);
  Options o;
  app.add_option("--datatypes", o.datatypes, "Datatype definition file (default: $XVPA_DATATYPES, then builtin)");

  auto* learn = app.add_subcommand("learn", "Learn documents into a state file");
  learn->add_option("state", o.state, "State file")->required();
  learn->add_option("files", o.files, "XML documents");
  learn->add_option("--init", o.init, "Create the state: \"mode=ancestor|ancestor-sibling k=<int> l=<int>\"");

  auto* validate = app.add_subcommand("validate", "Validate documents against the learned automaton");
  validate->add_option("state", o.state, "State file")->required();
  validate->add_option("files", o.files, "XML documents")->required();

  auto* unlearn = app.add_subcommand("unlearn", "Remove previously learned documents");
  unlearn->add_option("state", o.state, "State file")->required();
  unlearn->add_option("files", o.files, "XML documents")->required();

  auto* sanitize = app.add_subcommand("sanitize", "Trim low-frequency states and transitions");
  sanitize->add_option("state", o.state, "State file")->required();

  auto* stats = app.add_subcommand("stats", "Print state statistics");
  stats->add_option("state", o.state, "State file")->required();

  auto* dot = app.add_subcommand("export-dot", "Write the generated automaton in Graphviz format");
  dot->add_option("state", o.state, "State file")->required();
  dot->add_flag("--cxvpa", o.cxvpa, "Draw predicate transitions");
  dot->add_option("-o,--output", o.output, "Output file (default: stdout)");

  auto* eval = app.add_subcommand("eval", "Train on a corpus directory and report detection metrics");
  eval->add_option("corpus", o.corpus, "Directory with train/, test/normal/, test/attack/<kind>/")->required();
  eval->add_option("--scheme", o.scheme, "Naming scheme")->capture_default_str();
  eval->add_option("--report", o.report, "Report file (default: <corpus>/report.tsv)");
  eval->add_option("--curve", o.curve, "Also write a learning curve to this file");
  eval->add_option("--trials", o.trials, "Learning-curve trials")->capture_default_str()->check(CLI::PositiveNumber);
  eval->add_option("--seed", o.seed, "Master seed of the learning curve")->capture_default_str();

  auto* events = app.add_subcommand("events", "Print the event stream of documents");
  events->add_option("files", o.files, "XML documents")->required();

  auto* scenario = app.add_subcommand("scenario", "Generate the bundled car dealer scenario");
  scenario->add_option("dir", o.corpus, "Output directory")->required();
  scenario->add_option("--seed", o.seed, "Master seed (default: the bundled one)");

  auto* generate = app.add_subcommand("generate", "Write documents drawn from a bundled grammar");
  generate->add_option("dir", o.corpus, "Output directory")->required();
  generate->add_option("--grammar", o.grammar, "cardealer or cardealer-scenario")->capture_default_str();
  generate->add_option("-n,--count", o.count, "Number of documents")->capture_default_str()->check(CLI::PositiveNumber);
  generate->add_option("--seed", o.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*learn) return cmdLearn(o);
    if (*validate) return cmdValidate(o);
    if (*unlearn) return cmdUnlearn(o);
    if (*sanitize) return cmdSanitize(o);
    if (*stats) return cmdStats(o);
    if (*dot) return cmdExportDot(o);
    if (*eval) return cmdEval(o);
    if (*events) return cmdEvents(o);
    if (*scenario) return cmdScenario(o);
    if (*generate) return cmdGenerate(o);
  } catch (const Failure& e) {
    std::cerr << "xvpa: " << e.what() << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "xvpa: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
