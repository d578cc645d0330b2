#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "xvpa/cxvpa.hpp"
#include "xvpa/datatypes.hpp"
#include "xvpa/event_stream.hpp"
#include "xvpa/learner.hpp"

namespace xvpa::corpus {

struct LabeledDocument {
  std::string name;
  DocumentEventStream stream;
  bool attack = false;
  std::string kind;  // attack kind, empty for normal documents
};

struct LabeledCorpus {
  std::vector<LabeledDocument> training;
  std::vector<LabeledDocument> testing;
};

/// Attacks are positives: a rejected attack is a true positive, a rejected
/// normal document a false positive.
struct DetectionReport {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  struct Tally {
    std::size_t total = 0;
    std::size_t detected = 0;
  };
  std::map<std::string, Tally> perKind;

  /// Ratios with an undefined denominator are reported as 0.
  [[nodiscard]] double precision() const;
  [[nodiscard]] double recall() const;
  [[nodiscard]] double falsePositiveRate() const;
  [[nodiscard]] double f1() const;
  /// Recall over the attack kinds of one class.
  [[nodiscard]] double recall(const std::vector<std::string>& kinds) const;

  /// Tab-separated table: one metric row, then one row per attack kind.
  [[nodiscard]] std::string table() const;
  [[nodiscard]] std::string summary() const;
};

/// Validates every test document. A null model rejects everything.
DetectionReport evaluate(const Cxvpa* model, const std::vector<LabeledDocument>& testing);

/// Learns all training documents in order, then builds and compiles the
/// automaton. Returns nullptr when the learned language is empty.
std::unique_ptr<Cxvpa> trainModel(const std::vector<LabeledDocument>& training, const NamingScheme& scheme,
                                  std::shared_ptr<const LexicalDatatypeSystem> dts, PredicateCache* cache = nullptr);

struct LearningCurve {
  /// [trial][step]
  std::vector<std::vector<std::uint64_t>> mindChanges;
  std::vector<std::vector<double>> f1;
  std::vector<std::vector<double>> fpr;

  struct Envelope {
    double mean = 0, min = 0, max = 0;
  };
  [[nodiscard]] std::size_t steps() const { return mindChanges.empty() ? 0 : mindChanges.front().size(); }
  [[nodiscard]] Envelope mindChangeAt(std::size_t step) const;
  [[nodiscard]] Envelope f1At(std::size_t step) const;
  [[nodiscard]] Envelope fprAt(std::size_t step) const;
  /// Tab-separated series: step, then mean/min/max of MC, F1 and FPR.
  [[nodiscard]] std::string tsv() const;
};

/// Each trial learns the training documents in a random order, one per step,
/// evaluating on the test set after every step. Trial seeds derive from
/// `seed`.
LearningCurve learningCurve(const LabeledCorpus& corpus, const NamingScheme& scheme,
                            std::shared_ptr<const LexicalDatatypeSystem> dts, std::size_t trials, std::uint64_t seed);

}  // namespace xvpa::corpus
