#include "xvpa/corpus/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "xvpa/dxvpa.hpp"
#include "xvpa/random.hpp"

namespace xvpa::corpus {

namespace {

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

std::string fixed(double x, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, x);
  return buffer;
}

std::string percent(double x) { return fixed(100 * x, 2) + "%"; }

template <class T>
LearningCurve::Envelope envelope(const std::vector<std::vector<T>>& series, std::size_t step) {
  LearningCurve::Envelope e;
  if (series.empty()) return e;
  e.min = e.max = static_cast<double>(series.front().at(step));
  double sum = 0;
  for (const auto& trial : series) {
    auto x = static_cast<double>(trial.at(step));
    sum += x;
    e.min = std::min(e.min, x);
    e.max = std::max(e.max, x);
  }
  e.mean = sum / static_cast<double>(series.size());
  return e;
}

}  // namespace

double DetectionReport::precision() const { return ratio(tp, tp + fp); }
double DetectionReport::recall() const { return ratio(tp, tp + fn); }
double DetectionReport::falsePositiveRate() const { return ratio(fp, fp + tn); }

double DetectionReport::f1() const {
  double p = precision(), r = recall();
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

double DetectionReport::recall(const std::vector<std::string>& kinds) const {
  std::size_t total = 0, detected = 0;
  for (const auto& k : kinds) {
    auto it = perKind.find(k);
    if (it == perKind.end()) continue;
    total += it->second.total;
    detected += it->second.detected;
  }
  return ratio(detected, total);
}

std::string DetectionReport::table() const {
  std::string out = "metric\tTP\tFP\tTN\tFN\tPr\tRe\tFPR\tF1\n";
  out += "all\t" + std::to_string(tp) + "\t" + std::to_string(fp) + "\t" + std::to_string(tn) + "\t" +
         std::to_string(fn) + "\t" + fixed(precision()) + "\t" + fixed(recall()) + "\t" + fixed(falsePositiveRate()) +
         "\t" + fixed(f1()) + "\n";
  out += "kind\ttotal\tdetected\trecall\n";
  for (const auto& [kind, t] : perKind) {
    out += kind + "\t" + std::to_string(t.total) + "\t" + std::to_string(t.detected) + "\t" +
           fixed(ratio(t.detected, t.total)) + "\n";
  }
  return out;
}

std::string DetectionReport::summary() const {
  std::string out = "documents: " + std::to_string(tp + fp + tn + fn) + " (" + std::to_string(tp + fn) +
                    " attacks, " + std::to_string(fp + tn) + " normal)\n";
  out += "precision " + percent(precision()) + ", recall " + percent(recall()) + ", false-positive rate " +
         percent(falsePositiveRate()) + ", F1 " + percent(f1()) + "\n";
  for (const auto& [kind, t] : perKind) {
    out += "  " + kind + ": " + std::to_string(t.detected) + "/" + std::to_string(t.total) + " detected\n";
  }
  return out;
}

DetectionReport evaluate(const Cxvpa* model, const std::vector<LabeledDocument>& testing) {
  DetectionReport r;
  for (const auto& doc : testing) {
    bool rejected = model == nullptr || !model->validate(doc.stream).accepted;
    if (doc.attack) {
      auto& tally = r.perKind[doc.kind];
      ++tally.total;
      if (rejected) {
        ++r.tp;
        ++tally.detected;
      } else {
        ++r.fn;
      }
    } else if (rejected) {
      ++r.fp;
    } else {
      ++r.tn;
    }
  }
  return r;
}

std::unique_ptr<Cxvpa> trainModel(const std::vector<LabeledDocument>& training, const NamingScheme& scheme,
                                  std::shared_ptr<const LexicalDatatypeSystem> dts, PredicateCache* cache) {
  Learner learner(scheme, dts);
  for (const auto& doc : training) learner.learn(doc.stream);
  try {
    auto a = Dxvpa::generate(learner.snapshot());
    if (cache != nullptr) return std::make_unique<Cxvpa>(Cxvpa::compile(a, *cache));
    return std::make_unique<Cxvpa>(Cxvpa::compile(a, std::move(dts)));
  } catch (const EmptyLanguage&) {
    return nullptr;
  }
}

LearningCurve::Envelope LearningCurve::mindChangeAt(std::size_t step) const { return envelope(mindChanges, step); }
LearningCurve::Envelope LearningCurve::f1At(std::size_t step) const { return envelope(f1, step); }
LearningCurve::Envelope LearningCurve::fprAt(std::size_t step) const { return envelope(fpr, step); }

std::string LearningCurve::tsv() const {
  std::string out = "step\tmc_mean\tmc_min\tmc_max\tf1_mean\tf1_min\tf1_max\tfpr_mean\tfpr_min\tfpr_max\n";
  for (std::size_t s = 0; s < steps(); ++s) {
    auto mc = mindChangeAt(s), f = f1At(s), p = fprAt(s);
    out += std::to_string(s + 1);
    for (double x : {mc.mean, mc.min, mc.max, f.mean, f.min, f.max, p.mean, p.min, p.max}) out += "\t" + fixed(x);
    out += "\n";
  }
  return out;
}

LearningCurve learningCurve(const LabeledCorpus& corpus, const NamingScheme& scheme,
                            std::shared_ptr<const LexicalDatatypeSystem> dts, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("learning curve needs at least one trial");
  LearningCurve curve;
  PredicateCache cache(dts);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(deriveSeed(seed, t));
    std::vector<std::size_t> order(corpus.training.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(rng, order);
    Learner learner(scheme, dts);
    std::vector<std::uint64_t> mc;
    std::vector<double> f1, fpr;
    for (auto i : order) {
      mc.push_back(learner.learn(corpus.training[i].stream));
      std::unique_ptr<Cxvpa> model;
      try {
        model = std::make_unique<Cxvpa>(Cxvpa::compile(Dxvpa::generate(learner.snapshot()), cache));
      } catch (const EmptyLanguage&) {
      }
      auto report = evaluate(model.get(), corpus.testing);
      f1.push_back(report.f1());
      fpr.push_back(report.falsePositiveRate());
    }
    curve.mindChanges.push_back(std::move(mc));
    curve.f1.push_back(std::move(f1));
    curve.fpr.push_back(std::move(fpr));
  }
  return curve;
}

}  // namespace xvpa::corpus
