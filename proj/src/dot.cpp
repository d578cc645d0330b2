#include "xvpa/dot.hpp"

#include <algorithm>

namespace xvpa {

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string render(const Dxvpa& a, const LexicalDatatypeSystem& dts, bool predicates) {
  std::string out = predicates ? "digraph cxvpa {\n" : "digraph dxvpa {\n";
  out += "  rankdir=LR;\n  node [shape=circle, fontsize=10];\n";
  auto node = [&](StateId q) { return "q" + std::to_string(q); };
  auto declare = [&](StateId q, std::string_view indent) {
    bool exit = false;
    bool entry = false;
    if (ModuleId m = a.moduleOf(q); m != kOuterModule) {
      const auto& mod = a.module(m);
      exit = std::binary_search(mod.exits.begin(), mod.exits.end(), q);
      entry = mod.entry == q;
    }
    std::string attrs = "label=" + quote(a.name(q).render());
    if (exit || a.isFinal(q)) attrs += ", shape=doublecircle";
    if (entry || q == a.start()) attrs += ", style=bold";
    out += std::string(indent) + node(q) + " [" + attrs + "];\n";
  };
  for (StateId q = 0; q < a.stateCount(); ++q) {
    if (a.moduleOf(q) == kOuterModule) declare(q, "  ");
  }
  for (ModuleId m = 0; m < a.modules().size(); ++m) {
    const auto& mod = a.module(m);
    out += "  subgraph cluster_" + std::to_string(m) + " {\n";
    out += "    label=" + quote(a.moduleName(m) + " : " + mod.element) + ";\n";
    for (StateId q : mod.states) declare(q, "    ");
    out += "  }\n";
  }
  for (const auto& [key, target] : a.calls()) {
    out += "  " + node(key.first) + " -> " + node(target) + " [label=" + quote(key.second + "/" + node(key.first)) +
           ", style=dashed];\n";
  }
  for (const auto& [q, choice] : a.internals()) {
    std::string label = dts.format(choice.types);
    std::replace(label.begin(), label.end(), ' ', ',');
    if (predicates) label = "ψ{" + label + "}";
    out += "  " + node(q) + " -> " + node(choice.target) + " [label=" + quote(label) + "];\n";
  }
  for (const auto& [key, target] : a.returns()) {
    const auto& [source, element, popped] = key;
    out += "  " + node(source) + " -> " + node(target) + " [label=" + quote("/" + element + "/" + node(popped)) +
           ", style=dotted];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace

std::string toDot(const Dxvpa& a, const LexicalDatatypeSystem& dts) { return render(a, dts, false); }

std::string toDot(const Cxvpa& a, const LexicalDatatypeSystem& dts) { return render(a.structure(), dts, true); }

}  // namespace xvpa
