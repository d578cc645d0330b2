#pragma once

#include <string>

#include "xvpa/cxvpa.hpp"
#include "xvpa/datatypes.hpp"
#include "xvpa/dxvpa.hpp"

namespace xvpa {

/// Graphviz rendering: modules as clusters, entries drawn bold, exits and
/// finals doubly circled, internal edges labelled by their datatypes.
std::string toDot(const Dxvpa& a, const LexicalDatatypeSystem& dts);
/// Same layout with one predicate edge per state.
std::string toDot(const Cxvpa& a, const LexicalDatatypeSystem& dts);

}  // namespace xvpa
