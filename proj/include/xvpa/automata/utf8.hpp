#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "xvpa/automata/charset.hpp"

namespace xvpa::automata {

/// Decodes UTF-8; returns nullopt on malformed input, overlong forms,
/// surrogates, or code points above U+10FFFF.
std::optional<std::u32string> decodeUtf8(std::string_view bytes);

void appendUtf8(std::string& out, CodePoint c);
std::string encodeUtf8(std::u32string_view text);

}  // namespace xvpa::automata
