#pragma once

#include <string>
#include <vector>

#include "mca/token.hpp"

namespace mca {

// Tokenizes one translation unit. Comments (// and /* */) and whitespace
// are dropped; every token carries its line/column. Throws Diag("LexError")
// on illegal characters or unterminated comments/literals.
std::vector<Token> tokenize(const std::string &source);

}  // namespace mca
