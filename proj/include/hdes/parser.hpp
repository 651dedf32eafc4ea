#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hdes/expr.hpp"
#include "hdes/system.hpp"

namespace hdes {

enum class TokenKind { Identifier, Number, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    double number = 0.0;
    SourceLoc loc;
};

/// Splits .hde text into tokens; `#` starts a comment running to end of line.
/// Throws ParseError on characters outside the grammar.
std::vector<Token> tokenize(std::string_view text);

/// Parses and validates a problem description. Errors carry line:column.
DESystem parse_problem(std::string_view text);

DESystem parse_problem_file(const std::string& path);

}  // namespace hdes
