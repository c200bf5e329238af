#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bebop/error.hpp"
#include "bebop/wire.hpp"

namespace bebop::schema {

enum class TokenKind : std::uint8_t {
  Identifier,
  String,
  ByteString,
  Number,
  Punct,
  /// Verbatim `[[ ... ]]` script block; lexeme excludes the brackets.
  RawBlock,
  DocComment,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  /// Identifier/punctuation text, decoded string contents, doc text, or the
  /// numeric literal as written.
  std::string lexeme;
  /// ByteString contents.
  Bytes bytes;
  /// Number: whether the literal has a fraction or exponent.
  bool is_float = false;
  Span span;

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
  bool is_punct(std::string_view text) const { return is(TokenKind::Punct, text); }
  bool is_ident(std::string_view text) const { return is(TokenKind::Identifier, text); }
};

/// Splits schema source into tokens. `//` and `/* */` comments are dropped;
/// `///` lines are kept as DocComment tokens. The final token is always End.
std::vector<Token> tokenize(std::string_view source, std::string_view file = {});

}  // namespace bebop::schema
