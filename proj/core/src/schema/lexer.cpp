#include "bebop/schema/lexer.hpp"

#include <cctype>

namespace bebop::schema {

namespace {

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  } else {
    out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view src, std::string_view file) : src_(src), file_(file) {}

  std::vector<Token> run() {
    check_utf8();
    std::vector<Token> out;
    for (;;) {
      skip_trivia(out);
      if (at_end()) break;
      out.push_back(next());
    }
    Token end;
    end.kind = TokenKind::End;
    end.span = span_at(pos_, 0);
    out.push_back(std::move(end));
    return out;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  Span span_at(std::size_t start, std::size_t length) const {
    // Columns count bytes from the start of the line.
    std::size_t line = line_;
    std::size_t line_start = line_start_;
    if (start < line_start_) {
      line = 1;
      line_start = 0;
      for (std::size_t i = 0; i < start; ++i) {
        if (src_[i] == '\n') {
          ++line;
          line_start = i + 1;
        }
      }
    }
    Span s;
    s.file = std::string(file_);
    s.line = static_cast<std::uint32_t>(line);
    s.column = static_cast<std::uint32_t>(start - line_start + 1);
    s.offset = static_cast<std::uint32_t>(start);
    s.length = static_cast<std::uint32_t>(length);
    return s;
  }

  [[noreturn]] void fail(ErrorCode code, const std::string& msg, std::size_t at,
                         std::size_t len = 1) const {
    throw Error(code, msg, span_at(at, len));
  }

  void check_utf8() {
    if (is_valid_utf8(src_)) return;
    // Find the first offending byte for a useful span.
    std::size_t lo = 0;
    std::size_t hi = src_.size();
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      std::size_t cut = mid;
      while (cut > 0 && (static_cast<unsigned char>(src_[cut]) & 0xc0) == 0x80) --cut;
      if (is_valid_utf8(src_.substr(0, cut))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    std::size_t bad = lo;
    while (bad > 0 && (static_cast<unsigned char>(src_[bad]) & 0xc0) == 0x80) --bad;
    Span s;
    s.file = std::string(file_);
    s.line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < bad; ++i) {
      if (src_[i] == '\n') {
        ++s.line;
        line_start = i + 1;
      }
    }
    s.column = static_cast<std::uint32_t>(bad - line_start + 1);
    s.offset = static_cast<std::uint32_t>(bad);
    s.length = 1;
    throw Error(ErrorCode::InvalidUtf8, "schema source is not valid UTF-8", s);
  }

  void skip_trivia(std::vector<Token>& out) {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        const std::size_t start = pos_;
        const bool doc = peek(2) == '/' && peek(3) != '/';
        while (!at_end() && peek() != '\n') advance();
        if (doc) {
          std::string_view text = src_.substr(start + 3, pos_ - start - 3);
          if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
          if (!text.empty() && text.front() == ' ') text.remove_prefix(1);
          Token t;
          t.kind = TokenKind::DocComment;
          t.lexeme = std::string(text);
          t.span = span_at(start, pos_ - start);
          out.push_back(std::move(t));
        }
      } else if (c == '/' && peek(1) == '*') {
        const std::size_t start = pos_;
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (at_end()) fail(ErrorCode::SyntaxError, "unterminated block comment", start, 2);
          advance();
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  Token next() {
    const std::size_t start = pos_;
    const char c = peek();
    if (c == 'b' && (peek(1) == '"' || peek(1) == '\'')) {
      advance();
      return string_literal(start, true);
    }
    if (is_ident_start(c)) {
      while (!at_end() && is_ident_char(peek())) advance();
      Token t;
      t.kind = TokenKind::Identifier;
      t.lexeme = std::string(src_.substr(start, pos_ - start));
      t.span = span_at(start, pos_ - start);
      return t;
    }
    if (is_digit(c)) return number(start);
    if (c == '"' || c == '\'') return string_literal(start, false);
    if (c == '[' && peek(1) == '[') return raw_block(start);

    static constexpr std::string_view kPunct = "{}()[];:,=.<>@#|!?-+*";
    if (kPunct.find(c) != std::string_view::npos) {
      advance();
      Token t;
      t.kind = TokenKind::Punct;
      t.lexeme = std::string(1, c);
      t.span = span_at(start, 1);
      return t;
    }
    fail(ErrorCode::SyntaxError, std::string("unexpected character '") + c + "'", start);
  }

  Token number(std::size_t start) {
    Token t;
    t.kind = TokenKind::Number;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      if (hex_value(peek()) < 0) fail(ErrorCode::InvalidLiteral, "malformed hex literal", start);
      while (!at_end() && hex_value(peek()) >= 0) advance();
    } else {
      while (!at_end() && is_digit(peek())) advance();
      if (peek() == '.' && is_digit(peek(1))) {
        t.is_float = true;
        advance();
        while (!at_end() && is_digit(peek())) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t look = 1;
        if (peek(1) == '+' || peek(1) == '-') look = 2;
        if (is_digit(peek(look))) {
          t.is_float = true;
          for (std::size_t i = 0; i < look; ++i) advance();
          while (!at_end() && is_digit(peek())) advance();
        }
      }
    }
    if (!at_end() && is_ident_char(peek())) {
      fail(ErrorCode::InvalidLiteral, "malformed numeric literal", start, pos_ - start + 1);
    }
    t.lexeme = std::string(src_.substr(start, pos_ - start));
    t.span = span_at(start, pos_ - start);
    return t;
  }

  Token raw_block(std::size_t start) {
    advance();
    advance();
    const std::size_t body = pos_;
    while (!(peek() == ']' && peek(1) == ']')) {
      if (at_end()) fail(ErrorCode::SyntaxError, "unterminated [[ block", start, 2);
      advance();
    }
    Token t;
    t.kind = TokenKind::RawBlock;
    t.lexeme = std::string(src_.substr(body, pos_ - body));
    advance();
    advance();
    t.span = span_at(start, pos_ - start);
    return t;
  }

  Token string_literal(std::size_t start, bool bytes) {
    const char quote = peek();
    advance();
    std::string text;
    for (;;) {
      if (at_end()) {
        fail(ErrorCode::UnterminatedString, "unterminated string literal", start, pos_ - start);
      }
      const char c = peek();
      if (c == quote) {
        if (peek(1) == quote) {
          text.push_back(quote);
          advance();
          advance();
          continue;
        }
        advance();
        break;
      }
      if (c != '\\') {
        text.push_back(c);
        advance();
        continue;
      }
      const std::size_t esc = pos_;
      advance();
      if (at_end()) {
        fail(ErrorCode::UnterminatedString, "unterminated string literal", start, pos_ - start);
      }
      const char e = peek();
      advance();
      switch (e) {
        case '\\': text.push_back('\\'); break;
        case 'n': text.push_back('\n'); break;
        case 'r': text.push_back('\r'); break;
        case 't': text.push_back('\t'); break;
        case '0': text.push_back('\0'); break;
        case '"': text.push_back('"'); break;
        case '\'': text.push_back('\''); break;
        case 'u': {
          if (peek() != '{') fail(ErrorCode::InvalidEscape, "expected '{' after \\u", esc, 2);
          advance();
          std::uint32_t cp = 0;
          int digits = 0;
          while (hex_value(peek()) >= 0) {
            cp = (cp << 4) | static_cast<std::uint32_t>(hex_value(peek()));
            advance();
            if (++digits > 6) break;
          }
          if (digits == 0 || digits > 6 || peek() != '}') {
            fail(ErrorCode::InvalidEscape, "\\u{...} takes 1 to 6 hex digits", esc, pos_ - esc);
          }
          advance();
          if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
            fail(ErrorCode::InvalidEscape, "\\u{...} is not a Unicode scalar value", esc,
                 pos_ - esc);
          }
          append_utf8(text, cp);
          break;
        }
        case 'x': {
          if (!bytes) {
            fail(ErrorCode::InvalidEscape, "\\x escapes are only valid in byte strings", esc, 2);
          }
          const int hi = hex_value(peek());
          const int lo = hex_value(peek(1));
          if (hi < 0 || lo < 0) fail(ErrorCode::InvalidEscape, "\\x takes two hex digits", esc, 2);
          advance();
          advance();
          text.push_back(static_cast<char>((hi << 4) | lo));
          break;
        }
        default:
          fail(ErrorCode::InvalidEscape, std::string("unknown escape '\\") + e + "'", esc, 2);
      }
    }
    Token t;
    t.span = span_at(start, pos_ - start);
    if (bytes) {
      t.kind = TokenKind::ByteString;
      t.bytes.assign(text.begin(), text.end());
    } else {
      if (!is_valid_utf8(text)) {
        fail(ErrorCode::InvalidUtf8, "string literal is not valid UTF-8", start, pos_ - start);
      }
      t.kind = TokenKind::String;
      t.lexeme = std::move(text);
    }
    return t;
  }

  std::string_view src_;
  std::string_view file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::string_view file) {
  return Lexer(source, file).run();
}

}  // namespace bebop::schema
