#include "bebop/schema/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "bebop/schema/literals.hpp"

namespace bebop::schema {

std::optional<PrimitiveKind> primitive_from_name(std::string_view name) noexcept {
  static const std::map<std::string_view, PrimitiveKind> kNames = {
      {"bool", PrimitiveKind::Bool},         {"byte", PrimitiveKind::Byte},
      {"uint8", PrimitiveKind::Byte},        {"int8", PrimitiveKind::Int8},
      {"int16", PrimitiveKind::Int16},       {"uint16", PrimitiveKind::UInt16},
      {"int32", PrimitiveKind::Int32},       {"uint32", PrimitiveKind::UInt32},
      {"int64", PrimitiveKind::Int64},       {"uint64", PrimitiveKind::UInt64},
      {"int128", PrimitiveKind::Int128},     {"uint128", PrimitiveKind::UInt128},
      {"float16", PrimitiveKind::Float16},   {"half", PrimitiveKind::Float16},
      {"bfloat16", PrimitiveKind::BFloat16}, {"bf16", PrimitiveKind::BFloat16},
      {"float32", PrimitiveKind::Float32},   {"float64", PrimitiveKind::Float64},
      {"uuid", PrimitiveKind::Uuid},         {"guid", PrimitiveKind::Uuid},
      {"timestamp", PrimitiveKind::Timestamp}, {"duration", PrimitiveKind::Duration},
  };
  auto it = kNames.find(name);
  if (it == kNames.end()) return std::nullopt;
  return it->second;
}

namespace {

bool valid_map_key(const TypeExpr& t) {
  if (t.kind == TypeExpr::Kind::String) return true;
  if (t.kind != TypeExpr::Kind::Primitive) return false;
  return is_integer(t.primitive) || t.primitive == PrimitiveKind::Bool ||
         t.primitive == PrimitiveKind::Uuid;
}

bool is_nested_keyword(const Token& t) {
  return t.kind == TokenKind::Identifier &&
         (t.lexeme == "enum" || t.lexeme == "struct" || t.lexeme == "message" ||
          t.lexeme == "union" || t.lexeme == "local" || t.lexeme == "export" ||
          t.lexeme == "mut");
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, std::string_view file, std::vector<Diagnostic>* warnings)
      : toks_(tokens), file_(file), warnings_(warnings) {}

  SchemaAst run() {
    SchemaAst ast;
    ast.file = std::string(file_);
    enum class Section { Header, Imports, Definitions } section = Section::Header;
    for (;;) {
      std::string doc = take_docs();
      const Token& t = peek();
      if (t.kind == TokenKind::End) break;
      if (t.is_ident("edition") && peek(1).is_punct("=")) {
        if (section != Section::Header) fail(t, "edition must appear before imports and definitions");
        if (ast.edition) fail(t, "duplicate edition declaration");
        advance();
        advance();
        ast.edition = expect(TokenKind::String, "edition string").lexeme;
        if (*ast.edition != kCurrentEdition && warnings_) {
          warnings_->push_back({Diagnostic::Severity::Warning,
                                "unknown edition \"" + *ast.edition + "\"; treating as " +
                                    std::string(kCurrentEdition),
                                t.span});
        }
        optional_semicolon();
        continue;
      }
      if (t.is_ident("package") && peek(1).kind == TokenKind::Identifier) {
        if (section != Section::Header) fail(t, "package must appear before imports and definitions");
        if (ast.package) fail(t, "duplicate package declaration");
        advance();
        ast.package = dotted_name();
        optional_semicolon();
        continue;
      }
      if (t.is_ident("import") && peek(1).kind == TokenKind::String) {
        if (section == Section::Definitions) fail(t, "imports must appear before definitions");
        section = Section::Imports;
        advance();
        Import imp;
        imp.span = peek().span;
        imp.path = advance().lexeme;
        optional_semicolon();
        ast.imports.push_back(std::move(imp));
        continue;
      }
      section = Section::Definitions;
      ast.definitions.push_back(definition(std::move(doc), /*nested=*/false));
    }
    return ast;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, const std::string& msg,
                         ErrorCode code = ErrorCode::SyntaxError) const {
    throw Error(code, msg, at.span);
  }
  [[noreturn]] void fail(const Span& at, const std::string& msg, ErrorCode code) const {
    throw Error(code, msg, at);
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::End: return "end of file";
      case TokenKind::String: return "string literal";
      case TokenKind::ByteString: return "byte string literal";
      case TokenKind::RawBlock: return "[[ block";
      case TokenKind::DocComment: return "doc comment";
      default: return "'" + t.lexeme + "'";
    }
  }

  const Token& expect_punct(std::string_view p) {
    skip_stray_docs();
    if (!peek().is_punct(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
    return advance();
  }
  const Token& expect(TokenKind kind, std::string_view what) {
    skip_stray_docs();
    if (peek().kind != kind) fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    return advance();
  }
  const Token& expect_ident(std::string_view what = "identifier") {
    return expect(TokenKind::Identifier, what);
  }
  bool accept_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  void optional_semicolon() { accept_punct(";"); }

  // Doc comments not followed by something documentable are dropped.
  void skip_stray_docs() {
    while (peek().kind == TokenKind::DocComment) advance();
  }

  std::string take_docs() {
    std::string doc;
    while (peek().kind == TokenKind::DocComment) {
      if (!doc.empty()) doc += '\n';
      doc += advance().lexeme;
    }
    return doc;
  }

  std::string dotted_name() {
    std::string name = expect_ident().lexeme;
    while (peek().is_punct(".") && peek(1).kind == TokenKind::Identifier) {
      advance();
      name += '.';
      name += advance().lexeme;
    }
    return name;
  }

  std::uint64_t integer_token(const Token& t) {
    if (t.kind != TokenKind::Number || t.is_float) fail(t, "expected an integer, found " + describe(t));
    auto v = parse_integer_magnitude(t.lexeme);
    if (!v) fail(t, "integer literal out of range", ErrorCode::InvalidLiteral);
    return *v;
  }

  // ---- literals ----

  Literal literal() {
    skip_stray_docs();
    bool negative = false;
    const Token& first = peek();
    if (first.is_punct("-")) {
      negative = true;
      advance();
    }
    const Token& t = advance();
    switch (t.kind) {
      case TokenKind::Number: {
        if (t.is_float) {
          const double d = std::strtod(t.lexeme.c_str(), nullptr);
          return Literal{negative ? -d : d};
        }
        const std::uint64_t mag = integer_token(t);
        if (!negative) return Literal{mag};
        if (mag > (std::uint64_t{1} << 63)) fail(first, "integer literal out of range", ErrorCode::InvalidLiteral);
        return Literal{static_cast<std::int64_t>(~mag + 1)};
      }
      case TokenKind::Identifier:
        if (t.lexeme == "inf") {
          return Literal{negative ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::infinity()};
        }
        if (t.lexeme == "nan") {
          const double nan = std::numeric_limits<double>::quiet_NaN();
          return Literal{negative ? -nan : nan};
        }
        if (!negative && t.lexeme == "true") return Literal{true};
        if (!negative && t.lexeme == "false") return Literal{false};
        break;
      case TokenKind::String:
        if (!negative) return Literal{t.lexeme};
        break;
      case TokenKind::ByteString:
        if (!negative) return Literal{t.bytes};
        break;
      default: break;
    }
    fail(t, "expected a literal, found " + describe(t), ErrorCode::InvalidLiteral);
  }

  // ---- types ----

  TypeExpr type_expr() {
    skip_stray_docs();
    const Token& start = peek();
    TypeExpr t;
    if (start.is_ident("map") && peek(1).is_punct("[")) {
      advance();
      advance();
      TypeExpr key = type_expr();
      expect_punct(",");
      TypeExpr value = type_expr();
      expect_punct("]");
      if (!valid_map_key(key)) {
        fail(key.span, "map keys must be an integer, bool, string, or uuid", ErrorCode::InvalidMapKeyType);
      }
      t = TypeExpr::make_map(std::move(key), std::move(value));
    } else if (start.is_ident("string")) {
      advance();
      t = TypeExpr::make_string();
    } else if (start.kind == TokenKind::Identifier) {
      if (auto prim = primitive_from_name(start.lexeme)) {
        advance();
        t = TypeExpr::make_primitive(*prim);
      } else {
        t = TypeExpr::make_named(dotted_name());
      }
    } else {
      fail(start, "expected a type, found " + describe(start));
    }
    t.span = start.span;
    while (peek().is_punct("[")) {
      advance();
      if (accept_punct("]")) {
        t = TypeExpr::make_array(std::move(t));
      } else {
        const Token& n = peek();
        const std::uint64_t len = integer_token(advance());
        expect_punct("]");
        if (len > 65535) {
          fail(n, "fixed array length " + std::to_string(len) + " exceeds 65535",
               ErrorCode::FixedArrayTooLarge);
        }
        t = TypeExpr::make_fixed_array(std::move(t), static_cast<std::uint32_t>(len));
      }
      t.span = start.span;
    }
    return t;
  }

  // ---- decorators ----

  std::vector<DecoratorUse> decorator_uses() {
    std::vector<DecoratorUse> out;
    while (peek().is_punct("@")) {
      const Token& at = advance();
      DecoratorUse use;
      use.span = at.span;
      use.name = dotted_name();
      if (accept_punct("(")) {
        if (!peek().is_punct(")")) {
          for (;;) {
            DecoratorArg arg;
            arg.span = peek().span;
            if (peek().kind == TokenKind::Identifier && peek(1).is_punct(":")) {
              arg.name = advance().lexeme;
              advance();
            }
            arg.value = literal();
            use.args.push_back(std::move(arg));
            if (!accept_punct(",")) break;
          }
        }
        expect_punct(")");
      }
      out.push_back(std::move(use));
    }
    return out;
  }

  // ---- definitions ----

  Definition definition(std::string doc, bool nested) {
    std::vector<DecoratorUse> decos = decorator_uses();
    {
      std::string more = take_docs();
      if (!more.empty()) doc = doc.empty() ? more : doc + "\n" + more;
    }
    Definition def;
    def.doc = std::move(doc);
    def.decorators = std::move(decos);
    def.visibility = nested ? Visibility::Local : Visibility::Exported;

    if (peek().is_punct("#")) {
      if (nested) fail(peek(), "decorator declarations must be top-level");
      if (!def.decorators.empty()) fail(peek(), "decorators cannot be applied to a decorator declaration");
      decorator_decl(def);
      return def;
    }

    if (peek().is_ident("local") || peek().is_ident("export")) {
      def.visibility = advance().lexeme == "local" ? Visibility::Local : Visibility::Exported;
    }
    bool is_mut = false;
    if (peek().is_ident("mut")) {
      advance();
      is_mut = true;
      if (!peek().is_ident("struct")) fail(peek(), "'mut' applies only to structs");
    }
    const Token& kw = peek();
    if (kw.kind != TokenKind::Identifier) fail(kw, "expected a definition, found " + describe(kw));
    if (kw.lexeme == "enum") {
      advance();
      enum_def(def);
    } else if (kw.lexeme == "struct") {
      advance();
      struct_def(def, is_mut);
    } else if (kw.lexeme == "message") {
      advance();
      message_def(def);
    } else if (kw.lexeme == "union") {
      advance();
      union_def(def);
    } else if (kw.lexeme == "service" && !nested) {
      advance();
      service_def(def);
    } else if (kw.lexeme == "const" && !nested) {
      advance();
      const_def(def);
    } else {
      fail(kw, "expected a definition, found " + describe(kw));
    }
    return def;
  }

  void name_into(Definition& def) {
    const Token& name = expect_ident("definition name");
    def.name = name.lexeme;
    def.span = name.span;
  }

  void enum_def(Definition& def) {
    def.kind = DefinitionKind::Enum;
    name_into(def);
    EnumBody body;
    if (accept_punct(":")) {
      const Token& base = expect_ident("enum base type");
      auto prim = primitive_from_name(base.lexeme);
      if (!prim || !is_integer(*prim)) fail(base, "enum base type must be an integer type", ErrorCode::InvalidTypeUse);
      body.base = *prim;
    }
    expect_punct("{");
    std::set<std::string> names;
    bool has_zero = false;
    for (;;) {
      std::string doc = take_docs();
      if (accept_punct("}")) break;
      EnumMember m;
      m.doc = std::move(doc);
      m.decorators = decorator_uses();
      const Token& name = expect_ident("enum member name");
      m.name = name.lexeme;
      m.span = name.span;
      if (!names.insert(m.name).second) {
        fail(name, "duplicate enum member '" + m.name + "'", ErrorCode::DuplicateDefinition);
      }
      expect_punct("=");
      bool negative = accept_punct("-");
      const Token& num = peek();
      const std::uint64_t mag = integer_token(advance());
      if (!integer_fits(body.base, negative, mag)) {
        fail(num,
             "value " + std::string(negative ? "-" : "") + std::to_string(mag) + " does not fit enum base type " +
                 std::string(primitive_name(body.base)),
             ErrorCode::InvalidLiteral);
      }
      m.value = negative ? ~mag + 1 : mag;
      if (m.value == 0) has_zero = true;
      expect_punct(";");
      body.members.push_back(std::move(m));
    }
    if (!has_zero) {
      fail(def.span, "enum '" + def.name + "' must have a member with value 0", ErrorCode::MissingZeroEnumMember);
    }
    def.body = std::move(body);
  }

  bool at_nested_definition() {
    // A keyword followed by ':' or '(' names a field.
    std::size_t i = 0;
    while (peek(i).kind == TokenKind::DocComment) ++i;
    if (peek(i).is_punct("@")) return peek_past_decorators(i);
    return is_nested_keyword(peek(i)) && !peek(i + 1).is_punct(":") && !peek(i + 1).is_punct("(");
  }

  bool peek_past_decorators(std::size_t i) {
    // Skip `@name(...)` groups to see what they decorate.
    while (peek(i).is_punct("@")) {
      ++i;
      while (peek(i).kind == TokenKind::Identifier || peek(i).is_punct(".")) ++i;
      if (peek(i).is_punct("(")) {
        int depth = 0;
        do {
          if (peek(i).is_punct("(")) ++depth;
          if (peek(i).is_punct(")")) --depth;
          if (peek(i).kind == TokenKind::End) return false;
          ++i;
        } while (depth > 0);
      }
      while (peek(i).kind == TokenKind::DocComment) ++i;
    }
    return is_nested_keyword(peek(i)) && !peek(i + 1).is_punct(":") && !peek(i + 1).is_punct("(");
  }

  void check_nested_name(const Definition& def, std::set<std::string>& names, const Span& span) {
    if (!names.insert(def.name).second) {
      fail(span, "duplicate name '" + def.name + "'", ErrorCode::DuplicateDefinition);
    }
  }

  // Fields shared by structs and messages; `tagged` selects message syntax.
  std::vector<Field> fields_until_brace(Definition& owner, bool tagged, std::set<std::string>& names) {
    std::vector<Field> fields;
    std::set<std::uint32_t> tags;
    for (;;) {
      if (at_nested_definition()) {
        std::string doc = take_docs();
        Definition nested = definition(std::move(doc), true);
        check_nested_name(nested, names, nested.span);
        owner.nested.push_back(std::move(nested));
        continue;
      }
      std::string doc = take_docs();
      if (accept_punct("}")) break;
      Field f;
      f.doc = std::move(doc);
      f.decorators = decorator_uses();
      const Token& name = expect_ident("field name");
      f.name = name.lexeme;
      f.span = name.span;
      if (!names.insert(f.name).second) {
        fail(name, "duplicate field '" + f.name + "'", ErrorCode::DuplicateDefinition);
      }
      if (tagged) {
        expect_punct("(");
        const Token& tag_tok = peek();
        const std::uint64_t tag = integer_token(advance());
        expect_punct(")");
        if (tag < 1 || tag > 255) {
          fail(tag_tok, "message tag " + std::to_string(tag) + " is outside 1-255", ErrorCode::TagOutOfRange);
        }
        if (!tags.insert(static_cast<std::uint32_t>(tag)).second) {
          fail(tag_tok, "duplicate message tag " + std::to_string(tag), ErrorCode::DuplicateTag);
        }
        f.tag = static_cast<std::uint32_t>(tag);
      } else if (peek().is_punct("(")) {
        fail(peek(), "struct fields do not take tags");
      }
      expect_punct(":");
      f.type = type_expr();
      expect_punct(";");
      fields.push_back(std::move(f));
    }
    return fields;
  }

  void struct_def(Definition& def, bool is_mut) {
    def.kind = DefinitionKind::Struct;
    name_into(def);
    expect_punct("{");
    std::set<std::string> names;
    StructBody body;
    body.is_mutable = is_mut;
    body.fields = fields_until_brace(def, false, names);
    def.body = std::move(body);
  }

  void message_def(Definition& def) {
    def.kind = DefinitionKind::Message;
    name_into(def);
    expect_punct("{");
    std::set<std::string> names;
    MessageBody body;
    body.fields = fields_until_brace(def, true, names);
    def.body = std::move(body);
  }

  void union_def(Definition& def) {
    def.kind = DefinitionKind::Union;
    name_into(def);
    expect_punct("{");
    UnionBody body;
    std::set<std::string> names;
    std::set<std::uint32_t> discs;
    for (;;) {
      if (at_nested_definition()) {
        std::string doc = take_docs();
        Definition nested = definition(std::move(doc), true);
        check_nested_name(nested, names, nested.span);
        def.nested.push_back(std::move(nested));
        continue;
      }
      std::string doc = take_docs();
      if (accept_punct("}")) break;
      UnionBranch b;
      b.doc = std::move(doc);
      b.decorators = decorator_uses();
      const Token& name = expect_ident("union branch name");
      b.name = name.lexeme;
      b.span = name.span;
      expect_punct("(");
      const Token& disc_tok = peek();
      const std::uint64_t disc = integer_token(advance());
      expect_punct(")");
      if (disc > 255) {
        fail(disc_tok, "union discriminator " + std::to_string(disc) + " is outside 0-255",
             ErrorCode::TagOutOfRange);
      }
      if (!discs.insert(static_cast<std::uint32_t>(disc)).second) {
        fail(disc_tok, "duplicate union discriminator " + std::to_string(disc), ErrorCode::DuplicateDiscriminator);
      }
      b.discriminator = static_cast<std::uint32_t>(disc);
      expect_punct(":");
      skip_stray_docs();
      const bool explicit_struct = peek().is_ident("struct") && peek(1).is_punct("{");
      const bool explicit_message = peek().is_ident("message") && peek(1).is_punct("{");
      if (explicit_struct || explicit_message || peek().is_punct("{")) {
        if (explicit_struct || explicit_message) advance();
        expect_punct("{");
        Definition inl;
        inl.name = b.name;
        inl.span = b.span;
        inl.visibility = Visibility::Local;
        inl.inline_branch = true;
        bool tagged = explicit_message;
        if (!explicit_struct && !explicit_message) {
          // Bare braces: tagged fields make an inline message.
          std::size_t i = 0;
          while (peek(i).kind == TokenKind::DocComment || peek(i).is_punct("@")) ++i;
          tagged = peek(i).kind == TokenKind::Identifier && peek(i + 1).is_punct("(");
        }
        std::set<std::string> inner_names;
        if (tagged) {
          inl.kind = DefinitionKind::Message;
          MessageBody mb;
          mb.fields = fields_until_brace(inl, true, inner_names);
          inl.body = std::move(mb);
        } else {
          inl.kind = DefinitionKind::Struct;
          StructBody sb;
          sb.fields = fields_until_brace(inl, false, inner_names);
          inl.body = std::move(sb);
        }
        check_nested_name(inl, names, b.span);
        b.type = TypeExpr::make_named(b.name);
        b.type.span = b.span;
        b.is_inline = true;
        def.nested.push_back(std::move(inl));
      } else {
        if (!names.insert(b.name).second) {
          fail(name, "duplicate name '" + b.name + "'", ErrorCode::DuplicateDefinition);
        }
        const Token& tt = peek();
        b.type = type_expr();
        if (b.type.kind != TypeExpr::Kind::Named) {
          fail(tt, "union branches must be inline definitions or named struct or message types",
               ErrorCode::InvalidTypeUse);
        }
      }
      optional_semicolon();
      body.branches.push_back(std::move(b));
    }
    // Inline branch definitions go last so printing and reparsing keep the order.
    std::stable_partition(def.nested.begin(), def.nested.end(),
                          [](const Definition& d) { return !d.inline_branch; });
    if (body.branches.empty()) {
      fail(def.span, "union '" + def.name + "' must have at least one branch", ErrorCode::SyntaxError);
    }
    def.body = std::move(body);
  }

  TypeExpr method_type() {
    const Token& t = peek();
    TypeExpr type = type_expr();
    if (type.kind != TypeExpr::Kind::Named) {
      fail(t, "method request and response types must be named struct, message, or union definitions");
    }
    return type;
  }

  void service_def(Definition& def) {
    def.kind = DefinitionKind::Service;
    name_into(def);
    ServiceBody body;
    if (peek().is_ident("with")) {
      advance();
      for (;;) {
        ServiceInclude inc;
        inc.span = peek().span;
        inc.name = dotted_name();
        body.includes.push_back(std::move(inc));
        if (!accept_punct(",")) break;
      }
    }
    expect_punct("{");
    std::set<std::string> names;
    for (;;) {
      std::string doc = take_docs();
      if (accept_punct("}")) break;
      Method m;
      m.doc = std::move(doc);
      m.decorators = decorator_uses();
      const Token& name = expect_ident("method name");
      m.name = name.lexeme;
      m.span = name.span;
      if (!names.insert(m.name).second) {
        fail(name, "duplicate method '" + m.name + "'", ErrorCode::MethodNameCollision);
      }
      expect_punct("(");
      if (peek().is_ident("stream") && !peek(1).is_punct(")")) {
        advance();
        m.request_stream = true;
      }
      m.request = method_type();
      expect_punct(")");
      expect_punct(":");
      if (peek().is_ident("stream") && !peek(1).is_punct(";")) {
        advance();
        m.response_stream = true;
      }
      m.response = method_type();
      expect_punct(";");
      body.methods.push_back(std::move(m));
    }
    def.body = std::move(body);
  }

  void const_def(Definition& def) {
    def.kind = DefinitionKind::Const;
    ConstBody body;
    const Token& type_tok = peek();
    body.type = type_expr();
    const bool byte_array = body.type.kind == TypeExpr::Kind::Array &&
                            body.type.args[0].kind == TypeExpr::Kind::Primitive &&
                            body.type.args[0].primitive == PrimitiveKind::Byte;
    if (body.type.kind != TypeExpr::Kind::Primitive && body.type.kind != TypeExpr::Kind::String && !byte_array) {
      fail(type_tok, "constants must have a primitive, string, or byte[] type", ErrorCode::InvalidTypeUse);
    }
    name_into(def);
    expect_punct("=");
    const Token& lit_tok = peek();
    Literal raw = literal();
    auto value = coerce_literal(raw, body.type);
    if (!value) {
      fail(lit_tok, "literal is not a valid " + type_text(body.type) + " value", ErrorCode::InvalidLiteral);
    }
    body.value = std::move(*value);
    expect_punct(";");
    def.body = std::move(body);
  }

  static std::string type_text(const TypeExpr& t) {
    if (t.kind == TypeExpr::Kind::String) return "string";
    if (t.kind == TypeExpr::Kind::Primitive) return std::string(primitive_name(t.primitive));
    return "byte[]";
  }

  void decorator_decl(Definition& def) {
    advance();  // '#'
    if (!peek().is_ident("decorator")) fail(peek(), "expected 'decorator' after '#'");
    advance();
    def.kind = DefinitionKind::Decorator;
    expect_punct("(");
    name_into(def);
    expect_punct(")");
    expect_punct("{");
    DecoratorBody body;
    std::set<std::string> params;
    bool have_targets = false;
    for (;;) {
      skip_stray_docs();
      if (accept_punct("}")) break;
      const Token& kw = expect_ident("decorator item");
      if (kw.lexeme == "targets") {
        if (have_targets) fail(kw, "duplicate targets", ErrorCode::InvalidDecorator);
        have_targets = true;
        expect_punct("=");
        for (;;) {
          const Token& target = expect_ident("decorator target");
          body.targets |= target_bit(target);
          if (!accept_punct("|")) break;
        }
      } else if (kw.lexeme == "param") {
        DecoratorParam p;
        const Token& name = expect_ident("parameter name");
        p.name = name.lexeme;
        p.span = name.span;
        if (accept_punct("!")) {
          p.required = true;
        } else if (!accept_punct("?")) {
          fail(peek(), "expected '!' (required) or '?' (optional) after parameter name");
        }
        expect_punct(":");
        const Token& tt = peek();
        p.type = type_expr();
        if (p.type.kind != TypeExpr::Kind::Primitive && p.type.kind != TypeExpr::Kind::String) {
          fail(tt, "decorator parameters must have a primitive or string type", ErrorCode::InvalidDecorator);
        }
        if (!params.insert(p.name).second) {
          fail(name, "duplicate parameter '" + p.name + "'", ErrorCode::InvalidDecorator);
        }
        body.params.push_back(std::move(p));
      } else if (kw.lexeme == "validate" || kw.lexeme == "export") {
        auto& slot = kw.lexeme == "validate" ? body.validate_block : body.export_block;
        if (slot) fail(kw, "duplicate " + kw.lexeme + " block", ErrorCode::InvalidDecorator);
        slot = expect(TokenKind::RawBlock, "[[ block").lexeme;
      } else {
        fail(kw, "unknown decorator item " + describe(kw));
      }
      optional_semicolon();
    }
    if (!have_targets) fail(def.span, "decorator '" + def.name + "' must declare targets", ErrorCode::InvalidDecorator);
    def.body = std::move(body);
  }

  std::uint16_t target_bit(const Token& t) {
    static const std::map<std::string_view, DecoratorTarget> kTargets = {
        {"ENUM", DecoratorTarget::Enum},       {"STRUCT", DecoratorTarget::Struct},
        {"MESSAGE", DecoratorTarget::Message}, {"UNION", DecoratorTarget::Union},
        {"FIELD", DecoratorTarget::Field},     {"SERVICE", DecoratorTarget::Service},
        {"METHOD", DecoratorTarget::Method},   {"BRANCH", DecoratorTarget::Branch},
        {"ALL", DecoratorTarget::All},
    };
    auto it = kTargets.find(t.lexeme);
    if (it == kTargets.end()) fail(t, "unknown decorator target '" + t.lexeme + "'", ErrorCode::InvalidDecorator);
    return static_cast<std::uint16_t>(it->second);
  }

  const std::vector<Token>& toks_;
  std::string_view file_;
  std::vector<Diagnostic>* warnings_;
  std::size_t pos_ = 0;
};

}  // namespace

SchemaAst parse(const std::vector<Token>& tokens, std::string_view file, std::vector<Diagnostic>* warnings) {
  if (tokens.empty()) {
    SchemaAst ast;
    ast.file = std::string(file);
    return ast;
  }
  return Parser(tokens, file, warnings).run();
}

SchemaAst parse_source(std::string_view source, std::string_view file, std::vector<Diagnostic>* warnings) {
  return parse(tokenize(source, file), file, warnings);
}

}  // namespace bebop::schema
