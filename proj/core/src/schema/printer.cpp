#include "bebop/schema/printer.hpp"

#include <sstream>

#include "bebop/schema/literals.hpp"

namespace bebop::schema {

namespace {

class Printer {
 public:
  std::string run(const SchemaAst& ast) {
    if (ast.edition) out_ << "edition = " << quote_string(*ast.edition) << "\n";
    if (ast.package) out_ << "package " << *ast.package << "\n";
    if (ast.edition || ast.package) out_ << "\n";
    for (const auto& imp : ast.imports) out_ << "import " << quote_string(imp.path) << "\n";
    if (!ast.imports.empty()) out_ << "\n";
    bool first = true;
    for (const auto& def : ast.definitions) {
      if (!first) out_ << "\n";
      first = false;
      definition(def, false);
    }
    return out_.str();
  }

 private:
  void indent() {
    for (int i = 0; i < depth_; ++i) out_ << "  ";
  }

  void doc(const std::string& text) {
    if (text.empty()) return;
    std::size_t start = 0;
    for (;;) {
      const auto nl = text.find('\n', start);
      indent();
      out_ << "/// " << text.substr(start, nl == std::string::npos ? std::string::npos : nl - start) << "\n";
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
  }

  void decorators(const std::vector<DecoratorUse>& uses) {
    for (const auto& use : uses) {
      indent();
      out_ << "@" << use.name;
      if (!use.args.empty()) {
        out_ << "(";
        for (std::size_t i = 0; i < use.args.size(); ++i) {
          if (i) out_ << ", ";
          if (!use.args[i].name.empty()) out_ << use.args[i].name << ": ";
          out_ << format_literal(use.args[i].value);
        }
        out_ << ")";
      }
      out_ << "\n";
    }
  }

  void field(const Field& f) {
    doc(f.doc);
    decorators(f.decorators);
    indent();
    out_ << f.name;
    if (f.tag) out_ << "(" << *f.tag << ")";
    out_ << ": " << print_type(f.type) << ";\n";
  }

  void body_with_nested(const Definition& def, const std::vector<Field>& fields) {
    ++depth_;
    for (const auto& n : def.nested) {
      if (!n.inline_branch) definition(n, true);
    }
    for (const auto& f : fields) field(f);
    --depth_;
  }

  void definition(const Definition& def, bool nested) {
    doc(def.doc);
    decorators(def.decorators);
    indent();
    if (def.kind == DefinitionKind::Decorator) {
      decorator_decl(def);
      return;
    }
    if (!nested && def.visibility == Visibility::Local) out_ << "local ";
    if (nested && def.visibility == Visibility::Exported) out_ << "export ";
    switch (def.kind) {
      case DefinitionKind::Enum: {
        const auto& body = def.as<EnumBody>();
        out_ << "enum " << def.name;
        if (body.base != PrimitiveKind::UInt32) out_ << " : " << primitive_name(body.base);
        out_ << " {\n";
        ++depth_;
        for (const auto& m : body.members) {
          doc(m.doc);
          decorators(m.decorators);
          indent();
          out_ << m.name << " = ";
          if (is_signed_integer(body.base)) {
            out_ << static_cast<std::int64_t>(m.value);
          } else {
            out_ << m.value;
          }
          out_ << ";\n";
        }
        --depth_;
        break;
      }
      case DefinitionKind::Struct: {
        const auto& body = def.as<StructBody>();
        if (body.is_mutable) out_ << "mut ";
        out_ << "struct " << def.name << " {\n";
        body_with_nested(def, body.fields);
        break;
      }
      case DefinitionKind::Message:
        out_ << "message " << def.name << " {\n";
        body_with_nested(def, def.as<MessageBody>().fields);
        break;
      case DefinitionKind::Union: {
        out_ << "union " << def.name << " {\n";
        ++depth_;
        for (const auto& n : def.nested) {
          if (!n.inline_branch) definition(n, true);
        }
        for (const auto& b : def.as<UnionBody>().branches) branch(def, b);
        --depth_;
        break;
      }
      case DefinitionKind::Service: {
        const auto& body = def.as<ServiceBody>();
        out_ << "service " << def.name;
        for (std::size_t i = 0; i < body.includes.size(); ++i) {
          out_ << (i ? ", " : " with ") << body.includes[i].name;
        }
        out_ << " {\n";
        ++depth_;
        for (const auto& m : body.methods) {
          doc(m.doc);
          decorators(m.decorators);
          indent();
          out_ << m.name << "(" << (m.request_stream ? "stream " : "") << print_type(m.request) << "): "
               << (m.response_stream ? "stream " : "") << print_type(m.response) << ";\n";
        }
        --depth_;
        break;
      }
      case DefinitionKind::Const: {
        const auto& body = def.as<ConstBody>();
        out_ << "const " << print_type(body.type) << " " << def.name << " = " << format_literal(body.value)
             << ";\n";
        return;
      }
      default: return;
    }
    indent();
    out_ << "}\n";
  }

  void branch(const Definition& owner, const UnionBranch& b) {
    doc(b.doc);
    decorators(b.decorators);
    indent();
    out_ << b.name << "(" << b.discriminator << "): ";
    if (!b.is_inline) {
      out_ << print_type(b.type) << ";\n";
      return;
    }
    const Definition* inl = nullptr;
    for (const auto& n : owner.nested) {
      if (n.inline_branch && n.name == b.name) inl = &n;
    }
    if (!inl) {
      out_ << "{}\n";
      return;
    }
    if (inl->kind == DefinitionKind::Message) {
      out_ << "message {\n";
      body_with_nested(*inl, inl->as<MessageBody>().fields);
    } else {
      out_ << "{\n";
      body_with_nested(*inl, inl->as<StructBody>().fields);
    }
    indent();
    out_ << "};\n";
  }

  void decorator_decl(const Definition& def) {
    const auto& body = def.as<DecoratorBody>();
    out_ << "#decorator(" << def.name << ") {\n";
    ++depth_;
    indent();
    out_ << "targets = ";
    if (body.targets == static_cast<std::uint16_t>(DecoratorTarget::All)) {
      out_ << "ALL";
    } else {
      static constexpr std::pair<DecoratorTarget, const char*> kNames[] = {
          {DecoratorTarget::Enum, "ENUM"},     {DecoratorTarget::Struct, "STRUCT"},
          {DecoratorTarget::Message, "MESSAGE"}, {DecoratorTarget::Union, "UNION"},
          {DecoratorTarget::Field, "FIELD"},   {DecoratorTarget::Service, "SERVICE"},
          {DecoratorTarget::Method, "METHOD"}, {DecoratorTarget::Branch, "BRANCH"},
      };
      bool first = true;
      for (const auto& [bit, name] : kNames) {
        if (body.targets & static_cast<std::uint16_t>(bit)) {
          out_ << (first ? "" : " | ") << name;
          first = false;
        }
      }
    }
    out_ << "\n";
    for (const auto& p : body.params) {
      indent();
      out_ << "param " << p.name << (p.required ? "!" : "?") << ": " << print_type(p.type) << "\n";
    }
    if (body.validate_block) {
      indent();
      out_ << "validate [[" << *body.validate_block << "]]\n";
    }
    if (body.export_block) {
      indent();
      out_ << "export [[" << *body.export_block << "]]\n";
    }
    --depth_;
    indent();
    out_ << "}\n";
  }

  std::ostringstream out_;
  int depth_ = 0;
};

}  // namespace

std::string print_type(const TypeExpr& type) {
  switch (type.kind) {
    case TypeExpr::Kind::Primitive: return std::string(primitive_name(type.primitive));
    case TypeExpr::Kind::String: return "string";
    case TypeExpr::Kind::Named: return type.name;
    case TypeExpr::Kind::Array: return print_type(type.args[0]) + "[]";
    case TypeExpr::Kind::FixedArray: return print_type(type.args[0]) + "[" + std::to_string(type.fixed_length) + "]";
    case TypeExpr::Kind::Map: return "map[" + print_type(type.args[0]) + ", " + print_type(type.args[1]) + "]";
  }
  return {};
}

std::string print(const SchemaAst& ast) { return Printer().run(ast); }

}  // namespace bebop::schema
