#pragma once

// Field-by-field access to MessageValue, shared by the built-in message codecs.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bebop/dynvalue.hpp"

namespace bebop::fields {

inline Value enum_u8(std::uint8_t v) { return Value(EnumValue{Primitive(v)}); }

class Out {
 public:
  void str(std::uint8_t tag, const std::string& s) {
    if (!s.empty()) m_.set(tag, Value(s));
  }
  void flag(std::uint8_t tag, bool b) {
    if (b) m_.set(tag, Value(Primitive(b)));
  }
  template <typename T>
  void num(std::uint8_t tag, T v) {
    if (v != T{}) m_.set(tag, Value(Primitive(v)));
  }
  void enumeration(std::uint8_t tag, std::uint8_t v) {
    if (v != 0) m_.set(tag, enum_u8(v));
  }
  void list(std::uint8_t tag, std::vector<Value> items) {
    if (!items.empty()) m_.set(tag, make_array(std::move(items)));
  }
  void bytes(std::uint8_t tag, const Bytes& b) {
    if (!b.empty()) m_.set(tag, Value(b));
  }
  template <typename T>
  void opt(std::uint8_t tag, const std::optional<T>& v) {
    if (v) m_.set(tag, Value(Primitive(*v)));
  }
  template <typename T>
  void always(std::uint8_t tag, T v) {
    m_.set(tag, Value(Primitive(v)));
  }
  void bytes_map(std::uint8_t tag, const std::map<std::string, Bytes>& m) {
    if (m.empty()) return;
    MapValue out;
    for (const auto& [k, v] : m) out.entries.emplace_back(Value(k), Value(v));
    m_.set(tag, Value(std::move(out)));
  }
  void value(std::uint8_t tag, Value v) { m_.set(tag, std::move(v)); }
  Value done() { return Value(std::move(m_)); }

 private:
  MessageValue m_;
};

class In {
 public:
  explicit In(const Value& v) : m_(v.as<MessageValue>()) {}

  std::string str(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    return v ? v->as<std::string>() : std::string();
  }
  bool flag(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    return v && std::get<bool>(v->as<Primitive>());
  }
  template <typename T>
  T num(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    return v ? std::get<T>(v->as<Primitive>()) : T{};
  }
  std::uint8_t enumeration(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    return v ? std::get<std::uint8_t>(v->as<EnumValue>().value) : 0;
  }
  const std::vector<Value>& list(std::uint8_t tag) const {
    static const std::vector<Value> empty;
    const Value* v = m_.get(tag);
    return v ? v->as<ArrayValue>().items : empty;
  }
  Bytes bytes(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    return v ? v->as<Bytes>() : Bytes();
  }
  template <typename T>
  std::optional<T> opt(std::uint8_t tag) const {
    const Value* v = m_.get(tag);
    if (!v) return std::nullopt;
    return std::get<T>(v->as<Primitive>());
  }
  std::map<std::string, Bytes> bytes_map(std::uint8_t tag) const {
    std::map<std::string, Bytes> out;
    if (const Value* v = m_.get(tag)) {
      for (const auto& [k, x] : v->as<MapValue>().entries) out[k.as<std::string>()] = x.as<Bytes>();
    }
    return out;
  }
  const Value* get(std::uint8_t tag) const { return m_.get(tag); }

 private:
  const MessageValue& m_;
};

}  // namespace bebop::fields
