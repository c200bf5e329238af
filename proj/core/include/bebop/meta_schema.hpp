#pragma once

// Built-in schemas for descriptors, the plugin protocol, and RPC control
// messages. They are compiled by the regular pipeline on first use.

#include <memory>
#include <string_view>
#include <vector>

#include "bebop/descriptor.hpp"
#include "bebop/dynvalue.hpp"
#include "bebop/schema/resolver.hpp"

namespace bebop::meta {

inline constexpr std::string_view kDescriptorPath = "bebop/descriptor.bop";
inline constexpr std::string_view kPluginPath = "bebop/plugin.bop";
inline constexpr std::string_view kRpcPath = "bebop/rpc.bop";

const std::vector<schema::SourceFile>& sources();

/// All built-in definitions, in package `bebop`.
const TypeRegistry& registry();

/// Type descriptor for `bebop.<name>`.
TypeDescriptor type(std::string_view name);

}  // namespace bebop::meta

namespace bebop {

/// Conversions between descriptors and `bebop.DescriptorSet` /
/// `bebop.SchemaDescriptor` values.
Value descriptor_set_to_value(const DescriptorSet& set);
DescriptorSet descriptor_set_from_value(const Value& v);
Value schema_descriptor_to_value(const SchemaDescriptor& schema);
SchemaDescriptor schema_descriptor_from_value(const Value& v);

}  // namespace bebop
