#pragma once

#include <string_view>

#include "wsids/tree.hpp"

namespace wsids {

enum class SoapMode { Strict, Lax };

// Label without its namespace prefix ("soap:Body" -> "Body").
std::string_view local_name(std::string_view label) noexcept;

// Drops the SOAP Header (a direct child of the Envelope whose local name is
// "Header"); Envelope and Body are kept. In strict mode a root whose label
// does not end with "Envelope" raises NotSoap; lax mode returns such trees
// unchanged.
LabeledTree preprocess(const LabeledTree& tree, SoapMode mode = SoapMode::Strict);

}  // namespace wsids
