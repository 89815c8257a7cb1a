#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "wsids/tree.hpp"

namespace wsids {

struct ParseOptions {
  // Encode attributes as leaf children labeled "@name" carrying the value.
  // Namespace declarations (xmlns, xmlns:*) are always dropped.
  bool attributes_as_leaves = false;
  // 0 disables the limit. Exceeding a limit raises LimitExceeded as soon as
  // the offending element is opened.
  std::size_t max_depth = 0;
  std::size_t max_nodes = 0;
};

// Parses UTF-8 XML into an element-only labeled tree. Comments, processing
// instructions and inter-element whitespace are dropped; prefixes stay part of
// the label. DOCTYPE declarations are rejected, as is non-whitespace text
// next to child elements (mixed content).
//
// Throws Error{MalformedXml} or Error{LimitExceeded}.
LabeledTree parse_document(std::string_view xml, const ParseOptions& options = {});

struct WriteOptions {
  // 0 writes everything on one line.
  int indent_width = 0;
  int base_level = 0;
};

// Appends the subtree rooted at `node`. Leaves are written as <x></x> (or
// <x>text</x>), never self-closing.
void append_xml(std::string& out, const LabeledTree& tree, NodeId node,
                const WriteOptions& options = {});

std::string serialize_document(const LabeledTree& tree, const WriteOptions& options = {});

std::string escape_xml(std::string_view text);

}  // namespace wsids
