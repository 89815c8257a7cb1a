#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/tree.hpp"

namespace wsids {

// Depth-first canonical form of an unordered labeled tree: a node's label,
// then the codes of its children ordered by (label, code), then the backtrack
// token "$", all separated by single spaces. Leaf text is not part of it.
// Two trees share a code iff they are isomorphic as unordered labeled trees.
class CanonicalCode {
 public:
  CanonicalCode() = default;
  explicit CanonicalCode(std::string code) : code_(std::move(code)) {}

  const std::string& str() const noexcept { return code_; }
  bool empty() const noexcept { return code_.empty(); }

  friend auto operator<=>(const CanonicalCode&, const CanonicalCode&) = default;
  friend bool operator==(const CanonicalCode&, const CanonicalCode&) = default;

 private:
  std::string code_;
};

CanonicalCode canonical_code(const LabeledTree& tree);

// Code of every node's subtree, indexed by node id.
std::vector<std::string> subtree_codes(const LabeledTree& tree);

// Copy with siblings in canonical order and ids in pre-order. Text is kept.
LabeledTree canonicalize(const LabeledTree& tree);

// Inverse of canonical_code. Throws InvalidArgument on a malformed code.
LabeledTree tree_from_code(std::string_view code);

}  // namespace wsids

template <>
struct std::hash<wsids::CanonicalCode> {
  std::size_t operator()(const wsids::CanonicalCode& c) const noexcept {
    return std::hash<std::string>{}(c.str());
  }
};
