#pragma once

#include <vector>

#include "wsids/tree.hpp"

namespace wsids {

struct Containment {
  bool found = false;
  // Every haystack node that can host the needle's root, ascending.
  std::vector<NodeId> match_roots;
};

// Unordered induced containment: an injective, label-preserving map from
// needle nodes to haystack nodes that maps parent-child edges to parent-child
// edges. Ancestor-descendant reachability is not enough.
Containment find_induced(const LabeledTree& haystack, const LabeledTree& needle);
bool contains_induced(const LabeledTree& haystack, const LabeledTree& needle);

// covered[v] is true iff some complete occurrence of the needle maps a needle
// node onto haystack node v.
std::vector<bool> occurrence_cover(const LabeledTree& haystack, const LabeledTree& needle);

}  // namespace wsids
