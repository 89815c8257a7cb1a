#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wsids/canonical.hpp"
#include "wsids/forest.hpp"
#include "wsids/tree.hpp"

namespace wsids {

struct FrequentPattern {
  LabeledTree tree;      // canonical sibling order, no text
  std::size_t support;   // number of documents with at least one occurrence
  CanonicalCode code;
};

// Sorted by code, no duplicate codes.
using PatternSet = std::vector<FrequentPattern>;

struct MiningParams {
  std::size_t minsup = 2;            // absolute document count
  std::size_t max_pattern_size = 0;  // node cap, 0 = unbounded
  std::size_t max_candidates = 5'000'000;
};

// Closed frequent unordered induced subtrees: frequent patterns with no
// frequent super-pattern of equal support. With a size cap, closure is taken
// within the capped lattice.
//
// Patterns are grown one leaf at a time from frequent single nodes; supports
// come from re-checking the parent's document list, duplicates are pruned by
// canonical code, and a pattern is closed iff none of its one-node extensions
// (a new leaf anywhere or a new parent above the root) keeps its support.
PatternSet mine_closed(const Forest& forest, const MiningParams& params);

// Every frequent pattern, by exhaustive per-document enumeration of connected
// induced subtrees. Intended as an oracle for small inputs.
PatternSet mine_all(const Forest& forest, const MiningParams& params);

// Keeps p iff no other pattern properly contains p with the same support.
PatternSet closed_filter(const PatternSet& patterns);

std::size_t support_of(const LabeledTree& pattern, const Forest& forest);

// One "code<TAB>support" line per pattern, sorted by code.
std::string format_patterns(const PatternSet& patterns);

// Removing any one of these nodes leaves a connected sub-pattern: non-root
// leaves, plus the root when it has a single child.
std::vector<NodeId> removable_nodes(const LabeledTree& tree);

}  // namespace wsids
