#include "wsids/match.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>

namespace wsids {
namespace {

// fits(u, v): the needle subtree rooted at u has an induced occurrence whose
// root maps onto haystack node v. Filled bottom-up; children are matched to
// children by bipartite matching so sibling order is irrelevant and equal
// labels need distinct haystack siblings.
class InducedMatcher {
 public:
  InducedMatcher(const LabeledTree& haystack, const LabeledTree& needle)
      : hay_(haystack), needle_(needle), table_(needle.size() * haystack.size(), 0) {
    for (NodeId v = 0; v < hay_.size(); ++v) by_label_[hay_.label(v)].push_back(v);
    for (NodeId u = static_cast<NodeId>(needle_.size()); u-- > 0;) {
      for (NodeId v : candidates(u)) {
        if (hay_.children(v).size() < needle_.children(u).size()) continue;
        table_[index(u, v)] = children_match(u, v, kNoNode, kNoNode);
      }
    }
  }

  bool fits(NodeId u, NodeId v) const { return table_[index(u, v)] != 0; }

  const std::vector<NodeId>& candidates(NodeId u) const {
    static const std::vector<NodeId> none;
    const auto it = by_label_.find(needle_.label(u));
    return it == by_label_.end() ? none : it->second;
  }

  // Can the children of u (except skip_u) be mapped injectively onto the
  // children of v (except skip_v)?
  bool children_match(NodeId u, NodeId v, NodeId skip_u, NodeId skip_v) const {
    std::vector<NodeId> left;
    std::vector<NodeId> right;
    for (NodeId c : needle_.children(u)) {
      if (c != skip_u) left.push_back(c);
    }
    if (left.empty()) return true;
    for (NodeId c : hay_.children(v)) {
      if (c != skip_v) right.push_back(c);
    }
    if (left.size() > right.size()) return false;

    std::vector<std::vector<std::size_t>> adjacent(left.size());
    for (std::size_t i = 0; i < left.size(); ++i) {
      for (std::size_t j = 0; j < right.size(); ++j) {
        if (fits(left[i], right[j])) adjacent[i].push_back(j);
      }
      if (adjacent[i].empty()) return false;
    }
    std::vector<std::size_t> owner(right.size(), SIZE_MAX);
    for (std::size_t i = 0; i < left.size(); ++i) {
      std::vector<char> seen(right.size(), 0);
      if (!augment(i, adjacent, owner, seen)) return false;
    }
    return true;
  }

 private:
  std::size_t index(NodeId u, NodeId v) const { return std::size_t{u} * hay_.size() + v; }

  static bool augment(std::size_t i, const std::vector<std::vector<std::size_t>>& adjacent,
                      std::vector<std::size_t>& owner, std::vector<char>& seen) {
    for (std::size_t j : adjacent[i]) {
      if (seen[j]) continue;
      seen[j] = 1;
      if (owner[j] == SIZE_MAX || augment(owner[j], adjacent, owner, seen)) {
        owner[j] = i;
        return true;
      }
    }
    return false;
  }

  const LabeledTree& hay_;
  const LabeledTree& needle_;
  std::vector<char> table_;
  std::unordered_map<std::string, std::vector<NodeId>> by_label_;
};

}  // namespace

Containment find_induced(const LabeledTree& haystack, const LabeledTree& needle) {
  Containment result;
  if (haystack.empty() || needle.empty() || needle.size() > haystack.size()) return result;
  const InducedMatcher matcher(haystack, needle);
  for (NodeId v : matcher.candidates(LabeledTree::root())) {
    if (matcher.fits(LabeledTree::root(), v)) result.match_roots.push_back(v);
  }
  result.found = !result.match_roots.empty();
  return result;
}

bool contains_induced(const LabeledTree& haystack, const LabeledTree& needle) {
  if (haystack.empty() || needle.empty() || needle.size() > haystack.size()) return false;
  const InducedMatcher matcher(haystack, needle);
  for (NodeId v : matcher.candidates(LabeledTree::root())) {
    if (matcher.fits(LabeledTree::root(), v)) return true;
  }
  return false;
}

std::vector<bool> occurrence_cover(const LabeledTree& haystack, const LabeledTree& needle) {
  std::vector<bool> covered(haystack.size(), false);
  if (haystack.empty() || needle.empty() || needle.size() > haystack.size()) return covered;
  const InducedMatcher matcher(haystack, needle);
  const std::size_t width = haystack.size();

  // context[u * width + w]: the needle outside subtree(u) embeds around w
  // with u mapped onto w. Parents precede children in id order.
  std::vector<char> context(needle.size() * width, 0);
  for (NodeId w : matcher.candidates(LabeledTree::root())) context[w] = 1;
  for (NodeId u = 1; u < needle.size(); ++u) {
    const NodeId p = needle.parent(u);
    for (NodeId w : matcher.candidates(u)) {
      const NodeId x = haystack.parent(w);
      if (x == kNoNode || haystack.label(x) != needle.label(p)) continue;
      if (!context[std::size_t{p} * width + x]) continue;
      context[std::size_t{u} * width + w] = matcher.children_match(p, x, u, w);
    }
  }
  for (NodeId u = 0; u < needle.size(); ++u) {
    for (NodeId w : matcher.candidates(u)) {
      if (context[std::size_t{u} * width + w] && matcher.fits(u, w)) covered[w] = true;
    }
  }
  return covered;
}

}  // namespace wsids
