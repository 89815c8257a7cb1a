#include "wsids/canonical.hpp"

#include <algorithm>

#include "wsids/error.hpp"

namespace wsids {
namespace {

// Children of n in canonical order, given the per-node codes.
std::vector<NodeId> ordered_children(const LabeledTree& tree, NodeId n,
                                     const std::vector<std::string>& codes) {
  const auto kids = tree.children(n);
  std::vector<NodeId> order(kids.begin(), kids.end());
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (tree.label(a) != tree.label(b)) return tree.label(a) < tree.label(b);
    return codes[a] < codes[b];
  });
  return order;
}

}  // namespace

std::vector<std::string> subtree_codes(const LabeledTree& tree) {
  std::vector<std::string> codes(tree.size());
  for (NodeId n = static_cast<NodeId>(tree.size()); n-- > 0;) {
    std::string code = tree.label(n);
    code += ' ';
    for (NodeId c : ordered_children(tree, n, codes)) {
      code += codes[c];
      code += ' ';
    }
    code += '$';
    codes[n] = std::move(code);
  }
  return codes;
}

CanonicalCode canonical_code(const LabeledTree& tree) {
  if (tree.empty()) return CanonicalCode{};
  auto codes = subtree_codes(tree);
  return CanonicalCode(std::move(codes[LabeledTree::root()]));
}

LabeledTree canonicalize(const LabeledTree& tree) {
  if (tree.empty()) return tree;
  const auto codes = subtree_codes(tree);
  std::vector<std::vector<NodeId>> order(tree.size());
  for (NodeId n = 0; n < tree.size(); ++n) order[n] = ordered_children(tree, n, codes);
  TreeBuilder builder(tree.label(LabeledTree::root()));
  if (tree.text(LabeledTree::root())) builder.set_text(0, *tree.text(LabeledTree::root()));
  // (source node, parent in the copy), popped in pre-order.
  std::vector<std::pair<NodeId, NodeId>> stack;
  for (auto it = order[0].rbegin(); it != order[0].rend(); ++it) stack.emplace_back(*it, 0);
  while (!stack.empty()) {
    const auto [src, parent] = stack.back();
    stack.pop_back();
    const NodeId id = builder.add_child(parent, tree.label(src));
    if (tree.text(src)) builder.set_text(id, *tree.text(src));
    for (auto it = order[src].rbegin(); it != order[src].rend(); ++it) stack.emplace_back(*it, id);
  }
  return std::move(builder).build();
}

LabeledTree tree_from_code(std::string_view code) {
  std::vector<std::string_view> tokens;
  std::size_t start = 0;
  while (start < code.size()) {
    auto end = code.find(' ', start);
    if (end == std::string_view::npos) end = code.size();
    if (end == start) throw Error(ErrorKind::InvalidArgument, "empty token in canonical code");
    tokens.push_back(code.substr(start, end - start));
    start = end + 1;
  }
  if (tokens.size() < 2 || tokens.front() == "$") {
    throw Error(ErrorKind::InvalidArgument, "canonical code too short");
  }
  TreeBuilder builder{std::string(tokens.front())};
  std::vector<NodeId> open{0};
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    if (open.empty()) throw Error(ErrorKind::InvalidArgument, "trailing tokens in canonical code");
    if (tokens[i] == "$") {
      open.pop_back();
    } else {
      open.push_back(builder.add_child(open.back(), std::string(tokens[i])));
    }
  }
  if (!open.empty()) throw Error(ErrorKind::InvalidArgument, "unbalanced canonical code");
  return std::move(builder).build();
}

}  // namespace wsids
