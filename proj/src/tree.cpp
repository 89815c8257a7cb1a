#include "wsids/tree.hpp"

#include <algorithm>

#include "wsids/error.hpp"

namespace wsids {

std::string LabelPath::joined() const {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += '/';
    out += labels[i];
  }
  return out;
}

LabelPath LabelPath::split(std::string_view joined) {
  LabelPath path;
  std::size_t start = 0;
  while (start <= joined.size()) {
    const auto slash = joined.find('/', start);
    const auto end = slash == std::string_view::npos ? joined.size() : slash;
    path.labels.emplace_back(joined.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return path;
}

std::size_t LabeledTree::depth_of(NodeId n) const {
  std::size_t depth = 1;
  for (NodeId p = nodes_[n].parent; p != kNoNode; p = nodes_[p].parent) ++depth;
  return depth;
}

std::size_t LabeledTree::height() const {
  if (nodes_.empty()) return 0;
  std::vector<std::size_t> depth(nodes_.size(), 1);
  std::size_t best = 1;
  for (NodeId n = 1; n < nodes_.size(); ++n) {
    depth[n] = depth[nodes_[n].parent] + 1;
    best = std::max(best, depth[n]);
  }
  return best;
}

LabelPath LabeledTree::path_to(NodeId n) const {
  LabelPath path;
  for (NodeId cur = n; cur != kNoNode; cur = nodes_[cur].parent) {
    path.labels.push_back(nodes_[cur].label);
  }
  std::reverse(path.labels.begin(), path.labels.end());
  return path;
}

LabeledTree LabeledTree::subtree(NodeId n) const {
  std::vector<NodeId> members;
  std::vector<NodeId> stack{n};
  while (!stack.empty()) {
    const NodeId cur = stack.back();
    stack.pop_back();
    members.push_back(cur);
    for (NodeId c : nodes_[cur].children) stack.push_back(c);
  }
  return induced(members, n);
}

LabeledTree LabeledTree::induced(std::span<const NodeId> nodes, NodeId top) const {
  std::vector<char> member(nodes_.size(), 0);
  for (NodeId n : nodes) member[n] = 1;
  TreeBuilder builder(nodes_[top].label);
  if (nodes_[top].text && nodes_[top].children.empty()) builder.set_text(0, *nodes_[top].text);
  // Pre-order walk over members: (source node, parent in the copy).
  std::vector<std::pair<NodeId, NodeId>> stack;
  const auto push_children = [&](NodeId src, NodeId dst) {
    const auto& kids = nodes_[src].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
      if (member[*it]) stack.emplace_back(*it, dst);
    }
  };
  push_children(top, 0);
  while (!stack.empty()) {
    const auto [src, parent] = stack.back();
    stack.pop_back();
    const NodeId id = builder.add_child(parent, nodes_[src].label);
    if (nodes_[src].text && nodes_[src].children.empty()) builder.set_text(id, *nodes_[src].text);
    push_children(src, id);
  }
  return std::move(builder).build();
}

LabeledTree LabeledTree::without_text() const {
  LabeledTree copy = *this;
  for (auto& node : copy.nodes_) node.text.reset();
  return copy;
}

LabeledTree LabeledTree::without_node(NodeId n) const {
  const bool leaf = nodes_[n].children.empty() && n != root();
  const bool lone_root = n == root() && nodes_[n].children.size() == 1;
  if (!leaf && !lone_root) {
    throw Error(ErrorKind::InvalidArgument, "only a leaf or a single-child root can be removed");
  }
  std::vector<NodeId> keep;
  keep.reserve(nodes_.size() - 1);
  for (NodeId i = 0; i < nodes_.size(); ++i) {
    if (i != n) keep.push_back(i);
  }
  return induced(keep, lone_root ? nodes_[n].children.front() : root());
}

TreeBuilder::TreeBuilder(std::string root_label) {
  tree_.nodes_.push_back(LabeledTree::Node{std::move(root_label), kNoNode, {}, std::nullopt});
}

TreeBuilder::TreeBuilder(LabeledTree base) : tree_(std::move(base)) {
  if (tree_.empty()) throw Error(ErrorKind::InvalidArgument, "cannot extend an empty tree");
}

NodeId TreeBuilder::add_child(NodeId parent, std::string label) {
  if (parent >= tree_.nodes_.size()) {
    throw Error(ErrorKind::InvalidArgument, "parent node does not exist");
  }
  const auto id = static_cast<NodeId>(tree_.nodes_.size());
  tree_.nodes_.push_back(LabeledTree::Node{std::move(label), parent, {}, std::nullopt});
  tree_.nodes_[parent].children.push_back(id);
  return id;
}

void TreeBuilder::set_text(NodeId node, std::string text) {
  if (node >= tree_.nodes_.size()) {
    throw Error(ErrorKind::InvalidArgument, "node does not exist");
  }
  if (text.empty()) {
    tree_.nodes_[node].text.reset();
  } else {
    tree_.nodes_[node].text = std::move(text);
  }
}

LabeledTree TreeBuilder::build() && {
  for (const auto& node : tree_.nodes_) {
    if (node.text && !node.children.empty()) {
      throw Error(ErrorKind::InvariantViolation,
                  "element '" + node.label + "' has both text and child elements");
    }
  }
  return std::move(tree_);
}

}  // namespace wsids
