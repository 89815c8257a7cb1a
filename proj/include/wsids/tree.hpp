#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsids {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

// Root-first sequence of element labels addressing a position in a message.
struct LabelPath {
  std::vector<std::string> labels;

  // Labels joined by '/'. XML names cannot contain '/', so this is lossless.
  std::string joined() const;
  static LabelPath split(std::string_view joined);

  friend bool operator==(const LabelPath&, const LabelPath&) = default;
};

// Element-only labeled tree <N, E, r>. Node 0 is the root and every parent id
// is smaller than the ids of its children, so iterating ids in reverse visits
// children before parents. Only leaves carry text.
class LabeledTree {
 public:
  struct Node {
    std::string label;
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    std::optional<std::string> text;

    friend bool operator==(const Node&, const Node&) = default;
  };

  LabeledTree() = default;

  static constexpr NodeId root() noexcept { return 0; }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const std::string& label(NodeId n) const { return nodes_[n].label; }
  NodeId parent(NodeId n) const { return nodes_[n].parent; }
  std::span<const NodeId> children(NodeId n) const { return nodes_[n].children; }
  const std::optional<std::string>& text(NodeId n) const { return nodes_[n].text; }
  bool is_leaf(NodeId n) const { return nodes_[n].children.empty(); }

  // Number of nodes on the root-to-n path (the root has depth 1).
  std::size_t depth_of(NodeId n) const;
  std::size_t height() const;
  LabelPath path_to(NodeId n) const;

  // Copy of the subtree rooted at n.
  LabeledTree subtree(NodeId n) const;
  // Tree induced by `nodes`, which must be connected and contain `top` as the
  // unique node whose parent lies outside the set. Child order is preserved.
  LabeledTree induced(std::span<const NodeId> nodes, NodeId top) const;
  // Copy with every text value removed.
  LabeledTree without_text() const;
  // Copy with node n (a leaf, or the root when it has exactly one child)
  // removed.
  LabeledTree without_node(NodeId n) const;

  // Ordered structural equality, including text.
  friend bool operator==(const LabeledTree&, const LabeledTree&) = default;

 private:
  friend class TreeBuilder;
  std::vector<Node> nodes_;
};

class TreeBuilder {
 public:
  explicit TreeBuilder(std::string root_label);
  // Continues building on top of an existing tree; ids are preserved.
  explicit TreeBuilder(LabeledTree base);

  NodeId add_child(NodeId parent, std::string label);
  void set_text(NodeId node, std::string text);
  std::size_t size() const noexcept { return tree_.nodes_.size(); }

  // Validates the text-on-leaves-only invariant. Empty text is normalized to
  // no text.
  LabeledTree build() &&;

 private:
  LabeledTree tree_;
};

}  // namespace wsids
