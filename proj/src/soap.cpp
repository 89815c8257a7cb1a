#include "wsids/soap.hpp"

#include <vector>

#include "wsids/error.hpp"

namespace wsids {

std::string_view local_name(std::string_view label) noexcept {
  const auto colon = label.rfind(':');
  return colon == std::string_view::npos ? label : label.substr(colon + 1);
}

LabeledTree preprocess(const LabeledTree& tree, SoapMode mode) {
  if (tree.empty()) throw Error(ErrorKind::InvalidArgument, "empty tree");
  const std::string_view root_label = tree.label(LabeledTree::root());
  const bool envelope = root_label.ends_with("Envelope");
  if (!envelope) {
    if (mode == SoapMode::Strict) {
      throw Error(ErrorKind::NotSoap, "root element '" + std::string(root_label) + "' is not a SOAP Envelope");
    }
    return tree;
  }

  std::vector<char> drop(tree.size(), 0);
  bool any = false;
  for (NodeId c : tree.children(LabeledTree::root())) {
    if (local_name(tree.label(c)) == "Header") {
      drop[c] = 1;
      any = true;
    }
  }
  if (!any) return tree;

  std::vector<NodeId> keep;
  keep.reserve(tree.size());
  for (NodeId n = 0; n < tree.size(); ++n) {
    const NodeId p = tree.parent(n);
    if (p != kNoNode && drop[p]) drop[n] = 1;
    if (!drop[n]) keep.push_back(n);
  }
  return tree.induced(keep, LabeledTree::root());
}

}  // namespace wsids
