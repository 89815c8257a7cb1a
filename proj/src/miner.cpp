#include "wsids/miner.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "wsids/error.hpp"
#include "wsids/match.hpp"

namespace wsids {
namespace {

void validate(const Forest& forest, const MiningParams& params) {
  if (forest.empty()) throw Error(ErrorKind::EmptyForest, "cannot mine an empty forest");
  check_unique_ids(forest);
  if (params.minsup < 1 || params.minsup > forest.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "minsup must lie in [1, " + std::to_string(forest.size()) + "], got " +
                    std::to_string(params.minsup));
  }
}

void sort_by_code(PatternSet& patterns) {
  std::sort(patterns.begin(), patterns.end(),
            [](const FrequentPattern& a, const FrequentPattern& b) { return a.code < b.code; });
}

struct Candidate {
  LabeledTree tree;
  std::vector<std::uint32_t> docs;  // indices into the forest
};

}  // namespace

std::vector<NodeId> removable_nodes(const LabeledTree& tree) {
  std::vector<NodeId> out;
  if (tree.size() < 2) return out;
  if (tree.children(LabeledTree::root()).size() == 1) out.push_back(LabeledTree::root());
  for (NodeId n = 1; n < tree.size(); ++n) {
    if (tree.is_leaf(n)) out.push_back(n);
  }
  return out;
}

PatternSet mine_closed(const Forest& forest, const MiningParams& params) {
  validate(forest, params);

  std::vector<LabeledTree> docs;
  docs.reserve(forest.size());
  for (const auto& doc : forest) docs.push_back(doc.tree.without_text());

  // Label and parent->child edge document frequencies.
  std::map<std::string, std::vector<std::uint32_t>> label_docs;
  std::map<std::pair<std::string, std::string>, std::size_t> edge_support;
  for (std::uint32_t d = 0; d < docs.size(); ++d) {
    std::set<std::string> labels;
    std::set<std::pair<std::string, std::string>> edges;
    for (NodeId n = 0; n < docs[d].size(); ++n) {
      labels.insert(docs[d].label(n));
      if (n != LabeledTree::root()) edges.emplace(docs[d].label(docs[d].parent(n)), docs[d].label(n));
    }
    for (const auto& l : labels) label_docs[l].push_back(d);
    for (const auto& e : edges) ++edge_support[e];
  }
  std::map<std::string, std::vector<std::string>> child_labels;
  for (const auto& [edge, count] : edge_support) {
    if (count >= params.minsup) child_labels[edge.first].push_back(edge.second);
  }

  std::unordered_map<std::string, Candidate> frequent;
  std::unordered_set<std::string> seen;
  std::vector<std::string> level;
  for (const auto& [label, ids] : label_docs) {
    if (ids.size() < params.minsup) continue;
    LabeledTree single = std::move(TreeBuilder(label)).build();
    std::string code = canonical_code(single).str();
    seen.insert(code);
    frequent.emplace(code, Candidate{std::move(single), ids});
    level.push_back(std::move(code));
  }

  std::size_t generated = level.size();
  while (!level.empty()) {
    std::vector<std::string> next;
    for (const auto& parent_code : level) {
      const Candidate& parent = frequent.at(parent_code);
      if (params.max_pattern_size && parent.tree.size() >= params.max_pattern_size) continue;
      for (NodeId at = 0; at < parent.tree.size(); ++at) {
        const auto it = child_labels.find(parent.tree.label(at));
        if (it == child_labels.end()) continue;
        for (const auto& label : it->second) {
          TreeBuilder builder(parent.tree);
          builder.add_child(at, label);
          LabeledTree grown = std::move(builder).build();
          std::string code = canonical_code(grown).str();
          if (!seen.insert(code).second) continue;
          if (++generated > params.max_candidates) {
            throw Error(ErrorKind::BudgetExceeded,
                        "more than " + std::to_string(params.max_candidates) + " candidate patterns");
          }
          std::vector<std::uint32_t> ids;
          for (std::uint32_t d : parent.docs) {
            if (contains_induced(docs[d], grown)) ids.push_back(d);
          }
          if (ids.size() < params.minsup) continue;
          frequent.emplace(code, Candidate{canonicalize(grown), std::move(ids)});
          next.push_back(std::move(code));
        }
      }
    }
    level = std::move(next);
  }

  // A pattern is closed unless some one-node super-pattern keeps its support.
  // Every such super-pattern is frequent and therefore present in the map.
  std::unordered_set<std::string> absorbed;
  for (const auto& [code, pattern] : frequent) {
    for (NodeId n : removable_nodes(pattern.tree)) {
      const std::string sub = canonical_code(pattern.tree.without_node(n)).str();
      const auto it = frequent.find(sub);
      if (it != frequent.end() && it->second.docs.size() == pattern.docs.size()) absorbed.insert(sub);
    }
  }

  PatternSet out;
  for (auto& [code, pattern] : frequent) {
    if (absorbed.count(code)) continue;
    out.push_back(FrequentPattern{std::move(pattern.tree), pattern.docs.size(), CanonicalCode(code)});
  }
  sort_by_code(out);
  return out;
}

PatternSet mine_all(const Forest& forest, const MiningParams& params) {
  validate(forest, params);

  struct Tally {
    std::size_t support = 0;
    LabeledTree example;
  };
  std::map<std::string, Tally> tallies;
  std::size_t enumerated = 0;
  for (const auto& doc : forest) {
    const LabeledTree tree = doc.tree.without_text();
    std::set<std::string> codes_here;
    for_each_connected_subtree(tree, params.max_pattern_size, [&](std::span<const NodeId> nodes, NodeId top) {
      if (++enumerated > params.max_candidates) {
        throw Error(ErrorKind::BudgetExceeded,
                    "more than " + std::to_string(params.max_candidates) + " enumerated subtrees");
      }
      LabeledTree sub = tree.induced(nodes, top);
      std::string code = canonical_code(sub).str();
      if (codes_here.insert(code).second) {
        auto& tally = tallies[code];
        if (tally.support == 0) tally.example = std::move(sub);
        ++tally.support;
      }
      return true;
    });
  }

  PatternSet out;
  for (auto& [code, tally] : tallies) {
    if (tally.support < params.minsup) continue;
    out.push_back(FrequentPattern{canonicalize(tally.example), tally.support, CanonicalCode(code)});
  }
  return out;  // std::map iteration is already in code order
}

PatternSet closed_filter(const PatternSet& patterns) {
  PatternSet out;
  for (const auto& p : patterns) {
    const bool absorbed = std::any_of(patterns.begin(), patterns.end(), [&](const FrequentPattern& q) {
      return q.support == p.support && q.tree.size() > p.tree.size() && contains_induced(q.tree, p.tree);
    });
    if (!absorbed) out.push_back(p);
  }
  sort_by_code(out);
  return out;
}

std::size_t support_of(const LabeledTree& pattern, const Forest& forest) {
  return static_cast<std::size_t>(std::count_if(forest.begin(), forest.end(), [&](const Document& doc) {
    return contains_induced(doc.tree, pattern);
  }));
}

std::string format_patterns(const PatternSet& patterns) {
  std::vector<const FrequentPattern*> order;
  for (const auto& p : patterns) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->code < b->code; });
  std::string out;
  for (const auto* p : order) {
    out += p->code.str();
    out += '\t';
    out += std::to_string(p->support);
    out += '\n';
  }
  return out;
}

}  // namespace wsids
