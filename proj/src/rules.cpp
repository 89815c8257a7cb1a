#include "wsids/rules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <unordered_map>

#include "wsids/error.hpp"
#include "wsids/match.hpp"
#include "wsids/xml.hpp"

namespace wsids {
namespace {

// sup(t) = max{sup(c) : c closed, t contained in c}. Anti-monotonicity makes
// this exact for any t that is a subtree of a frequent pattern.
class SupportOracle {
 public:
  SupportOracle(const PatternSet& closed, const Forest& forest) : forest_(forest) {
    for (const auto& p : closed) by_support_.push_back(&p);
    std::stable_sort(by_support_.begin(), by_support_.end(),
                     [](auto* a, auto* b) { return a->support > b->support; });
  }

  std::size_t operator()(const LabeledTree& tree, const std::string& code) {
    if (const auto it = cache_.find(code); it != cache_.end()) return it->second;
    std::size_t support = 0;
    bool found = false;
    for (const auto* p : by_support_) {
      if (p->tree.size() >= tree.size() && contains_induced(p->tree, tree)) {
        support = p->support;
        found = true;
        break;
      }
    }
    if (!found) support = support_of(tree, forest_);
    cache_.emplace(code, support);
    return support;
  }

 private:
  const Forest& forest_;
  std::vector<const FrequentPattern*> by_support_;
  std::unordered_map<std::string, std::size_t> cache_;
};

void add_pattern(std::map<std::string, LabeledTree>& bodies, const LabeledTree& tree) {
  LabeledTree canon = canonicalize(tree);
  std::string code = canonical_code(canon).str();
  bodies.emplace(std::move(code), std::move(canon));
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaViolation, what); }

std::string_view leaf_text(const LabeledTree& doc, NodeId n, const std::string& where) {
  if (!doc.is_leaf(n)) schema(where + " must hold a value, not elements");
  return doc.text(n) ? std::string_view(*doc.text(n)) : std::string_view();
}

LabeledTree single_tree(const LabeledTree& doc, NodeId holder, const std::string& where) {
  if (doc.children(holder).size() != 1) schema(where + " must contain exactly one tree");
  return doc.subtree(doc.children(holder).front()).without_text();
}

}  // namespace

RuleSet::RuleSet(std::vector<TreeRule> rules, std::optional<RuleParams> params)
    : rules_(std::move(rules)), params_(params) {
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : rules_) {
    if (!seen.emplace(r.body_code.str(), r.head_code.str()).second) {
      throw Error(ErrorKind::InvariantViolation, "duplicate rule " + r.body_code.str() + " => " + r.head_code.str());
    }
  }
}

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

RuleSet extract_rules(const PatternSet& closed, const Forest& forest, const ExtractOptions& options) {
  if (!(options.minconf > 0.0 && options.minconf <= 1.0)) {
    throw Error(ErrorKind::InvalidConfidence, "minconf must lie in (0, 1], got " + format_real(options.minconf));
  }
  SupportOracle support(closed, forest);
  std::map<std::pair<std::string, std::string>, TreeRule> found;

  for (const auto& head : closed) {
    const std::size_t n = head.tree.size();
    if (n < 2) continue;
    const std::size_t cap = options.body_size_cap ? std::min(options.body_size_cap, n - 1) : n - 1;

    std::map<std::string, LabeledTree> bodies;
    for_each_connected_subtree(head.tree, cap, [&](std::span<const NodeId> nodes, NodeId top) {
      add_pattern(bodies, head.tree.induced(nodes, top));
      return true;
    });
    for (NodeId r : removable_nodes(head.tree)) add_pattern(bodies, head.tree.without_node(r));

    for (auto& [code, body] : bodies) {
      const std::size_t body_support = support(body, code);
      if (body_support < head.support) {
        throw Error(ErrorKind::InvariantViolation,
                    "body " + code + " is rarer than its head " + head.code.str());
      }
      const double conf = static_cast<double>(head.support) / static_cast<double>(body_support);
      if (conf < options.minconf) continue;
      found.try_emplace({head.code.str(), code},
                        TreeRule{body, head.tree, conf, head.support, CanonicalCode(code), head.code});
    }
  }

  std::vector<TreeRule> rules;
  rules.reserve(found.size());
  for (auto& [key, rule] : found) rules.push_back(std::move(rule));
  return RuleSet(std::move(rules), RuleParams{options.minsup, options.minconf});
}

std::string serialize_rules(const RuleSet& rules) {
  if (rules.empty()) return "<rules></rules>";
  const WriteOptions tree_layout{2, 3};
  std::string out = "<rules>\n";
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& rule = rules[i];
    const std::string id = RuleSet::id_of(i);
    out += "  <" + id + ">\n";
    out += "    <Cs>\n";
    append_xml(out, rule.body, LabeledTree::root(), tree_layout);
    out += "    </Cs>\n";
    out += "    <S>\n";
    append_xml(out, rule.head, LabeledTree::root(), tree_layout);
    out += "    </S>\n";
    out += "    <confidence>" + format_real(rule.confidence) + "</confidence>\n";
    out += "    <support>" + std::to_string(rule.support) + "</support>\n";
    out += "  </" + id + ">\n";
  }
  out += "</rules>";
  return out;
}

RuleSet parse_rules(std::string_view xml) {
  LabeledTree doc;
  try {
    doc = parse_document(xml);
  } catch (const Error& e) {
    schema(std::string("rules file is not well-formed: ") + e.what());
  }
  if (doc.label(LabeledTree::root()) != "rules") schema("root element must be <rules>");
  if (doc.text(LabeledTree::root())) schema("<rules> must not carry text");

  std::vector<TreeRule> rules;
  const auto entries = doc.children(LabeledTree::root());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const NodeId entry = entries[i];
    const std::string id = RuleSet::id_of(i);
    if (doc.label(entry) != id) schema("expected <" + id + ">, found <" + doc.label(entry) + ">");

    std::map<std::string, NodeId> parts;
    for (NodeId c : doc.children(entry)) {
      if (!parts.emplace(doc.label(c), c).second) schema(id + " repeats <" + doc.label(c) + ">");
    }
    for (const char* name : {"Cs", "S", "confidence", "support"}) {
      if (!parts.count(name)) schema(id + " lacks <" + name + ">");
    }
    if (parts.size() != 4) schema(id + " has unexpected children");

    TreeRule rule;
    rule.body = single_tree(doc, parts["Cs"], id + "/Cs");
    rule.head = single_tree(doc, parts["S"], id + "/S");

    const auto conf_text = leaf_text(doc, parts["confidence"], id + "/confidence");
    const auto [conf_end, conf_ec] =
        std::from_chars(conf_text.data(), conf_text.data() + conf_text.size(), rule.confidence);
    if (conf_ec != std::errc() || conf_end != conf_text.data() + conf_text.size()) {
      schema(id + " has a non-numeric confidence '" + std::string(conf_text) + "'");
    }
    const auto sup_text = leaf_text(doc, parts["support"], id + "/support");
    const auto [sup_end, sup_ec] = std::from_chars(sup_text.data(), sup_text.data() + sup_text.size(), rule.support);
    if (sup_ec != std::errc() || sup_end != sup_text.data() + sup_text.size() || sup_text.empty()) {
      schema(id + " has a non-integer support '" + std::string(sup_text) + "'");
    }

    if (!(rule.confidence > 0.0 && rule.confidence <= 1.0)) {
      throw Error(ErrorKind::InvariantViolation, id + " confidence " + std::string(conf_text) + " outside (0, 1]");
    }
    if (rule.support == 0) throw Error(ErrorKind::InvariantViolation, id + " has zero support");
    if (rule.body.size() >= rule.head.size() || !contains_induced(rule.head, rule.body)) {
      throw Error(ErrorKind::InvariantViolation, id + " body is not a proper induced subtree of its head");
    }
    rule.body_code = canonical_code(rule.body);
    rule.head_code = canonical_code(rule.head);
    rules.push_back(std::move(rule));
  }
  return RuleSet(std::move(rules));
}

RuleIndex RuleIndex::build(const RuleSet& rules) {
  RuleIndex index;
  for (std::uint32_t i = 0; i < rules.size(); ++i) {
    const auto& head = rules[i].head;
    std::set<std::string> labels;
    for (NodeId n = 0; n < head.size(); ++n) labels.insert(head.label(n));
    for (const auto& label : labels) index.buckets_[label].push_back(i);
  }
  return index;
}

std::span<const std::uint32_t> RuleIndex::lookup(std::string_view label) const {
  const auto it = buckets_.find(label);
  if (it == buckets_.end()) return {};
  return it->second;
}

std::string RuleIndex::to_text() const {
  std::string out;
  for (const auto& [label, ids] : buckets_) {
    out += label;
    out += '\t';
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) out += ',';
      out += RuleSet::id_of(ids[i]);
    }
    out += '\n';
  }
  return out;
}

RuleIndex RuleIndex::parse(std::string_view text) {
  RuleIndex index;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto where = "index line " + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) schema(where + " lacks 'label<TAB>ids'");
    std::vector<std::uint32_t> ids;
    auto rest = line.substr(tab + 1);
    for (;;) {
      const auto comma = rest.find(',');
      const auto item = rest.substr(0, comma);
      std::uint32_t id = 0;
      if (!item.starts_with("rule")) schema(where + " has a malformed rule id");
      const auto [end, ec] = std::from_chars(item.data() + 4, item.data() + item.size(), id);
      if (ec != std::errc() || end != item.data() + item.size()) schema(where + " has a malformed rule id");
      if (!ids.empty() && id <= ids.back()) schema(where + " rule ids are not ascending");
      ids.push_back(id);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (!index.buckets_.emplace(std::string(line.substr(0, tab)), std::move(ids)).second) {
      schema(where + " repeats a label");
    }
  }
  return index;
}

}  // namespace wsids
