#include "wsids/detector.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "wsids/error.hpp"
#include "wsids/forest.hpp"
#include "wsids/match.hpp"
#include "wsids/soap.hpp"
#include "wsids/xml.hpp"

namespace wsids {

namespace fs = std::filesystem;
using nlohmann::json;

void DetectorConfig::validate() const {
  if (!(implication_minconf > 0.0 && implication_minconf <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "implication_minconf must lie in (0, 1]");
  }
  if (max_depth < 1) throw Error(ErrorKind::ConfigError, "max_depth must be positive");
  if (max_nodes < 1) throw Error(ErrorKind::ConfigError, "max_nodes must be positive");
}

ParseOptions DetectorConfig::parse_options() const {
  return ParseOptions{attributes_as_leaves, max_depth, max_nodes};
}

std::string_view to_string(Outcome outcome) noexcept {
  switch (outcome) {
    case Outcome::Allow: return "Allow";
    case Outcome::StructuralAlarm: return "StructuralAlarm";
    case Outcome::ContentAlarm: return "ContentAlarm";
    case Outcome::ParseAlarm: return "ParseAlarm";
  }
  return "?";
}

Outcome parse_outcome(std::string_view text) {
  for (Outcome o : {Outcome::Allow, Outcome::StructuralAlarm, Outcome::ContentAlarm, Outcome::ParseAlarm}) {
    if (to_string(o) == text) return o;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown outcome '" + std::string(text) + "'");
}

namespace {

std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids, std::vector<LabeledTree>& trees,
                     const CanonicalCode& code, const LabeledTree& tree) {
  const auto [it, fresh] = ids.try_emplace(code.str(), static_cast<std::uint32_t>(trees.size()));
  if (fresh) trees.push_back(tree);
  return it->second;
}

}  // namespace

DetectionModel::DetectionModel(RuleSet rules, RuleIndex index, ContentProfile profile, DetectorConfig config)
    : rules_(std::move(rules)), index_(std::move(index)), profile_(std::move(profile)), config_(config) {
  config_.validate();
  if (!(index_ == RuleIndex::build(rules_))) {
    throw Error(ErrorKind::InvariantViolation, "rule index does not match the rule set");
  }
  std::unordered_map<std::string, std::uint32_t> head_ids;
  std::unordered_map<std::string, std::uint32_t> body_ids;
  for (const auto& rule : rules_.rules()) {
    head_of_.push_back(intern(head_ids, heads_, rule.head_code, rule.head));
    body_of_.push_back(intern(body_ids, bodies_, rule.body_code, rule.body));
  }
}

DetectionModel::DetectionModel(RuleSet rules, ContentProfile profile, DetectorConfig config)
    : DetectionModel(rules, RuleIndex::build(rules), std::move(profile), config) {}

DetectionModel load_model(const fs::path& rules_file, const fs::path& index_file, const fs::path& profile_file,
                          const DetectorConfig& config) {
  RuleSet rules = parse_rules(read_file(rules_file));
  std::error_code ec;
  RuleIndex index = fs::exists(index_file, ec) ? RuleIndex::parse(read_file(index_file)) : RuleIndex::build(rules);
  ContentProfile profile = ContentProfile::parse(read_file(profile_file));
  return DetectionModel(std::move(rules), std::move(index), std::move(profile), config);
}

DetectionModel load_model_dir(const fs::path& dir, const DetectorConfig& config) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::IoFailure, "model directory not found: " + dir.string());
  return load_model(dir / kRulesFile, dir / kIndexFile, dir / kProfileFile, config);
}

namespace {

struct Parsed {
  LabeledTree tree;
  std::optional<Reason> failure;
};

Parsed parse_message(const DetectionModel& model, std::string_view xml) {
  Parsed out;
  try {
    out.tree = preprocess(parse_document(xml, model.config().parse_options()),
                          model.config().strict_soap ? SoapMode::Strict : SoapMode::Lax);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::MalformedXml:
      case ErrorKind::LimitExceeded:
      case ErrorKind::NotSoap:
        out.failure = Reason{"message", e.what()};
        break;
      default:
        throw;
    }
  }
  return out;
}

// Per-message memo of where each distinct head and body occurs.
class Occurrences {
 public:
  Occurrences(const DetectionModel& model, const LabeledTree& tree)
      : model_(model), tree_(tree), covers_(model.heads().size()), bodies_(model.bodies().size(), -1) {}

  const std::vector<bool>& cover(std::uint32_t head) {
    auto& slot = covers_[head];
    if (!slot) {
      const auto& h = model_.heads()[head];
      slot = h.size() <= tree_.size() ? occurrence_cover(tree_, h) : std::vector<bool>(tree_.size(), false);
    }
    return *slot;
  }

  bool head_occurs(std::uint32_t head) {
    const auto& c = cover(head);
    return std::find(c.begin(), c.end(), true) != c.end();
  }

  bool body_occurs(std::uint32_t body) {
    auto& slot = bodies_[body];
    if (slot < 0) {
      const auto& b = model_.bodies()[body];
      slot = b.size() <= tree_.size() && contains_induced(tree_, b) ? 1 : 0;
    }
    return slot == 1;
  }

 private:
  const DetectionModel& model_;
  const LabeledTree& tree_;
  std::vector<std::optional<std::vector<bool>>> covers_;
  std::vector<int> bodies_;
};

std::vector<std::uint32_t> implication_violations(const DetectionModel& model, Occurrences& occ) {
  std::vector<std::uint32_t> out;
  if (!model.config().implication_check) return out;
  const auto& rules = model.rules();
  for (std::uint32_t r = 0; r < rules.size(); ++r) {
    if (rules[r].confidence < model.config().implication_minconf) continue;
    if (occ.body_occurs(model.body_of(r)) && !occ.head_occurs(model.head_of(r))) out.push_back(r);
  }
  return out;
}

std::string pattern_for(const DetectionModel& model, const std::string& path) {
  const auto& entries = model.profile().entries();
  const auto it = entries.find(path);
  return it == entries.end() ? std::string() : it->second.pattern.pattern;
}

// A leaf without text passes where training never saw text either.
MatchResult leaf_content(const DetectionModel& model, const std::string& path, const std::optional<std::string>& text) {
  if (!text && !model.profile().entries().contains(path)) return MatchResult::Match;
  return model.profile().match(path, text.value_or(""));
}

Reason uncovered_reason(const std::string& path) { return {path, "no occurring rule head covers this node"}; }

Reason nothing_covered_reason() { return {"message", "no node is covered by an occurring rule head"}; }

Reason implication_reason(std::uint32_t rule) {
  return {RuleSet::id_of(rule), "rule body occurs but its head does not"};
}

Reason content_reason(const std::string& path, MatchResult result, const std::string& pattern) {
  if (result == MatchResult::UnknownPath) return {path, "no content pattern was learned for this path"};
  return {path, "value does not match " + pattern};
}

Verdict alarm(Outcome outcome, std::vector<Reason> reasons) { return Verdict{outcome, std::move(reasons)}; }

}  // namespace

Verdict classify(const DetectionModel& model, std::string_view xml) {
  Parsed parsed = parse_message(model, xml);
  if (parsed.failure) return alarm(Outcome::ParseAlarm, {*parsed.failure});
  const LabeledTree& tree = parsed.tree;
  Occurrences occ(model, tree);

  std::vector<Reason> structural;
  std::size_t covered = 0;
  for (NodeId n = 0; n < tree.size(); ++n) {
    bool explained = false;
    for (std::uint32_t r : model.index().lookup(tree.label(n))) {
      if (occ.cover(model.head_of(r))[n]) {
        explained = true;
        break;
      }
    }
    if (explained) {
      ++covered;
    } else if (model.config().coverage_required) {
      structural.push_back(uncovered_reason(tree.path_to(n).joined()));
    }
  }
  if (!model.config().coverage_required && covered == 0) structural.push_back(nothing_covered_reason());
  for (std::uint32_t r : implication_violations(model, occ)) structural.push_back(implication_reason(r));
  if (!structural.empty()) return alarm(Outcome::StructuralAlarm, std::move(structural));

  std::vector<Reason> content;
  for (NodeId n = 0; n < tree.size(); ++n) {
    if (!tree.is_leaf(n)) continue;
    const std::string path = tree.path_to(n).joined();
    const MatchResult m = leaf_content(model, path, tree.text(n));
    if (m != MatchResult::Match) content.push_back(content_reason(path, m, pattern_for(model, path)));
  }
  if (!content.empty()) return alarm(Outcome::ContentAlarm, std::move(content));
  return {};
}

Verdict classify(const std::shared_ptr<const DetectionModel>& model, std::string_view xml) {
  if (!model) throw Error(ErrorKind::ModelNotLoaded, "no detection model loaded");
  return classify(*model, xml);
}

ExplainReport explain(const DetectionModel& model, std::string_view xml) {
  ExplainReport report;
  report.coverage_required = model.config().coverage_required;
  Parsed parsed = parse_message(model, xml);
  if (parsed.failure) {
    report.parse_failure = std::move(parsed.failure);
    return report;
  }
  const LabeledTree& tree = parsed.tree;
  Occurrences occ(model, tree);
  for (NodeId n = 0; n < tree.size(); ++n) {
    NodeReport node;
    node.id = n;
    node.path = tree.path_to(n).joined();
    const auto candidates = model.index().lookup(tree.label(n));
    node.candidates.assign(candidates.begin(), candidates.end());
    for (std::uint32_t r : node.candidates) {
      if (occ.cover(model.head_of(r))[n]) node.covering.push_back(r);
    }
    if (tree.is_leaf(n)) {
      node.content = leaf_content(model, node.path, tree.text(n));
      node.pattern = pattern_for(model, node.path);
    }
    report.nodes.push_back(std::move(node));
  }
  report.implication_violations = implication_violations(model, occ);
  return report;
}

ExplainReport explain(const std::shared_ptr<const DetectionModel>& model, std::string_view xml) {
  if (!model) throw Error(ErrorKind::ModelNotLoaded, "no detection model loaded");
  return explain(*model, xml);
}

Verdict derive_verdict(const ExplainReport& report) {
  if (report.parse_failure) return alarm(Outcome::ParseAlarm, {*report.parse_failure});

  std::vector<Reason> structural;
  const bool any_covered = std::any_of(report.nodes.begin(), report.nodes.end(),
                                       [](const NodeReport& n) { return !n.covering.empty(); });
  if (report.coverage_required) {
    for (const auto& node : report.nodes) {
      if (node.covering.empty()) structural.push_back(uncovered_reason(node.path));
    }
  } else if (!any_covered) {
    structural.push_back(nothing_covered_reason());
  }
  for (std::uint32_t r : report.implication_violations) structural.push_back(implication_reason(r));
  if (!structural.empty()) return alarm(Outcome::StructuralAlarm, std::move(structural));

  std::vector<Reason> content;
  for (const auto& node : report.nodes) {
    if (node.content && *node.content != MatchResult::Match) {
      content.push_back(content_reason(node.path, *node.content, node.pattern));
    }
  }
  if (!content.empty()) return alarm(Outcome::ContentAlarm, std::move(content));
  return {};
}

std::string verdict_json(std::string_view file, const Verdict& verdict) {
  json reasons = json::array();
  for (const auto& r : verdict.reasons) reasons.push_back({{"where", r.where}, {"why", r.why}});
  json line = {{"file", file}, {"outcome", to_string(verdict.outcome)}, {"reasons", std::move(reasons)}};
  return line.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string report_json(const ExplainReport& report) {
  const auto ids = [](const std::vector<std::uint32_t>& v) {
    json out = json::array();
    for (auto r : v) out.push_back(RuleSet::id_of(r));
    return out;
  };
  json nodes = json::array();
  for (const auto& n : report.nodes) {
    json node = {{"id", n.id},
                 {"path", n.path},
                 {"candidates", ids(n.candidates)},
                 {"covering", ids(n.covering)},
                 {"explained", !n.covering.empty()}};
    if (n.content) {
      node["content"] = to_string(*n.content);
      node["pattern"] = n.pattern;
    }
    nodes.push_back(std::move(node));
  }
  const Verdict verdict = derive_verdict(report);
  json out = {{"outcome", to_string(verdict.outcome)},
              {"coverage_required", report.coverage_required},
              {"nodes", std::move(nodes)},
              {"implication_violations", ids(report.implication_violations)}};
  if (report.parse_failure) out["parse_failure"] = report.parse_failure->why;
  return out.dump(2, ' ', false, json::error_handler_t::replace);
}

}  // namespace wsids
