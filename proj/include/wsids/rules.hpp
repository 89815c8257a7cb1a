#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/canonical.hpp"
#include "wsids/forest.hpp"
#include "wsids/miner.hpp"
#include "wsids/tree.hpp"

namespace wsids {

// Tree-based association rule body => head: if the body tree occurs, the
// larger head tree is likely to occur as well.
struct TreeRule {
  LabeledTree body;
  LabeledTree head;
  double confidence = 0.0;  // support(head) / support(body)
  std::size_t support = 0;  // support(head)
  CanonicalCode body_code;
  CanonicalCode head_code;
};

struct RuleParams {
  std::size_t minsup = 0;
  double minconf = 0.0;
};

// Rules are addressed as rule0, rule1, ... by position.
class RuleSet {
 public:
  RuleSet() = default;
  // Throws InvariantViolation on a duplicate (body, head) pair.
  explicit RuleSet(std::vector<TreeRule> rules, std::optional<RuleParams> params = std::nullopt);

  const std::vector<TreeRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  const TreeRule& operator[](std::size_t i) const { return rules_[i]; }
  const std::optional<RuleParams>& params() const noexcept { return params_; }

  static std::string id_of(std::size_t i) { return "rule" + std::to_string(i); }

 private:
  std::vector<TreeRule> rules_;
  std::optional<RuleParams> params_;
};

struct ExtractOptions {
  double minconf = 0.5;
  // Bodies are connected subtrees of the head with at most this many nodes,
  // plus every sub-pattern obtained by pruning a single leaf.
  std::size_t body_size_cap = 10;
  // Recorded in RuleSet::params; not used for filtering.
  std::size_t minsup = 0;
};

// `closed` must be the closed pattern set mined from `forest`. Body supports
// are reconstructed from it (the largest support of a closed super-pattern);
// the forest is scanned only when no closed pattern contains a body.
// Throws InvalidConfidence when minconf is outside (0, 1].
RuleSet extract_rules(const PatternSet& closed, const Forest& forest, const ExtractOptions& options);

// <rules><rule0><Cs>..</Cs><S>..</S><confidence>..</confidence>
// <support>..</support></rule0>...</rules>, indented by two spaces.
std::string serialize_rules(const RuleSet& rules);

// Throws SchemaViolation for layout problems and InvariantViolation when a
// body is not a proper induced subtree of its head or a confidence lies
// outside (0, 1].
RuleSet parse_rules(std::string_view xml);

// Shortest decimal text that reads back to the same double ("0.5", "1").
std::string format_real(double value);

// Element label -> ids of the rules whose head contains that label.
class RuleIndex {
 public:
  RuleIndex() = default;

  static RuleIndex build(const RuleSet& rules);

  std::span<const std::uint32_t> lookup(std::string_view label) const;
  const std::map<std::string, std::vector<std::uint32_t>, std::less<>>& buckets() const noexcept {
    return buckets_;
  }

  // One "label<TAB>rule0,rule3" line per label, sorted by label.
  std::string to_text() const;
  // Throws SchemaViolation.
  static RuleIndex parse(std::string_view text);

  friend bool operator==(const RuleIndex&, const RuleIndex&) = default;

 private:
  std::map<std::string, std::vector<std::uint32_t>, std::less<>> buckets_;
};

}  // namespace wsids
