#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/profile.hpp"
#include "wsids/rules.hpp"

namespace wsids {

struct DetectorConfig {
  // true: every node must be covered by an occurring rule head.
  // false: one covered node is enough.
  bool coverage_required = true;
  // Alarm when a rule with at least implication_minconf has its body but not
  // its head in the message.
  bool implication_check = true;
  double implication_minconf = 0.8;
  std::size_t max_depth = 64;
  std::size_t max_nodes = 10000;
  bool strict_soap = true;
  bool attributes_as_leaves = false;

  // Throws ConfigError.
  void validate() const;
  ParseOptions parse_options() const;
};

enum class Outcome { Allow, StructuralAlarm, ContentAlarm, ParseAlarm };

std::string_view to_string(Outcome outcome) noexcept;
// Throws InvalidArgument.
Outcome parse_outcome(std::string_view text);

struct Reason {
  std::string where;  // node path, rule id or "message"
  std::string why;

  friend bool operator==(const Reason&, const Reason&) = default;
};

struct Verdict {
  Outcome outcome = Outcome::Allow;
  std::vector<Reason> reasons;

  bool alarm() const noexcept { return outcome != Outcome::Allow; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

class DetectionModel {
 public:
  // Throws InvariantViolation if `index` is not the index of `rules`.
  DetectionModel(RuleSet rules, RuleIndex index, ContentProfile profile, DetectorConfig config);
  DetectionModel(RuleSet rules, ContentProfile profile, DetectorConfig config);

  const RuleSet& rules() const noexcept { return rules_; }
  const RuleIndex& index() const noexcept { return index_; }
  const ContentProfile& profile() const noexcept { return profile_; }
  const DetectorConfig& config() const noexcept { return config_; }

  // Distinct rule heads and bodies; rule i uses head head_of(i), body body_of(i).
  const std::vector<LabeledTree>& heads() const noexcept { return heads_; }
  const std::vector<LabeledTree>& bodies() const noexcept { return bodies_; }
  std::uint32_t head_of(std::size_t rule) const { return head_of_[rule]; }
  std::uint32_t body_of(std::size_t rule) const { return body_of_[rule]; }

 private:
  RuleSet rules_;
  RuleIndex index_;
  ContentProfile profile_;
  DetectorConfig config_;
  std::vector<LabeledTree> heads_;
  std::vector<LabeledTree> bodies_;
  std::vector<std::uint32_t> head_of_;
  std::vector<std::uint32_t> body_of_;
};

// The index is rebuilt from the rules when `index_file` does not exist.
// Throws IoFailure, SchemaViolation or InvariantViolation.
DetectionModel load_model(const std::filesystem::path& rules_file, const std::filesystem::path& index_file,
                          const std::filesystem::path& profile_file, const DetectorConfig& config);
// rules.xml, index.tsv and profile.tsv inside `dir`.
DetectionModel load_model_dir(const std::filesystem::path& dir, const DetectorConfig& config);

inline constexpr std::string_view kRulesFile = "rules.xml";
inline constexpr std::string_view kIndexFile = "index.tsv";
inline constexpr std::string_view kProfileFile = "profile.tsv";
inline constexpr std::string_view kReportFile = "train-report.json";

Verdict classify(const DetectionModel& model, std::string_view xml);
// Throws ModelNotLoaded when `model` is empty.
Verdict classify(const std::shared_ptr<const DetectionModel>& model, std::string_view xml);

struct NodeReport {
  NodeId id = 0;
  std::string path;
  std::vector<std::uint32_t> candidates;  // rule ids from the index
  std::vector<std::uint32_t> covering;    // candidates whose head occurs over this node
  std::optional<MatchResult> content;     // leaves only
  std::string pattern;                    // profile pattern consulted, if any
};

struct ExplainReport {
  std::optional<Reason> parse_failure;
  bool coverage_required = true;
  std::vector<NodeReport> nodes;
  std::vector<std::uint32_t> implication_violations;  // rule ids
};

ExplainReport explain(const DetectionModel& model, std::string_view xml);
ExplainReport explain(const std::shared_ptr<const DetectionModel>& model, std::string_view xml);

// The verdict classify returns for the same message.
Verdict derive_verdict(const ExplainReport& report);

// {"file":..,"outcome":..,"reasons":[{"where":..,"why":..}]}, no newline.
std::string verdict_json(std::string_view file, const Verdict& verdict);
std::string report_json(const ExplainReport& report);

}  // namespace wsids
