#pragma once

#include <filesystem>
#include <string>

#include "wsids/miner.hpp"
#include "wsids/profile.hpp"
#include "wsids/rules.hpp"

namespace wsids {

struct TrainParams {
  MiningParams mining;
  ExtractOptions rules;
  ProfileParams profile;
};

struct TrainedModel {
  std::size_t documents = 0;
  std::size_t closed_patterns = 0;
  RuleSet rules;
  RuleIndex index;
  ContentProfile profile;
};

// Mine closed patterns, extract rules, index them and profile leaf content.
// Failures are rethrown as PipelineFailure naming the stage.
TrainedModel train(const Forest& forest, const TrainParams& params);

// Writes rules.xml, index.tsv, profile.tsv and the given report into a
// sibling staging directory, then moves it onto `dir` (replacing it).
void write_model_dir(const std::filesystem::path& dir, const TrainedModel& model, const std::string& report);

}  // namespace wsids
