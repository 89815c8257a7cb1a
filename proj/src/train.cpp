#include "wsids/train.hpp"

#include "wsids/detector.hpp"
#include "wsids/error.hpp"

namespace wsids {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const char* name, F&& run) {
  try {
    return run();
  } catch (const Error& e) {
    throw Error(ErrorKind::PipelineFailure, std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

TrainedModel train(const Forest& forest, const TrainParams& params) {
  TrainedModel out;
  out.documents = forest.size();
  const PatternSet closed = stage("mine", [&] { return mine_closed(forest, params.mining); });
  out.closed_patterns = closed.size();
  ExtractOptions extract = params.rules;
  extract.minsup = params.mining.minsup;
  out.rules = stage("rules", [&] { return extract_rules(closed, forest, extract); });
  out.index = RuleIndex::build(out.rules);
  out.profile = stage("profile", [&] { return build_profile(forest, params.profile); });
  return out;
}

void write_model_dir(const fs::path& dir, const TrainedModel& model, const std::string& report) {
  const fs::path staging = dir.string() + ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  if (!fs::create_directories(staging, ec) || ec) {
    throw Error(ErrorKind::IoFailure, "cannot create " + staging.string());
  }
  write_file(staging / kRulesFile, serialize_rules(model.rules));
  write_file(staging / kIndexFile, model.index.to_text());
  write_file(staging / kProfileFile, model.profile.to_text());
  write_file(staging / kReportFile, report);
  fs::remove_all(dir, ec);
  fs::rename(staging, dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot move model into " + dir.string() + ": " + ec.message());
}

}  // namespace wsids
