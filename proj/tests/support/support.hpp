#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/canonical.hpp"
#include "wsids/corpus.hpp"
#include "wsids/detector.hpp"
#include "wsids/error.hpp"
#include "wsids/forest.hpp"
#include "wsids/rules.hpp"
#include "wsids/train.hpp"
#include "wsids/tree.hpp"

namespace wsids::test {

// "a{b,c{d}}" builds a with children b and c, c with child d. A leaf may carry
// text: b="x". Labels run up to one of { } , = or whitespace.
LabeledTree tree(std::string_view dsl);
// Inverse of tree(), in stored child order.
std::string dsl(const LabeledTree& t);

Forest forest(std::initializer_list<std::string_view> dsls);

// Random tree of 1..max_nodes nodes with labels drawn from the first
// `alphabet` letters; parents are chosen uniformly among earlier nodes.
LabeledTree random_tree(Rng& rng, std::size_t max_nodes, std::size_t alphabet);
// 1..max_docs documents named d0, d1, ...
Forest random_forest(Rng& rng, std::size_t max_docs, std::size_t max_nodes, std::size_t alphabet);
// Random rule set whose bodies are proper induced subtrees of their heads.
RuleSet random_rule_set(Rng& rng, std::size_t max_rules);
// Printable ASCII, spaces and the occasional multi-byte UTF-8 character.
std::string random_text(Rng& rng, std::size_t max_len);

// Parsed and preprocessed corpus files.
Forest forest_of(const std::vector<CorpusFile>& files);

// The default corpus and the model trained on it with default settings,
// built once per process.
struct CorpusModel {
  Corpus corpus;
  TrainedModel trained;
};
const CorpusModel& corpus_model();

DetectionModel detection_model(const TrainedModel& trained, const DetectorConfig& config = {});

// Kind of the Error that f throws, or nullopt when it returns normally.
template <class F>
std::optional<ErrorKind> thrown(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the wsids CLI with `args` (shell words, already quoted as needed).
RunResult run_cli(const std::string& args);

std::vector<std::string> lines(std::string_view text);

}  // namespace wsids::test
