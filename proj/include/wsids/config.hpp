#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/corpus.hpp"
#include "wsids/detector.hpp"
#include "wsids/eval.hpp"
#include "wsids/gateway.hpp"
#include "wsids/train.hpp"

namespace wsids {

inline constexpr std::string_view kVersion = "0.1.0";

enum class KeyGroup { Corpus, Training, Detector, Experiment, Gateway };

struct ConfigKey {
  std::string name;
  KeyGroup group;
  std::string help;
};

// Every tunable of the pipeline. Files hold "key = value" lines; '#' starts a
// comment line. Unknown keys and malformed values raise ConfigError.
struct Config {
  CorpusParams corpus;
  TrainParams train;
  DetectorConfig detector;
  std::vector<std::size_t> training_sizes{50, 100, 150, 200, 250, 300};
  std::size_t repeats = 2;
  GatewayConfig gateway;

  static const std::vector<ConfigKey>& keys();

  void set(std::string_view key, std::string_view value);
  void load_text(std::string_view text, const std::string& origin = "config");
  void load_file(const std::filesystem::path& path);

  std::string get(std::string_view key) const;
  // Every key with its current value, sorted by key.
  std::map<std::string, std::string> echo() const;
  std::string echo_text() const;

  ExperimentPlan experiment() const;
  // Checks cross-field constraints of the pipeline keys. Throws ConfigError.
  void validate() const;
};

}  // namespace wsids
