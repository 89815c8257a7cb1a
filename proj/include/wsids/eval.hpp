#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsids/detector.hpp"
#include "wsids/train.hpp"

namespace wsids {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Percentages. Both throw UndefinedMetric on a zero denominator.
double detection_rate(const ConfusionCounts& c);
double false_alarm_rate(const ConfusionCounts& c);

struct Metrics {
  std::optional<double> detection_rate;    // unset when tp + fn == 0
  std::optional<double> false_alarm_rate;  // unset when fp + tn == 0
};

Metrics compute_metrics(const ConfusionCounts& c);

struct ExperimentPlan {
  std::vector<std::size_t> training_sizes{50, 100, 150, 200, 250, 300};
  std::size_t n_attacks = 50;
  std::size_t n_normal_test = 100;
  std::size_t repeats = 2;
  std::uint64_t seed = 1;
  std::size_t n_categories = 500;
  std::size_t max_branching = 5;
  bool with_responses = false;

  // Throws ConfigError.
  void validate() const;
};

struct ResultRow {
  std::size_t n_train = 0;
  double n_rules = 0;  // mean over repeats
  std::size_t n_attacks = 0;
  // Mean of the per-repeat percentages; unset if any repeat is undefined.
  std::optional<double> detection_rate;
  std::optional<double> false_alarm_rate;
  std::vector<ConfusionCounts> counts;  // per repeat
  std::vector<std::size_t> rules;       // per repeat

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct ResultsTable {
  std::vector<ResultRow> rows;

  friend bool operator==(const ResultsTable&, const ResultsTable&) = default;
};

using Progress = std::function<void(const std::string&)>;

// For every repeat, one corpus with disjoint sample streams is generated;
// each training size uses a prefix of its training stream and the same test
// set. Failures become PipelineFailure naming the cell and stage.
ResultsTable run_experiment(const ExperimentPlan& plan, const TrainParams& train_params,
                            const DetectorConfig& detector, const Progress& progress = {});

// n_train,n_rules,n_attacks,detection_rate_pct,false_alarm_rate_pct; undefined
// metrics are written as N/A.
std::string results_csv(const ResultsTable& table);
// Provenance recorded next to the rows.
struct RunInfo {
  std::string version;
  std::map<std::string, std::string> config;
};

std::string results_json(const ResultsTable& table, const RunInfo& info = {});
// Throws SchemaViolation.
ResultsTable parse_results_json(std::string_view text);
// "# n_train detection_rate_pct false_alarm_rate_pct" then one row per size.
std::string plot_data(const ResultsTable& table);

// results.csv, results.json and plot.dat. Throws IoFailure.
void write_results(const std::filesystem::path& dir, const ResultsTable& table, const RunInfo& info = {});

}  // namespace wsids
