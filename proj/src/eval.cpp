#include "wsids/eval.hpp"

#include <json.hpp>

#include "wsids/corpus.hpp"
#include "wsids/error.hpp"
#include "wsids/soap.hpp"
#include "wsids/xml.hpp"

namespace wsids {

using nlohmann::json;

double detection_rate(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) throw Error(ErrorKind::UndefinedMetric, "detection rate needs at least one attack");
  return 100.0 * static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double false_alarm_rate(const ConfusionCounts& c) {
  if (c.fp + c.tn == 0) throw Error(ErrorKind::UndefinedMetric, "false alarm rate needs at least one normal sample");
  return 100.0 * static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
}

Metrics compute_metrics(const ConfusionCounts& c) {
  Metrics m;
  if (c.tp + c.fn > 0) m.detection_rate = detection_rate(c);
  if (c.fp + c.tn > 0) m.false_alarm_rate = false_alarm_rate(c);
  return m;
}

void ExperimentPlan::validate() const {
  if (training_sizes.empty()) throw Error(ErrorKind::ConfigError, "training_sizes is empty");
  for (std::size_t i = 0; i < training_sizes.size(); ++i) {
    if (training_sizes[i] == 0) throw Error(ErrorKind::ConfigError, "training sizes must be positive");
    if (i && training_sizes[i] <= training_sizes[i - 1]) {
      throw Error(ErrorKind::ConfigError, "training sizes must be strictly increasing");
    }
  }
  if (repeats < 1) throw Error(ErrorKind::ConfigError, "repeats must be at least 1");
}

namespace {

std::optional<double> mean(const std::vector<std::optional<double>>& values) {
  double sum = 0;
  for (const auto& v : values) {
    if (!v) return std::nullopt;
    sum += *v;
  }
  return values.empty() ? std::nullopt : std::optional<double>(sum / static_cast<double>(values.size()));
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : "N/A"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaViolation, what); }

}  // namespace

ResultsTable run_experiment(const ExperimentPlan& plan, const TrainParams& train_params,
                            const DetectorConfig& detector, const Progress& progress) {
  plan.validate();
  detector.validate();
  const CategoryGraph graph = gen_graph(plan.seed, plan.n_categories, plan.max_branching);
  const ParseOptions parse{detector.attributes_as_leaves, 0, 0};
  const SoapMode mode = detector.strict_soap ? SoapMode::Strict : SoapMode::Lax;

  ResultsTable table;
  for (std::size_t size : plan.training_sizes) {
    ResultRow row;
    row.n_train = size;
    row.n_attacks = plan.n_attacks;
    table.rows.push_back(std::move(row));
  }
  std::vector<std::vector<std::optional<double>>> drs(table.rows.size()), fars(table.rows.size());

  for (std::size_t r = 0; r < plan.repeats; ++r) {
    CorpusParams cp;
    cp.seed = plan.seed;
    cp.n_categories = plan.n_categories;
    cp.max_branching = plan.max_branching;
    cp.n_train = plan.training_sizes.back();
    cp.n_normal_test = plan.n_normal_test;
    cp.n_attack = plan.n_attacks;
    cp.with_responses = plan.with_responses;
    cp.repeat = r;
    const Corpus corpus = gen_corpus(graph, cp);

    Forest all;
    for (const auto& file : corpus.train) {
      all.push_back(Document{file.name, preprocess(parse_document(file.xml, parse), mode)});
    }

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      auto& row = table.rows[i];
      const std::string where = "n_train=" + std::to_string(row.n_train) + " repeat=" + std::to_string(r);
      if (progress) progress(where);
      const Forest forest(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(row.n_train));
      TrainedModel trained;
      try {
        trained = train(forest, train_params);
      } catch (const Error& e) {
        throw Error(ErrorKind::PipelineFailure, where + " train: " + e.what());
      }
      ConfusionCounts counts;
      try {
        const DetectionModel model(std::move(trained.rules), std::move(trained.index), std::move(trained.profile),
                                   detector);
        row.rules.push_back(model.rules().size());
        for (const auto& file : corpus.test_attack) {
          (classify(model, file.xml).alarm() ? counts.tp : counts.fn) += 1;
        }
        for (const auto& file : corpus.test_normal) {
          (classify(model, file.xml).alarm() ? counts.fp : counts.tn) += 1;
        }
      } catch (const Error& e) {
        throw Error(ErrorKind::PipelineFailure, where + " test: " + e.what());
      }
      const Metrics m = compute_metrics(counts);
      drs[i].push_back(m.detection_rate);
      fars[i].push_back(m.false_alarm_rate);
      row.counts.push_back(counts);
    }
  }

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& row = table.rows[i];
    double total = 0;
    for (auto n : row.rules) total += static_cast<double>(n);
    row.n_rules = total / static_cast<double>(row.rules.size());
    row.detection_rate = mean(drs[i]);
    row.false_alarm_rate = mean(fars[i]);
  }
  return table;
}

std::string results_csv(const ResultsTable& table) {
  std::string out = "n_train,n_rules,n_attacks,detection_rate_pct,false_alarm_rate_pct\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.n_train) + ',' + format_real(row.n_rules) + ',' + std::to_string(row.n_attacks) + ',' +
           cell(row.detection_rate) + ',' + cell(row.false_alarm_rate) + '\n';
  }
  return out;
}

std::string results_json(const ResultsTable& table, const RunInfo& info) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json counts = json::array();
    for (const auto& c : row.counts) counts.push_back({{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}});
    rows.push_back({{"n_train", row.n_train},
                    {"n_rules", row.n_rules},
                    {"n_attacks", row.n_attacks},
                    {"detection_rate_pct", opt_json(row.detection_rate)},
                    {"false_alarm_rate_pct", opt_json(row.false_alarm_rate)},
                    {"counts", std::move(counts)},
                    {"rules", row.rules}});
  }
  json config = json::object();
  for (const auto& [k, v] : info.config) config[k] = v;
  const json out = {{"version", info.version}, {"config", std::move(config)}, {"rows", std::move(rows)}};
  return out.dump(2) + "\n";
}

ResultsTable parse_results_json(std::string_view text) {
  ResultsTable table;
  try {
    const json doc = json::parse(text);
    for (const auto& r : doc.at("rows")) {
      ResultRow row;
      row.n_train = r.at("n_train").get<std::size_t>();
      row.n_rules = r.at("n_rules").get<double>();
      row.n_attacks = r.at("n_attacks").get<std::size_t>();
      if (!r.at("detection_rate_pct").is_null()) row.detection_rate = r.at("detection_rate_pct").get<double>();
      if (!r.at("false_alarm_rate_pct").is_null()) row.false_alarm_rate = r.at("false_alarm_rate_pct").get<double>();
      for (const auto& c : r.at("counts")) {
        row.counts.push_back({c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                              c.at("tn").get<std::size_t>(), c.at("fn").get<std::size_t>()});
      }
      row.rules = r.at("rules").get<std::vector<std::size_t>>();
      table.rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    schema(std::string("results JSON: ") + e.what());
  }
  return table;
}

std::string plot_data(const ResultsTable& table) {
  std::string out = "# n_train detection_rate_pct false_alarm_rate_pct\n";
  for (const auto& row : table.rows) {
    out += std::to_string(row.n_train) + ' ' + cell(row.detection_rate) + ' ' + cell(row.false_alarm_rate) + '\n';
  }
  return out;
}

void write_results(const std::filesystem::path& dir, const ResultsTable& table, const RunInfo& info) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "results.csv", results_csv(table));
  write_file(dir / "results.json", results_json(table, info));
  write_file(dir / "plot.dat", plot_data(table));
}

}  // namespace wsids
