// wsids: train, run and evaluate the tree-rule SOAP anomaly detector.
//
// Settings come from an optional --config file of "key = value" lines; flags
// override it. Exit codes: 0 success (detect: all Allow), 1 detect found an
// alarm, 2 operational error.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsids/config.hpp"
#include "wsids/error.hpp"
#include "wsids/forest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOperationalError = 2;

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

// Flag values given on the command line, applied after the config file.
struct Overrides {
  std::map<std::string, std::string> values;
  std::map<std::string, std::string> aliases;  // applied after `values`

  void add_group(CLI::App* cmd, wsids::KeyGroup group) {
    for (const auto& key : wsids::Config::keys()) {
      if (key.group != group) continue;
      cmd->add_option(flag_name(key.name), values[key.name], key.help);
    }
  }
  void add_alias(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option(flag, aliases[key], help);
  }

  void apply(wsids::Config& config) const {
    for (const auto& [key, value] : values) {
      if (!value.empty()) config.set(key, value);
    }
    for (const auto& [key, value] : aliases) {
      if (!value.empty()) config.set(key, value);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

wsids::SoapMode soap_mode(const wsids::DetectorConfig& d) {
  return d.strict_soap ? wsids::SoapMode::Strict : wsids::SoapMode::Lax;
}

json config_json(const wsids::Config& config) {
  json out = json::object();
  for (const auto& [k, v] : config.echo()) out[k] = v;
  return out;
}

int cmd_gen_corpus(const wsids::Config& config, const fs::path& out) {
  const wsids::Corpus corpus = wsids::gen_corpus(config.corpus);
  wsids::write_corpus(corpus, out);
  std::cerr << "wrote " << corpus.train.size() << " training, " << corpus.test_normal.size() << " normal and "
            << corpus.test_attack.size() << " attack files to " << out.string() << '\n';
  return 0;
}

int cmd_mine(const wsids::Config& config, const fs::path& input, const std::string& out) {
  const wsids::Forest forest =
      wsids::load_forest(input, config.detector.parse_options(), soap_mode(config.detector));
  const std::string text = wsids::format_patterns(wsids::mine_closed(forest, config.train.mining));
  if (out.empty()) {
    std::cout << text;
  } else {
    wsids::write_file(out, text);
  }
  return 0;
}

int cmd_train(const wsids::Config& config, fs::path corpus, const fs::path& out) {
  if (fs::is_directory(corpus / "train")) corpus /= "train";
  const auto start = std::chrono::steady_clock::now();
  const wsids::Forest forest =
      wsids::load_forest(corpus, config.detector.parse_options(), soap_mode(config.detector));
  if (forest.empty()) throw wsids::Error(wsids::ErrorKind::EmptyForest, "no XML files in " + corpus.string());
  const double load_s = seconds_since(start);
  const wsids::TrainedModel model = wsids::train(forest, config.train);
  const json report = {{"version", std::string(wsids::kVersion)},
                       {"config", config_json(config)},
                       {"documents", model.documents},
                       {"closed_patterns", model.closed_patterns},
                       {"rules", model.rules.size()},
                       {"profile_paths", model.profile.entries().size()}};
  wsids::write_model_dir(out, model, report.dump(2) + "\n");
  std::cerr << "trained on " << model.documents << " documents: " << model.closed_patterns << " closed patterns, "
            << model.rules.size() << " rules (load " << load_s << " s, total " << seconds_since(start) << " s)\n";
  return 0;
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (auto& f : wsids::list_xml_files(in)) files.push_back(std::move(f));
    } else if (fs::exists(in)) {
      files.emplace_back(in);
    } else {
      throw wsids::Error(wsids::ErrorKind::IoFailure, "no such input " + in);
    }
  }
  return files;
}

int cmd_detect(const wsids::Config& config, const std::vector<std::string>& inputs, const std::string& output) {
  const wsids::DetectionModel model = wsids::load_model_dir(config.gateway.model_dir, config.detector);
  const auto files = expand_inputs(inputs);
  std::ofstream file;
  if (!output.empty()) {
    file.open(output, std::ios::binary | std::ios::trunc);
    if (!file) throw wsids::Error(wsids::ErrorKind::IoFailure, "cannot write " + output);
  }
  std::ostream& out = output.empty() ? std::cout : file;
  bool any_alarm = false;
  for (const auto& path : files) {
    const wsids::Verdict verdict = wsids::classify(model, wsids::read_file(path));
    any_alarm = any_alarm || verdict.alarm();
    out << wsids::verdict_json(path.string(), verdict) << '\n';
  }
  out.flush();
  if (!out) throw wsids::Error(wsids::ErrorKind::IoFailure, "write failed");
  return any_alarm ? 1 : 0;
}

int cmd_explain(const wsids::Config& config, const std::string& input) {
  const wsids::DetectionModel model = wsids::load_model_dir(config.gateway.model_dir, config.detector);
  const wsids::ExplainReport report = wsids::explain(model, wsids::read_file(input));
  std::cout << wsids::report_json(report) << '\n';
  return wsids::derive_verdict(report).alarm() ? 1 : 0;
}

int cmd_eval(const wsids::Config& config, const fs::path& out) {
  const auto start = std::chrono::steady_clock::now();
  const wsids::ResultsTable table =
      wsids::run_experiment(config.experiment(), config.train, config.detector,
                            [](const std::string& cell) { std::cerr << "eval: " << cell << '\n'; });
  wsids::write_results(out, table, wsids::RunInfo{std::string(wsids::kVersion), config.echo()});
  std::cout << wsids::results_csv(table);
  std::cerr << "eval finished in " << seconds_since(start) << " s\n";
  return 0;
}

int cmd_serve(const wsids::Config& config) {
  config.gateway.validate(config.detector);
  wsids::serve(config.gateway, config.detector);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tree-rule anomaly detector for SOAP requests", "wsids"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(wsids::kVersion));
  std::string config_file;
  app.add_option("--config", config_file, "file of 'key = value' settings; flags override it")
      ->check(CLI::ExistingFile);

  std::string out, input;
  std::vector<std::string> inputs;
  std::map<CLI::App*, Overrides> overrides;
  using G = wsids::KeyGroup;

  auto* gen = app.add_subcommand("gen-corpus", "generate a synthetic corpus");
  gen->add_option("--out", out, "output directory")->required();
  overrides[gen].add_group(gen, G::Corpus);

  auto* mine = app.add_subcommand("mine", "print closed frequent subtrees of a directory of XML files");
  mine->add_option("--input", input, "directory of XML files")->required()->check(CLI::ExistingDirectory);
  mine->add_option("--out", out, "patterns file (default: stdout)");
  overrides[mine].add_group(mine, G::Training);
  overrides[mine].add_group(mine, G::Detector);
  overrides[mine].add_alias(mine, "--max-size", "max_pattern_size", "same as --max-pattern-size");

  auto* train = app.add_subcommand("train", "mine rules and a content profile into a model directory");
  train->add_option("--corpus", input, "directory of XML files, or a corpus with train/")
      ->required()
      ->check(CLI::ExistingDirectory);
  train->add_option("--out", out, "model directory")->required();
  overrides[train].add_group(train, G::Training);
  overrides[train].add_group(train, G::Detector);

  auto* detect = app.add_subcommand("detect", "classify request files; one JSON verdict per line");
  detect->add_option("inputs", inputs, "files or directories")->required();
  detect->add_option("--output", out, "verdict file (default: stdout)");
  overrides[detect].add_group(detect, G::Detector);
  overrides[detect].add_alias(detect, "--model-dir", "model_dir", "trained model directory");

  auto* explain = app.add_subcommand("explain", "show the per-node decision for one request");
  explain->add_option("input", input, "request file")->required();
  overrides[explain].add_group(explain, G::Detector);
  overrides[explain].add_alias(explain, "--model-dir", "model_dir", "trained model directory");

  auto* eval = app.add_subcommand("eval", "run the training-size experiment");
  eval->add_option("--out", out, "results directory")->required();
  for (G g : {G::Corpus, G::Training, G::Detector, G::Experiment}) overrides[eval].add_group(eval, g);

  auto* serve = app.add_subcommand("serve", "run the filtering HTTP gateway");
  overrides[serve].add_group(serve, G::Gateway);
  overrides[serve].add_group(serve, G::Detector);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kOperationalError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    wsids::Config config;
    if (!config_file.empty()) config.load_file(config_file);
    overrides[cmd].apply(config);
    config.validate();

    if (cmd == gen) return cmd_gen_corpus(config, out);
    if (cmd == mine) return cmd_mine(config, input, out);
    if (cmd == train) return cmd_train(config, input, out);
    if (cmd == detect) return cmd_detect(config, inputs, out);
    if (cmd == explain) return cmd_explain(config, input);
    if (cmd == eval) return cmd_eval(config, out);
    if (cmd == serve) return cmd_serve(config);
  } catch (const std::exception& e) {
    std::cerr << "wsids " << cmd->get_name() << ": " << e.what() << '\n';
    return kOperationalError;
  }
  return kOperationalError;
}
