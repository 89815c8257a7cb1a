#include "wsids/config.hpp"

#include <charconv>
#include <functional>
#include <set>

#include "wsids/error.hpp"
#include "wsids/forest.hpp"

namespace wsids {

namespace {

[[noreturn]] void bad(std::string_view key, std::string_view value, const char* expected) {
  throw Error(ErrorKind::ConfigError,
              "invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " + expected + ")");
}

template <typename T>
T parse_int(std::string_view key, std::string_view value) {
  T out{};
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || end != value.data() + value.size()) bad(key, value, "an integer");
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || end != value.data() + value.size()) bad(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad(key, value, "true or false");
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view value) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    auto comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    auto item = value.substr(pos, comma - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(parse_int<std::size_t>(key, item));
    pos = comma + 1;
  }
  return out;
}

std::string show(bool v) { return v ? "true" : "false"; }
std::string show(std::size_t v) { return std::to_string(v); }
std::string show(std::uint64_t v, int) { return std::to_string(v); }
std::string show(double v) { return format_real(v); }

std::string show(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct Entry {
  ConfigKey key;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

#define WSIDS_SIZE(NAME, GROUP, FIELD, HELP)                                                                    \
  Entry {                                                                                                      \
    {NAME, KeyGroup::GROUP, HELP}, [](Config& c, std::string_view v) { c.FIELD = parse_int<std::size_t>(NAME, v); }, \
        [](const Config& c) { return show(static_cast<std::size_t>(c.FIELD)); }                                \
  }
#define WSIDS_BOOL(NAME, GROUP, FIELD, HELP)                                                   \
  Entry {                                                                                     \
    {NAME, KeyGroup::GROUP, HELP}, [](Config& c, std::string_view v) { c.FIELD = parse_bool(NAME, v); }, \
        [](const Config& c) { return show(c.FIELD); }                                          \
  }
#define WSIDS_REAL(NAME, GROUP, FIELD, HELP)                                                   \
  Entry {                                                                                     \
    {NAME, KeyGroup::GROUP, HELP}, [](Config& c, std::string_view v) { c.FIELD = parse_real(NAME, v); }, \
        [](const Config& c) { return show(c.FIELD); }                                          \
  }
#define WSIDS_TEXT(NAME, GROUP, FIELD, HELP)                                                      \
  Entry {                                                                                        \
    {NAME, KeyGroup::GROUP, HELP}, [](Config& c, std::string_view v) { c.FIELD = std::string(v); }, \
        [](const Config& c) { return std::string(c.FIELD); }                                      \
  }

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      Entry{{"seed", KeyGroup::Corpus, "generator seed"},
            [](Config& c, std::string_view v) { c.corpus.seed = parse_int<std::uint64_t>("seed", v); },
            [](const Config& c) { return show(c.corpus.seed, 0); }},
      WSIDS_SIZE("n_categories", Corpus, corpus.n_categories, "categories in the synthetic graph"),
      WSIDS_SIZE("max_branching", Corpus, corpus.max_branching, "most subcategories per category"),
      WSIDS_SIZE("n_train", Corpus, corpus.n_train, "training messages"),
      WSIDS_SIZE("n_normal_test", Corpus, corpus.n_normal_test, "held-out normal requests"),
      WSIDS_SIZE("n_attack", Corpus, corpus.n_attack, "attack requests, kinds assigned round-robin"),
      WSIDS_BOOL("with_responses", Corpus, corpus.with_responses, "make every other training message a response"),

      WSIDS_SIZE("minsup", Training, train.mining.minsup, "minimum document support"),
      WSIDS_SIZE("max_pattern_size", Training, train.mining.max_pattern_size, "node cap for mined patterns, 0 = none"),
      WSIDS_SIZE("max_candidates", Training, train.mining.max_candidates, "candidate budget of the miner"),
      WSIDS_REAL("minconf", Training, train.rules.minconf, "minimum rule confidence in (0, 1]"),
      WSIDS_SIZE("body_size_cap", Training, train.rules.body_size_cap, "node cap for rule bodies, 0 = none"),
      WSIDS_SIZE("literal_limit", Training, train.profile.literal_limit, "distinct values kept literally"),
      WSIDS_SIZE("slack", Training, train.profile.slack, "widening of learned run lengths"),
      WSIDS_SIZE("max_alternatives", Training, train.profile.max_alternatives, "shape alternatives before collapsing"),

      WSIDS_BOOL("coverage_required", Detector, detector.coverage_required,
                 "every node must be covered (false: any node)"),
      WSIDS_BOOL("implication_check", Detector, detector.implication_check, "alarm on a body without its head"),
      WSIDS_REAL("implication_minconf", Detector, detector.implication_minconf, "confidence for the implication check"),
      WSIDS_SIZE("max_depth", Detector, detector.max_depth, "deepest element accepted"),
      WSIDS_SIZE("max_nodes", Detector, detector.max_nodes, "most elements accepted"),
      WSIDS_BOOL("strict_soap", Detector, detector.strict_soap, "reject documents whose root is not an Envelope"),
      WSIDS_BOOL("attributes_as_leaves", Detector, detector.attributes_as_leaves, "model attributes as @name leaves"),

      Entry{{"training_sizes", KeyGroup::Experiment, "comma-separated training sizes"},
            [](Config& c, std::string_view v) { c.training_sizes = parse_list("training_sizes", v); },
            [](const Config& c) { return show(c.training_sizes); }},
      WSIDS_SIZE("repeats", Experiment, repeats, "training compositions averaged per size"),

      WSIDS_TEXT("listen_host", Gateway, gateway.listen_host, "address to listen on"),
      Entry{{"listen_port", KeyGroup::Gateway, "port to listen on, 0 = any"},
            [](Config& c, std::string_view v) { c.gateway.listen_port = parse_int<int>("listen_port", v); },
            [](const Config& c) { return std::to_string(c.gateway.listen_port); }},
      WSIDS_TEXT("upstream", Gateway, gateway.upstream, "service URL allowed requests go to"),
      Entry{{"model_dir", KeyGroup::Gateway, "trained model directory"},
            [](Config& c, std::string_view v) { c.gateway.model_dir = std::string(v); },
            [](const Config& c) { return c.gateway.model_dir.string(); }},
      Entry{{"reject_status", KeyGroup::Gateway, "HTTP status for rejected requests"},
            [](Config& c, std::string_view v) { c.gateway.reject_status = parse_int<int>("reject_status", v); },
            [](const Config& c) { return std::to_string(c.gateway.reject_status); }},
      Entry{{"alarm_log", KeyGroup::Gateway, "JSON-lines log of rejections"},
            [](Config& c, std::string_view v) { c.gateway.alarm_log = std::string(v); },
            [](const Config& c) { return c.gateway.alarm_log.string(); }},
      WSIDS_SIZE("body_cap", Gateway, gateway.body_cap, "largest request body read, in bytes"),
  };
  return table;
}

#undef WSIDS_SIZE
#undef WSIDS_BOOL
#undef WSIDS_REAL
#undef WSIDS_TEXT

const Entry& find(std::string_view key) {
  for (const auto& e : entries()) {
    if (e.key.name == key) return e;
  }
  throw Error(ErrorKind::ConfigError, "unknown config key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<ConfigKey>& Config::keys() {
  static const std::vector<ConfigKey> out = [] {
    std::vector<ConfigKey> keys;
    for (const auto& e : entries()) keys.push_back(e.key);
    return keys;
  }();
  return out;
}

void Config::set(std::string_view key, std::string_view value) { find(key).set(*this, trim(value)); }

std::string Config::get(std::string_view key) const { return find(key).get(*this); }

void Config::load_text(std::string_view text, const std::string& origin) {
  std::set<std::string> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ConfigError, where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!seen.insert(key).second) throw Error(ErrorKind::ConfigError, where + ": duplicate key " + key);
    try {
      set(key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, where + ": " + e.message());
    }
  }
}

void Config::load_file(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigError, e.what());
  }
  load_text(text, path.string());
}

std::map<std::string, std::string> Config::echo() const {
  std::map<std::string, std::string> out;
  for (const auto& e : entries()) out[e.key.name] = e.get(*this);
  return out;
}

std::string Config::echo_text() const {
  std::string out;
  for (const auto& [k, v] : echo()) out += k + " = " + v + "\n";
  return out;
}

ExperimentPlan Config::experiment() const {
  ExperimentPlan plan;
  plan.training_sizes = training_sizes;
  plan.n_attacks = corpus.n_attack;
  plan.n_normal_test = corpus.n_normal_test;
  plan.repeats = repeats;
  plan.seed = corpus.seed;
  plan.n_categories = corpus.n_categories;
  plan.max_branching = corpus.max_branching;
  plan.with_responses = corpus.with_responses;
  return plan;
}

void Config::validate() const {
  if (corpus.n_categories < 1) throw Error(ErrorKind::ConfigError, "n_categories must be positive");
  if (corpus.max_branching < 1) throw Error(ErrorKind::ConfigError, "max_branching must be positive");
  if (train.mining.minsup < 1) throw Error(ErrorKind::ConfigError, "minsup must be at least 1");
  if (train.mining.max_candidates < 1) throw Error(ErrorKind::ConfigError, "max_candidates must be positive");
  if (!(train.rules.minconf > 0.0 && train.rules.minconf <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "minconf must lie in (0, 1]");
  }
  if (train.profile.max_alternatives < 1) throw Error(ErrorKind::ConfigError, "max_alternatives must be positive");
  detector.validate();
  experiment().validate();
}

}  // namespace wsids
