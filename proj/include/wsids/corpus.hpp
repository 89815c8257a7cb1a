#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wsids {

// Seeded generator with a portable uniform mapping (std distributions differ
// between standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool chance(std::uint64_t numerator, std::uint64_t denominator) { return below(denominator) < numerator; }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent seed for item `index` of `stream`.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

struct CategoryGraph {
  std::string root;
  std::vector<std::string> categories;  // breadth-first, root first
  std::map<std::string, std::vector<std::string>> children;

  bool contains(std::string_view name) const { return children.find(std::string(name)) != children.end(); }
  // Throws UnknownCategory.
  const std::vector<std::string>& children_of(std::string_view name) const;
  // "parent<TAB>child" per edge, breadth-first.
  std::string to_tsv() const;
};

// Tree-shaped category graph rooted at "Contents" with names such as
// "Natural_language_processing". Throws InvalidArgument when n_categories or
// max_branching is zero.
CategoryGraph gen_graph(std::uint64_t seed, std::size_t n_categories, std::size_t max_branching);

// GetWikiSubCategory request for `category`. The seed decides whether a SOAP
// Header with a message id is present. Throws UnknownCategory.
std::string gen_normal_request(const CategoryGraph& graph, const std::string& category, std::uint64_t seed,
                               bool allow_header = true);

// Response listing the subcategories of `category` down to three levels below
// it, nested inside Envelope/Body/GetWikiSubCategory. Throws UnknownCategory.
std::string gen_normal_response(const CategoryGraph& graph, const std::string& category);

inline constexpr std::size_t kResponseDepth = 3;

enum class AttackKind { CoerciveParsing, OversizePayload, RecursivePayload, SqlXmlInjection, UnknownMutation };

inline constexpr AttackKind kAttackKinds[] = {AttackKind::RecursivePayload, AttackKind::OversizePayload,
                                              AttackKind::CoerciveParsing, AttackKind::SqlXmlInjection,
                                              AttackKind::UnknownMutation};

std::string_view to_string(AttackKind kind);
// Throws UnsupportedKind.
AttackKind parse_attack_kind(std::string_view name);

struct AttackSpec {
  AttackKind kind = AttackKind::RecursivePayload;
  std::uint64_t seed = 0;
  // Nesting depth; 0 picks the kind's default (500 recursive, 40 coercive).
  std::size_t depth = 0;
  // Repeated elements for OversizePayload.
  std::size_t size = 20000;
  // Index into injection_payloads(); unset picks one from the seed.
  std::optional<std::size_t> payload;
  // Structural edits for UnknownMutation.
  std::size_t mutations = 2;
  // CoerciveParsing only; unset decides from the seed (one in two).
  std::optional<bool> malformed;
};

inline constexpr int kInjectionPayloadsVersion = 1;
std::span<const std::string_view> injection_payloads();

// Rewrites a normal request. The target of content and nesting attacks is the
// first text leaf of the SOAP Body. Throws UnsupportedKind, or InvalidArgument
// when `base` is not a parseable request.
std::string gen_attack(const AttackSpec& spec, std::string_view base);

struct CorpusParams {
  std::uint64_t seed = 1;
  std::size_t n_categories = 500;
  std::size_t max_branching = 5;
  std::size_t n_train = 300;
  std::size_t n_normal_test = 100;
  std::size_t n_attack = 50;
  // Every odd training message is a response instead of a request.
  bool with_responses = false;
  // Selects disjoint sample streams, so repeats of an experiment see
  // different compositions. Counts are prefixes: growing n_train keeps the
  // earlier files unchanged.
  std::uint64_t repeat = 0;
};

struct CorpusFile {
  std::string name;  // relative path, e.g. "train/train-00000.xml"
  std::string xml;
  std::string label;  // "normal" or an attack kind
};

struct Corpus {
  CategoryGraph graph;
  std::vector<CorpusFile> train;
  std::vector<CorpusFile> test_normal;
  std::vector<CorpusFile> test_attack;
};

Corpus gen_corpus(const CorpusParams& params);
Corpus gen_corpus(const CategoryGraph& graph, const CorpusParams& params);

// train/, test-normal/, test-attack/, labels.tsv and graph.tsv under `dir`.
// Throws IoFailure.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace wsids
