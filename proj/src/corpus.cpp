#include "wsids/corpus.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>

#include "wsids/error.hpp"
#include "wsids/forest.hpp"
#include "wsids/soap.hpp"
#include "wsids/xml.hpp"

namespace wsids {

namespace fs = std::filesystem;

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Rng::below(0)");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::string_view kWords[] = {
    "science",    "history",     "language",     "processing",  "natural",     "machine",      "translation",
    "data",       "mining",      "corpus",       "linguistics", "artificial",  "intelligence", "application",
    "voice",      "technology",  "speech",       "recognition", "synthesis",   "computer",     "network",
    "security",   "music",       "art",          "painting",    "sculpture",   "physics",      "chemistry",
    "biology",    "genetics",    "ecology",      "geology",     "astronomy",   "planet",       "star",
    "galaxy",     "ocean",       "river",        "mountain",    "forest",      "desert",       "city",
    "village",    "culture",     "religion",     "philosophy",  "ethics",      "logic",        "mathematics",
    "algebra",    "geometry",    "topology",     "statistics",  "probability", "economics",    "finance",
    "trade",      "law",         "politics",     "government",  "election",    "war",          "peace",
    "sport",      "football",    "tennis",       "chess",       "game",        "film",         "theatre",
    "dance",      "poetry",      "novel",        "literature",  "grammar",     "phonetics",    "semantics",
    "robotics",   "software",    "hardware",     "database",    "internet",    "protocol",     "medicine",
    "surgery",    "nursing",     "health",       "food",        "cooking",     "agriculture",  "energy",
    "transport",  "railway",     "aviation",     "shipping",    "architecture", "engineering", "education",
    "school",     "university",  "library",      "museum",      "media",       "journalism",   "television",
    "radio",      "psychology",  "sociology",    "anthropology", "archaeology", "theory",      "systems",
    "design",     "animal",      "plant",        "insect",      "bird",        "fish",         "weather",
    "climate"};

constexpr std::string_view kPayloads[] = {
    "' OR '1'='1",
    "'; DROP TABLE categories; --",
    "1 UNION SELECT name, password FROM users",
    "\" OR \"\"=\"",
    "admin'--",
    "x' AND SLEEP(5) --",
    "' OR 1=1 --",
    "</CategoryName><Admin>true</Admin><CategoryName>",
    "<!ENTITY xxe SYSTEM \"file:///etc/passwd\">",
    "%27%20OR%201%3D1",
    "1; EXEC xp_cmdshell('dir')",
    "' or ''='"};

constexpr std::string_view kSoapNs = "http://schemas.xmlsoap.org/soap/envelope/";
constexpr std::string_view kServiceNs = "http://example.org/wiki";
constexpr std::string_view kDeclaration = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";

std::string category_name(Rng& rng) {
  const std::size_t words = 1 + rng.below(3);
  std::string name;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) name += '_';
    name += kWords[rng.below(std::size(kWords))];
  }
  name[0] = static_cast<char>(name[0] - 'a' + 'A');
  return name;
}

// Serialized SOAP document with the envelope namespace declared again on the
// root (the tree model does not keep attributes).
std::string envelope_text(const LabeledTree& tree, int indent) {
  std::string body = serialize_document(tree, WriteOptions{indent, 0});
  const std::string& root = tree.label(LabeledTree::root());
  const auto colon = root.find(':');
  if (colon != std::string::npos) {
    const std::string open = "<" + root + ">";
    if (body.starts_with(open)) {
      body.insert(open.size() - 1, " xmlns:" + root.substr(0, colon) + "=\"" + std::string(kSoapNs) + "\"");
    }
  }
  return std::string(kDeclaration) + body + (body.ends_with("\n") ? "" : "\n");
}

// Mutable tree used to apply attack edits.
struct Draft {
  struct Node {
    std::string label;
    std::optional<std::string> text;
    int parent = -1;
    std::vector<int> children;
  };
  std::vector<Node> nodes;

  static Draft from(const LabeledTree& tree) {
    Draft d;
    for (NodeId n = 0; n < tree.size(); ++n) {
      Node node{tree.label(n), tree.text(n), n == 0 ? -1 : static_cast<int>(tree.parent(n)), {}};
      for (NodeId c : tree.children(n)) node.children.push_back(static_cast<int>(c));
      d.nodes.push_back(std::move(node));
    }
    return d;
  }

  int add(int parent, std::string label, std::optional<std::string> text = std::nullopt) {
    nodes.push_back(Node{std::move(label), std::move(text), parent, {}});
    const int id = static_cast<int>(nodes.size()) - 1;
    nodes[parent].children.push_back(id);
    return id;
  }

  void move(int n, int new_parent) {
    auto& siblings = nodes[nodes[n].parent].children;
    siblings.erase(std::find(siblings.begin(), siblings.end(), n));
    nodes[new_parent].children.push_back(n);
    nodes[n].parent = new_parent;
  }

  bool within(int n, int ancestor) const {
    for (int cur = n; cur != -1; cur = nodes[cur].parent) {
      if (cur == ancestor) return true;
    }
    return false;
  }

  std::vector<int> preorder(int top) const {
    std::vector<int> out;
    std::vector<int> stack{top};
    while (!stack.empty()) {
      const int cur = stack.back();
      stack.pop_back();
      out.push_back(cur);
      const auto& kids = nodes[cur].children;
      stack.insert(stack.end(), kids.rbegin(), kids.rend());
    }
    return out;
  }

  LabeledTree build() const {
    TreeBuilder builder(nodes[0].label);
    if (nodes[0].text) builder.set_text(0, *nodes[0].text);
    std::vector<std::pair<int, NodeId>> stack{{0, 0}};
    while (!stack.empty()) {
      const auto [src, dst] = stack.back();
      stack.pop_back();
      std::vector<std::pair<int, NodeId>> pending;
      for (int c : nodes[src].children) {
        const NodeId id = builder.add_child(dst, nodes[c].label);
        if (nodes[c].text) builder.set_text(id, *nodes[c].text);
        pending.emplace_back(c, id);
      }
      stack.insert(stack.end(), pending.rbegin(), pending.rend());
    }
    return std::move(builder).build();
  }
};

int find_body(const Draft& d) {
  for (int c : d.nodes[0].children) {
    if (local_name(d.nodes[c].label) == "Body") return c;
  }
  throw Error(ErrorKind::InvalidArgument, "attack base has no SOAP Body");
}

int find_target(const Draft& d, int body) {
  for (int n : d.preorder(body)) {
    if (d.nodes[n].children.empty() && d.nodes[n].text) return n;
  }
  throw Error(ErrorKind::InvalidArgument, "attack base has no text leaf in its Body");
}

std::string unknown_label(Rng& rng) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string label = "Unk";
  for (int i = 0; i < 6; ++i) label += kHex[rng.below(16)];
  return label;
}

// Replaces the target's text by a chain of `depth` elements labeled `label`;
// the innermost one keeps the original text.
void nest(Draft& d, int target, std::size_t depth, std::string label) {
  auto text = std::move(d.nodes[target].text);
  d.nodes[target].text.reset();
  int cur = target;
  for (std::size_t i = 0; i < depth; ++i) cur = d.add(cur, label);
  d.nodes[cur].text = std::move(text);
}

void mutate(Draft& d, int body, std::size_t edits, Rng& rng) {
  for (std::size_t e = 0; e < edits; ++e) {
    const std::vector<int> region = d.preorder(body);
    const auto op = rng.below(3);
    if (op == 0) {
      const int n = region[rng.below(region.size())];
      d.nodes[n].label = unknown_label(rng);
      continue;
    }
    if (op == 1) {
      std::vector<std::pair<int, int>> moves;
      for (int n : region) {
        for (int p : region) {
          if (p == d.nodes[n].parent || d.within(p, n) || d.nodes[p].text) continue;
          moves.emplace_back(n, p);
        }
        if (d.nodes[n].parent != 0 && !d.within(0, n)) moves.emplace_back(n, 0);
      }
      if (!moves.empty()) {
        const auto [n, p] = moves[rng.below(moves.size())];
        d.move(n, p);
        continue;
      }
    }
    std::vector<int> hosts;
    for (int n : region) {
      if (!d.nodes[n].text) hosts.push_back(n);
    }
    d.add(hosts[rng.below(hosts.size())], unknown_label(rng));
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix(splitmix(splitmix(seed) ^ stream) ^ index);
}

const std::vector<std::string>& CategoryGraph::children_of(std::string_view name) const {
  const auto it = children.find(std::string(name));
  if (it == children.end()) throw Error(ErrorKind::UnknownCategory, "unknown category '" + std::string(name) + "'");
  return it->second;
}

std::string CategoryGraph::to_tsv() const {
  std::string out;
  for (const auto& parent : categories) {
    for (const auto& child : children.at(parent)) out += parent + '\t' + child + '\n';
  }
  return out;
}

CategoryGraph gen_graph(std::uint64_t seed, std::size_t n_categories, std::size_t max_branching) {
  if (n_categories == 0) throw Error(ErrorKind::InvalidArgument, "n_categories must be positive");
  if (max_branching == 0) throw Error(ErrorKind::InvalidArgument, "max_branching must be positive");
  Rng rng(seed);
  CategoryGraph g;
  g.root = "Contents";
  g.categories.push_back(g.root);
  g.children[g.root];
  std::deque<std::string> queue{g.root};
  while (g.categories.size() < n_categories) {
    const std::string parent = queue.front();
    queue.pop_front();
    std::size_t k = rng.below(max_branching + 1);
    if (k == 0 && queue.empty()) k = 1;
    for (std::size_t i = 0; i < k && g.categories.size() < n_categories; ++i) {
      std::string name = category_name(rng);
      while (g.children.count(name)) name = category_name(rng);
      g.children[parent].push_back(name);
      g.children[name];
      g.categories.push_back(name);
      queue.push_back(std::move(name));
    }
  }
  return g;
}

std::string gen_normal_request(const CategoryGraph& graph, const std::string& category, std::uint64_t seed,
                               bool allow_header) {
  if (!graph.contains(category)) throw Error(ErrorKind::UnknownCategory, "unknown category '" + category + "'");
  Rng rng(seed);
  std::string out(kDeclaration);
  out += "<soap:Envelope xmlns:soap=\"" + std::string(kSoapNs) + "\">\n";
  if (rng.chance(1, 4) && allow_header) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 16; ++i) id += kHex[rng.below(16)];
    out += "  <soap:Header>\n    <MessageID>urn:uuid:" + id + "</MessageID>\n  </soap:Header>\n";
  }
  out += "  <soap:Body>\n";
  out += "    <GetWikiSubCategory xmlns=\"" + std::string(kServiceNs) + "\">\n";
  out += "      <CategoryName>" + escape_xml(category) + "</CategoryName>\n";
  out += "    </GetWikiSubCategory>\n";
  out += "  </soap:Body>\n";
  out += "</soap:Envelope>\n";
  return out;
}

std::string gen_normal_response(const CategoryGraph& graph, const std::string& category) {
  graph.children_of(category);
  TreeBuilder builder("soap:Envelope");
  const NodeId body = builder.add_child(0, "soap:Body");
  const NodeId op = builder.add_child(body, "GetWikiSubCategory");
  const NodeId top = builder.add_child(op, category);
  std::vector<std::tuple<std::string, NodeId, std::size_t>> stack{{category, top, 0}};
  while (!stack.empty()) {
    const auto [name, id, level] = stack.back();
    stack.pop_back();
    if (level == kResponseDepth) continue;
    const auto& kids = graph.children.at(name);
    std::vector<std::tuple<std::string, NodeId, std::size_t>> pending;
    for (const auto& child : kids) pending.emplace_back(child, builder.add_child(id, child), level + 1);
    stack.insert(stack.end(), pending.rbegin(), pending.rend());
  }
  return envelope_text(std::move(builder).build(), 2);
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::CoerciveParsing: return "CoerciveParsing";
    case AttackKind::OversizePayload: return "OversizePayload";
    case AttackKind::RecursivePayload: return "RecursivePayload";
    case AttackKind::SqlXmlInjection: return "SqlXmlInjection";
    case AttackKind::UnknownMutation: return "UnknownMutation";
  }
  throw Error(ErrorKind::UnsupportedKind, "attack kind " + std::to_string(static_cast<int>(kind)));
}

AttackKind parse_attack_kind(std::string_view name) {
  for (AttackKind k : kAttackKinds) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorKind::UnsupportedKind, "unknown attack kind '" + std::string(name) + "'");
}

std::span<const std::string_view> injection_payloads() { return kPayloads; }

std::string gen_attack(const AttackSpec& spec, std::string_view base) {
  to_string(spec.kind);  // rejects values outside the enum
  LabeledTree tree;
  try {
    tree = parse_document(base);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("attack base does not parse: ") + e.what());
  }
  Draft d = Draft::from(tree);
  const int body = find_body(d);
  Rng rng(spec.seed);

  switch (spec.kind) {
    case AttackKind::RecursivePayload: {
      const int target = find_target(d, body);
      nest(d, target, spec.depth ? spec.depth : 500, d.nodes[target].label);
      break;
    }
    case AttackKind::OversizePayload: {
      const int target = find_target(d, body);
      const int host = d.nodes[target].parent;
      for (std::size_t i = 0; i < spec.size; ++i) d.add(host, d.nodes[target].label, d.nodes[target].text);
      break;
    }
    case AttackKind::CoerciveParsing: {
      const int target = find_target(d, body);
      nest(d, target, spec.depth ? spec.depth : 40, "x");
      const bool malformed = spec.malformed ? *spec.malformed : rng.chance(1, 2);
      std::string text = envelope_text(d.build(), 0);
      if (malformed) text.erase(text.find("</x>"), 4);
      return text;
    }
    case AttackKind::SqlXmlInjection: {
      const int target = find_target(d, body);
      const std::size_t pick = spec.payload ? *spec.payload : rng.below(std::size(kPayloads));
      if (pick >= std::size(kPayloads)) throw Error(ErrorKind::InvalidArgument, "payload index out of range");
      d.nodes[target].text = std::string(kPayloads[pick]);
      break;
    }
    case AttackKind::UnknownMutation:
      mutate(d, body, std::max<std::size_t>(spec.mutations, 1), rng);
      break;
  }
  return envelope_text(d.build(), 0);
}

Corpus gen_corpus(const CorpusParams& params) {
  return gen_corpus(gen_graph(params.seed, params.n_categories, params.max_branching), params);
}

Corpus gen_corpus(const CategoryGraph& graph, const CorpusParams& params) {
  Corpus corpus;
  corpus.graph = graph;
  const std::uint64_t base = 1 + params.repeat * 3;
  const auto name = [](const char* dir, const char* stem, std::size_t i) {
    std::string digits = std::to_string(i);
    if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
    return std::string(dir) + "/" + stem + "-" + digits + ".xml";
  };
  const auto pick = [&](Rng& rng) -> const std::string& {
    return graph.categories[rng.below(graph.categories.size())];
  };

  for (std::size_t i = 0; i < params.n_train; ++i) {
    Rng rng(mix_seed(params.seed, base, i));
    const std::string& category = pick(rng);
    std::string xml = params.with_responses && i % 2 == 1 ? gen_normal_response(graph, category)
                                                          : gen_normal_request(graph, category, rng.next());
    corpus.train.push_back({name("train", "train", i), std::move(xml), "normal"});
  }
  for (std::size_t i = 0; i < params.n_normal_test; ++i) {
    Rng rng(mix_seed(params.seed, base + 1, i));
    const std::string& category = pick(rng);
    corpus.test_normal.push_back(
        {name("test-normal", "normal", i), gen_normal_request(graph, category, rng.next()), "normal"});
  }
  constexpr std::size_t kKinds = std::size(kAttackKinds);
  for (std::size_t i = 0; i < params.n_attack; ++i) {
    Rng rng(mix_seed(params.seed, base + 2, i));
    const std::string& category = pick(rng);
    AttackSpec spec;
    spec.kind = kAttackKinds[i % kKinds];
    const std::string request = gen_normal_request(graph, category, rng.next(), false);
    spec.seed = rng.next();
    corpus.test_attack.push_back(
        {name("test-attack", "attack", i), gen_attack(spec, request), std::string(to_string(spec.kind))});
  }
  return corpus;
}

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  std::error_code ec;
  for (const char* sub : {"train", "test-normal", "test-attack"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) throw Error(ErrorKind::IoFailure, "cannot create " + (dir / sub).string() + ": " + ec.message());
  }
  std::string labels;
  for (const auto* group : {&corpus.train, &corpus.test_normal, &corpus.test_attack}) {
    for (const auto& file : *group) {
      write_file(dir / file.name, file.xml);
      labels += file.name + '\t' + file.label + '\n';
    }
  }
  write_file(dir / "labels.tsv", labels);
  write_file(dir / "graph.tsv", corpus.graph.to_tsv());
}

}  // namespace wsids
