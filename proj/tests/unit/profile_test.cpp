#include <doctest.h>

#include <algorithm>
#include <set>

#include "printers.hpp"
#include "support.hpp"
#include "wsids/error.hpp"
#include "wsids/profile.hpp"

using namespace wsids;
using test::forest;

namespace {

// Short strings over a few characters of every class, so that random probes
// often fall inside learned patterns.
std::string probe(Rng& rng, std::size_t max_len) {
  static constexpr std::string_view kChars[] = {"a", "Z", "_", "7", "0", " ", "-", "'", "\xC3\xA9"};
  std::string out;
  const std::size_t n = rng.below(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) out += kChars[rng.below(std::size(kChars))];
  return out;
}

std::vector<std::string> probe_set(Rng& rng, std::size_t max_count, std::size_t max_len) {
  std::vector<std::string> out;
  const std::size_t n = 1 + rng.below(max_count);
  for (std::size_t i = 0; i < n; ++i) out.push_back(probe(rng, max_len));
  return out;
}

ContentProfile single(const std::vector<std::string>& values, const ProfileParams& params) {
  Forest f;
  for (const auto& v : values) {
    TreeBuilder b("r");
    const auto leaf = b.add_child(0, "v");
    if (!v.empty()) b.set_text(leaf, v);
    f.push_back(Document{"d" + std::to_string(f.size()), std::move(b).build()});
  }
  return build_profile(f, params);
}

}  // namespace

TEST_SUITE("profile") {
  TEST_CASE("literal alternation") {
    CHECK(literal_alternation({"AI", "NLP"}).pattern == "^(AI|NLP)$");
    CHECK(literal_alternation({"NLP", "AI", "AI"}).pattern == "^(AI|NLP)$");
    CHECK(literal_alternation({"abc"}).pattern == "^abc$");
    CHECK(literal_alternation({"abc"}).kind == PatternKind::Literal);
    CHECK(literal_alternation({"a.b*c"}).pattern == R"(^a\.b\*c$)");
  }

  TEST_CASE("shape generalization") {
    CHECK(generalize({"abc"}).pattern == "^[A-Za-z_]{3,3}$");
    CHECK(generalize({"abc"}).kind == PatternKind::Shape);
    CHECK(generalize({"12", "345"}).pattern == R"(^\d{2,3}$)");
    CHECK(generalize({"ab12", "c3"}).pattern == R"(^[A-Za-z_]{1,2}\d{1,2}$)");
    CHECK(generalize({"12", "ab"}).pattern == R"(^(?:\d{2,2}|[A-Za-z_]{2,2})$)");
    CHECK(generalize({"12", "345"}, {16, 1, 8}).pattern == R"(^\d{1,4}$)");
  }

  TEST_CASE("path profile") {
    ContentProfile p = single({"AI", "NLP"}, {});
    REQUIRE(p.size() == 1);
    const auto& [path, entry] = *p.entries().begin();
    CHECK(path == "r/v");
    CHECK(entry.pattern.pattern == "^(AI|NLP)$");
    CHECK(entry.min_length == 2);
    CHECK(entry.max_length == 3);
    CHECK(p.match("r/v", "AI") == MatchResult::Match);
    CHECK(p.match("r/v", "ML") == MatchResult::Mismatch);
    CHECK(p.match("r/v", "AIX") == MatchResult::Mismatch);
    CHECK(p.match("r/w", "AI") == MatchResult::UnknownPath);
  }

  TEST_CASE("twenty numbers of two to four digits") {
    std::vector<std::string> values;
    for (int i = 0; i < 20; ++i) values.push_back(std::to_string(10 + i * 487));
    const auto p = single(values, {});
    CHECK(p.entries().begin()->second.pattern.pattern == R"(^\d{2,4}$)");
  }

  TEST_CASE("category names reject injection strings") {
    std::vector<std::string> names;
    for (const char* n : {"Natural_language_processing", "Data_mining", "Machine_translation", "Speech", "Robotics",
                          "Corpus_linguistics", "Voice_technology", "Speech_recognition", "Speech_synthesis",
                          "Artificial_intelligence", "Logic", "Planning", "Vision", "Search", "Ontology",
                          "Knowledge_representation", "Expert_systems"}) {
      names.emplace_back(n);
    }
    const auto p = single(names, {});
    CHECK(p.entries().begin()->second.pattern.kind == PatternKind::Shape);
    for (const auto& n : names) CHECK(p.match("r/v", n) == MatchResult::Match);
    CHECK(p.match("r/v", "' OR 1=1 --") == MatchResult::Mismatch);
    CHECK(p.match("r/v", "'; DROP TABLE--") == MatchResult::Mismatch);
  }

  TEST_CASE("empty inputs") {
    CHECK_THROWS_AS(build_profile({}), Error);
    CHECK(build_profile(forest({"a{b,c}", "a{b}"})).empty());
    // Empty values stay acceptable next to text.
    const auto p = single({"x", ""}, {});
    CHECK(p.match("r/v", "") == MatchResult::Match);
  }

  TEST_CASE("random value sets match their own generalization") {
    Rng rng(31);
    for (int i = 0; i < 400; ++i) {
      const auto values = probe_set(rng, 40, 10);
      const ProfileParams params{rng.below(20), rng.below(3), 1 + rng.below(10)};
      const auto p = single(values, params);
      if (std::all_of(values.begin(), values.end(), [](const auto& v) { return v.empty(); })) {
        CHECK(p.empty());
        continue;
      }
      for (const auto& v : values) {
        CHECK_MESSAGE(p.match("r/v", v) == MatchResult::Match, p.to_text(), " rejects [", v, "]");
      }
    }
  }

  TEST_CASE("adding values never shrinks the accepted language") {
    Rng rng(32);
    for (int i = 0; i < 300; ++i) {
      const ProfileParams params{rng.below(20), rng.below(2), 1 + rng.below(10)};
      auto small = probe_set(rng, 30, 8);
      auto large = small;
      for (const auto& extra : probe_set(rng, 30, 8)) large.push_back(extra);
      const auto a = single(small, params);
      const auto b = single(large, params);
      if (a.empty()) continue;
      for (int k = 0; k < 60; ++k) {
        const auto s = k < static_cast<int>(small.size()) ? small[k] : probe(rng, 10);
        if (a.match("r/v", s) == MatchResult::Match) {
          CHECK_MESSAGE(b.match("r/v", s) == MatchResult::Match, a.to_text(), b.to_text(), "[", s, "]");
        }
      }
    }
  }

  TEST_CASE("every training leaf matches and builds are deterministic") {
    Rng rng(33);
    for (int i = 0; i < 60; ++i) {
      Forest f;
      const std::size_t docs = 1 + rng.below(30);
      for (std::size_t d = 0; d < docs; ++d) {
        const auto shape = test::random_tree(rng, 6, 3);
        TreeBuilder b(shape);
        for (NodeId n = 0; n < shape.size(); ++n) {
          if (shape.is_leaf(n) && rng.chance(3, 4)) b.set_text(n, probe(rng, 9));
        }
        f.push_back(Document{"d" + std::to_string(d), std::move(b).build()});
      }
      const auto p = build_profile(f);
      CHECK(build_profile(f).to_text() == p.to_text());
      for (const auto& doc : f) {
        for (NodeId n = 0; n < doc.tree.size(); ++n) {
          if (!doc.tree.is_leaf(n) || !doc.tree.text(n)) continue;
          CHECK(p.match(doc.tree.path_to(n).joined(), *doc.tree.text(n)) == MatchResult::Match);
        }
      }
    }
  }

  TEST_CASE("profile file round trip") {
    Rng rng(34);
    for (int i = 0; i < 100; ++i) {
      const auto p = single(probe_set(rng, 30, 8), {rng.below(20), rng.below(2), 1 + rng.below(10)});
      const auto back = ContentProfile::parse(p.to_text());
      CHECK(back == p);
      CHECK(back.to_text() == p.to_text());
    }
    CHECK(ContentProfile::parse(ContentProfile().to_text()).empty());
  }

  TEST_CASE("malformed profile files") {
    const std::string header = "# path\tkind\tmin_length\tmax_length\tpattern\n";
    for (std::string bad : {"a\tliteral\t1\t1\n", "a\tfancy\t1\t1\t^a$\n", "a\tliteral\tx\t1\t^a$\n",
                            "a\tliteral\t1\t1\t^(a$\n", "a\tliteral\t1\t1\t^a$\na\tliteral\t1\t1\t^a$\n"}) {
      CHECK_THROWS_AS(ContentProfile::parse(header + bad), Error);
    }
  }

  TEST_CASE("special characters are literal") {
    const auto p = single({"a.b", "(x)", "c|d", "e\\f", "[g]"}, {});
    for (const char* s : {"a.b", "(x)", "c|d", "e\\f", "[g]"}) CHECK(p.match("r/v", s) == MatchResult::Match);
    for (const char* s : {"aXb", "x", "c", "d", "e\\\\f", "g"}) CHECK(p.match("r/v", s) == MatchResult::Mismatch);
  }
}
