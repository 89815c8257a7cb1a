#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "printers.hpp"
#include "support.hpp"
#include "wsids/canonical.hpp"
#include "wsids/error.hpp"
#include "wsids/match.hpp"
#include "wsids/rules.hpp"

using namespace wsids;
using test::forest;
using test::tree;

namespace {

ErrorKind parse_error(std::string_view xml) {
  try {
    parse_rules(xml);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("parse_rules accepted ", xml);
  return ErrorKind::InvalidArgument;
}

TreeRule make_rule(std::string_view body, std::string_view head, double conf, std::size_t sup) {
  TreeRule r;
  r.body = tree(body);
  r.head = tree(head);
  r.body_code = canonical_code(r.body);
  r.head_code = canonical_code(r.head);
  r.confidence = conf;
  r.support = sup;
  return r;
}

std::string squeeze(std::string_view text) {
  std::string out;
  for (const auto& line : test::lines(text)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t");
    out += line.substr(b, e - b + 1);
    out += '\n';
  }
  return out;
}

constexpr std::string_view kCategoryRule = R"(<rule0>
  <Cs>
    <Natural_language_processing>
      <Machine_translation></Machine_translation>
      <Data_mining></Data_mining>
      <Corpus_linguistics></Corpus_linguistics>
    </Natural_language_processing>
  </Cs>
  <S>
    <soap:Envelope>
      <soap:Body>
        <GetWikiSubCategory>
          <Natural_language_processing>
            <Machine_translation></Machine_translation>
            <Data_mining></Data_mining>
            <Corpus_linguistics></Corpus_linguistics>
          </Natural_language_processing>
        </GetWikiSubCategory>
      </soap:Body>
    </soap:Envelope>
  </S>
  <confidence>0.5</confidence>
  <support>2</support>
</rule0>
)";

constexpr std::string_view kNlp = "Natural_language_processing{Machine_translation,Data_mining,Corpus_linguistics}";

std::string nlp_head() {
  return "soap:Envelope{soap:Body{GetWikiSubCategory{" + std::string(kNlp) + "}}}";
}

}  // namespace

TEST_SUITE("rules") {
  TEST_CASE("rules from a hand-built forest") {
    const auto f = forest({"a{b}", "a{b}", "a{c}"});
    const auto closed = mine_closed(f, {2, 0, 1000});
    const auto rules = extract_rules(closed, f, {0.6, 10, 2});
    REQUIRE(rules.size() == 2);
    // Sorted by (head code, body code): "a $" < "b $".
    CHECK(rules[0].body_code.str() == "a $");
    CHECK(rules[0].head_code.str() == "a b $ $");
    CHECK(rules[0].confidence == 2.0 / 3.0);
    CHECK(rules[0].support == 2);
    CHECK(rules[1].body_code.str() == "b $");
    CHECK(rules[1].confidence == 1.0);
    CHECK(rules[1].support == 2);
    CHECK(extract_rules(closed, f, {0.7, 10, 2}).size() == 1);
    REQUIRE(rules.params());
    CHECK(rules.params()->minsup == 2);
    CHECK(rules.params()->minconf == 0.6);
  }

  TEST_CASE("confidence one half from supports two and four") {
    const auto f = forest({"r{x{y}}", "r{x{y}}", "r{x}", "r{x}"});
    const auto rules = extract_rules(mine_closed(f, {2, 0, 1000}), f, {0.5, 10, 2});
    bool found = false;
    for (const auto& r : rules.rules()) {
      if (r.body_code == canonical_code(tree("r{x}")) && r.head_code == canonical_code(tree("r{x{y}}"))) {
        found = true;
        CHECK(r.confidence == 0.5);
        CHECK(r.support == 2);
      }
    }
    CHECK(found);
  }

  TEST_CASE("invalid minconf") {
    const auto f = forest({"a{b}", "a{b}"});
    const auto closed = mine_closed(f, {2, 0, 1000});
    for (double bad : {0.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
      try {
        extract_rules(closed, f, {bad, 10, 2});
        FAIL("accepted minconf ", bad);
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidConfidence);
      }
    }
  }

  TEST_CASE("random forests: rule math, invariants and minconf monotonicity") {
    Rng rng(99);
    for (int i = 0; i < 80; ++i) {
      auto f = test::random_forest(rng, 6, 8, 3);
      while (f.size() < 2) f = test::random_forest(rng, 6, 8, 3);
      const auto closed = mine_closed(f, {2, 0, 5'000'000});
      std::size_t previous = std::numeric_limits<std::size_t>::max();
      for (int step = 1; step <= 10; ++step) {
        const double minconf = step / 10.0;
        const auto rules = extract_rules(closed, f, {minconf, 10, 2});
        CHECK(rules.size() <= previous);
        previous = rules.size();
        for (const auto& r : rules.rules()) {
          const auto body_sup = support_of(r.body, f);
          CHECK(r.support == support_of(r.head, f));
          CHECK(r.support >= 2);
          CHECK(r.confidence == static_cast<double>(r.support) / static_cast<double>(body_sup));
          CHECK(r.confidence >= minconf);
          CHECK(r.confidence <= 1.0);
          CHECK(r.body.size() < r.head.size());
          CHECK(contains_induced(r.head, r.body));
        }
      }
    }
  }

  TEST_CASE("duplicate rules are rejected") {
    CHECK_THROWS_AS(RuleSet({make_rule("a", "a{b}", 1, 2), make_rule("a", "a{b}", 1, 2)}), Error);
  }

  TEST_CASE("category rule layout") {
    const RuleSet rules({make_rule(kNlp, nlp_head(), 0.5, 2)});
    const std::string xml = serialize_rules(rules);
    const auto open = xml.find("<rule0>");
    const auto close = xml.find("</rule0>");
    REQUIRE(open != std::string::npos);
    REQUIRE(close != std::string::npos);
    CHECK(squeeze(xml.substr(open, close + 8 - open)) == squeeze(kCategoryRule));
    CHECK(xml.starts_with("<rules>\n  <rule0>\n    <Cs>\n      <Natural_language_processing>\n"));
    CHECK(xml.ends_with("  </rule0>\n</rules>"));

    const auto parsed = parse_rules("<rules>" + std::string(kCategoryRule) + "</rules>");
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0].confidence == 0.5);
    CHECK(parsed[0].support == 2);
    CHECK(parsed[0].body == tree(kNlp));
    CHECK(parsed[0].head == tree(nlp_head()));
  }

  TEST_CASE("empty rule set") {
    CHECK(serialize_rules(RuleSet()) == "<rules></rules>");
    CHECK(parse_rules("<rules></rules>").empty());
    CHECK(parse_rules("<rules/>").empty());
  }

  TEST_CASE("shortest decimal confidence") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(2.0 / 3.0) == "0.6666666666666666");
  }

  TEST_CASE("100 random rule sets survive serialize and parse") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      const auto rules = test::random_rule_set(rng, 8);
      const auto back = parse_rules(serialize_rules(rules));
      REQUIRE(back.size() == rules.size());
      for (std::size_t k = 0; k < rules.size(); ++k) {
        CHECK(back[k].body == rules[k].body);
        CHECK(back[k].head == rules[k].head);
        CHECK(back[k].body_code == rules[k].body_code);
        CHECK(back[k].head_code == rules[k].head_code);
        CHECK(back[k].confidence == rules[k].confidence);
        CHECK(back[k].support == rules[k].support);
      }
      CHECK(serialize_rules(back) == serialize_rules(rules));
    }
  }

  TEST_CASE("malformed rule files") {
    const auto rule = [](std::string_view body, std::string_view conf, std::string_view sup = "2",
                         std::string_view name = "rule0") {
      return "<rules><" + std::string(name) + "><Cs>" + std::string(body) + "</Cs><S><a><b/></a></S><confidence>" +
             std::string(conf) + "</confidence><support>" + std::string(sup) + "</support></" + std::string(name) +
             "></rules>";
    };
    CHECK(parse_rules(rule("<a/>", "1")).size() == 1);
    CHECK(parse_error(rule("<a/>", "1.5")) == ErrorKind::InvariantViolation);
    CHECK(parse_error(rule("<a/>", "0")) == ErrorKind::InvariantViolation);
    CHECK(parse_error(rule("<a/>", "1", "0")) == ErrorKind::InvariantViolation);
    CHECK(parse_error(rule("<c/>", "1")) == ErrorKind::InvariantViolation);
    CHECK(parse_error(rule("<a><b/></a>", "1")) == ErrorKind::InvariantViolation);
    CHECK(parse_error(rule("<a/>", "high")) == ErrorKind::SchemaViolation);
    CHECK(parse_error(rule("<a/>", "0.5x")) == ErrorKind::SchemaViolation);
    CHECK(parse_error(rule("<a/>", "1", "-2")) == ErrorKind::SchemaViolation);
    CHECK(parse_error(rule("<a/>", "1", "2", "rule1")) == ErrorKind::SchemaViolation);
    CHECK(parse_error(rule("<a/><b/>", "1")) == ErrorKind::SchemaViolation);
    CHECK(parse_error("<rulez></rulez>") == ErrorKind::SchemaViolation);
    CHECK(parse_error("<rules><rule0><Cs><a/></Cs></rule0></rules>") == ErrorKind::SchemaViolation);
    CHECK(parse_error("<rules><rule0>") == ErrorKind::SchemaViolation);
  }

  TEST_CASE("index") {
    const RuleSet one({make_rule("X", "soap:Envelope{soap:Body{GetWikiSubCategory{X}}}", 1, 2)});
    const auto idx = RuleIndex::build(one);
    CHECK(idx.buckets().size() == 4);
    for (const auto& [label, ids] : idx.buckets()) CHECK(ids == std::vector<std::uint32_t>{0});
    CHECK(idx.lookup("absent").empty());

    const RuleSet two({make_rule(kNlp, nlp_head(), 0.5, 2), make_rule("Data_mining", "Corpus{Data_mining}", 0.5, 2)});
    const auto idx2 = RuleIndex::build(two);
    const auto dm = idx2.lookup("Data_mining");
    CHECK(std::vector<std::uint32_t>(dm.begin(), dm.end()) == std::vector<std::uint32_t>{0, 1});
    CHECK(RuleIndex::parse(idx2.to_text()) == idx2);
    CHECK(idx2.to_text().find("Data_mining\trule0,rule1\n") != std::string::npos);
  }

  TEST_CASE("index completeness on random rule sets") {
    Rng rng(12);
    for (int i = 0; i < 100; ++i) {
      const auto rules = test::random_rule_set(rng, 8);
      const auto idx = RuleIndex::build(rules);
      for (std::size_t r = 0; r < rules.size(); ++r) {
        for (NodeId n = 0; n < rules[r].head.size(); ++n) {
          const auto ids = idx.lookup(rules[r].head.label(n));
          CHECK(std::find(ids.begin(), ids.end(), r) != ids.end());
        }
      }
      CHECK(RuleIndex::parse(idx.to_text()) == idx);
    }
  }

  TEST_CASE("malformed index files") {
    for (std::string_view bad : {"a\n", "a\trule0,\n", "a\trule1,rule0\n", "a\trule0\na\trule1\n", "a\tr0\n",
                                 "a\trule0,rule0\n"}) {
      CHECK_THROWS_AS(RuleIndex::parse(bad), Error);
    }
  }
}
