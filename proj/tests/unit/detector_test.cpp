#include <doctest.h>

#include <algorithm>

#include "printers.hpp"
#include "support.hpp"
#include "wsids/config.hpp"
#include "wsids/detector.hpp"
#include "wsids/match.hpp"
#include "wsids/soap.hpp"
#include "wsids/xml.hpp"

using namespace wsids;
using test::corpus_model;
using test::thrown;

namespace {

std::string envelope(const std::string& body) {
  return "<soap:Envelope xmlns:soap=\"http://schemas.xmlsoap.org/soap/envelope/\"><soap:Body>" + body +
         "</soap:Body></soap:Envelope>";
}

std::string request(const std::string& category) {
  return envelope("<GetWikiSubCategory><CategoryName>" + category + "</CategoryName></GetWikiSubCategory>");
}

std::string some_category() { return corpus_model().corpus.graph.categories.at(1); }

// Normal requests, attacks of every kind and hand-made variations.
std::vector<std::string> generated_requests(std::size_t n, std::uint64_t seed) {
  const auto& graph = corpus_model().corpus.graph;
  Rng rng(seed);
  std::vector<std::string> out;
  while (out.size() < n) {
    const auto& category = graph.categories[rng.below(graph.categories.size())];
    const std::string base = gen_normal_request(graph, category, rng.next());
    switch (rng.below(5)) {
      case 0:
      case 1: out.push_back(base); break;
      case 2: {
        AttackSpec spec;
        spec.kind = kAttackKinds[rng.below(std::size(kAttackKinds))];
        spec.seed = rng.next();
        spec.size = 200 + rng.below(20000);
        out.push_back(gen_attack(spec, base));
        break;
      }
      case 3: out.push_back(request(test::random_text(rng, 20))); break;
      default: {
        std::string xml = base;
        const auto at = xml.find("</GetWikiSubCategory>");
        if (at != std::string::npos) xml.insert(at, "<Extra>" + std::to_string(rng.below(100)) + "</Extra>");
        out.push_back(xml);
      }
    }
  }
  return out;
}

DetectionModel model_with(const std::vector<TreeRule>& rules, const DetectorConfig& config) {
  return DetectionModel(RuleSet(rules), corpus_model().trained.profile, config);
}

}  // namespace

TEST_SUITE("detector") {
  TEST_CASE("a training document that is itself a rule head is allowed") {
    const std::string full = envelope("<Op><A>1</A><B>2</B></Op>");
    const std::string part = envelope("<Op><A>3</A></Op>");
    Forest f;
    for (const auto& xml : {full, full, part}) {
      f.push_back(Document{"d" + std::to_string(f.size()), preprocess(parse_document(xml))});
    }
    TrainParams params;
    params.mining.minsup = 2;
    const auto trained = train(f, params);
    const auto whole = canonical_code(f[0].tree);
    CHECK(std::any_of(trained.rules.rules().begin(), trained.rules.rules().end(),
                      [&](const TreeRule& r) { return r.head_code == whole; }));
    const auto model = test::detection_model(trained);
    const auto v = classify(model, full);
    CHECK(v.outcome == Outcome::Allow);
    CHECK(v.reasons.empty());
  }

  TEST_CASE("deep nesting is a parse alarm") {
    const auto model = test::detection_model(corpus_model().trained);
    std::string deep;
    for (int i = 0; i < 1000; ++i) deep += "<x>";
    for (int i = 0; i < 1000; ++i) deep += "</x>";
    const auto alarm = classify(model, envelope(deep));
    CHECK(alarm.outcome == Outcome::ParseAlarm);
    REQUIRE(alarm.reasons.size() == 1);
    CHECK(alarm.reasons[0].where == "message");
    CHECK(classify(model, "<a><b></a>").outcome == Outcome::ParseAlarm);
    CHECK(classify(model, "not xml").outcome == Outcome::ParseAlarm);
    CHECK(classify(model, "<html><body/></html>").outcome == Outcome::ParseAlarm);
  }

  TEST_CASE("normal, injected and reshaped requests") {
    const auto model = test::detection_model(corpus_model().trained);
    CHECK(classify(model, request(some_category())).outcome == Outcome::Allow);

    const auto injected = classify(model, request("'; DROP TABLE--"));
    CHECK(injected.outcome == Outcome::ContentAlarm);
    REQUIRE(injected.reasons.size() == 1);
    CHECK(injected.reasons[0].where == "soap:Envelope/soap:Body/GetWikiSubCategory/CategoryName");

    const auto extra = classify(
        model, envelope("<GetWikiSubCategory><CategoryName>" + some_category() +
                        "</CategoryName><Limit>5</Limit></GetWikiSubCategory>"));
    CHECK(extra.outcome == Outcome::StructuralAlarm);
    CHECK(std::any_of(extra.reasons.begin(), extra.reasons.end(), [](const Reason& r) {
      return r.where == "soap:Envelope/soap:Body/GetWikiSubCategory/Limit";
    }));
  }

  TEST_CASE("every training document is allowed") {
    const auto model = test::detection_model(corpus_model().trained);
    for (const auto& f : corpus_model().corpus.train) CHECK(classify(model, f.xml).outcome == Outcome::Allow);
  }

  TEST_CASE("training documents covered by mined heads raise no structural alarm") {
    DetectorConfig config;
    config.implication_check = false;
    const auto& trained = corpus_model().trained;
    const auto model = test::detection_model(trained, config);
    for (const auto& doc : test::forest_of(corpus_model().corpus.train)) {
      std::vector<bool> covered(doc.tree.size(), false);
      for (const auto& rule : trained.rules.rules()) {
        const auto c = occurrence_cover(doc.tree, rule.head);
        for (std::size_t n = 0; n < c.size(); ++n) covered[n] = covered[n] || c[n];
      }
      if (std::find(covered.begin(), covered.end(), false) != covered.end()) continue;
      CHECK(classify(model, serialize_document(doc.tree)).outcome != Outcome::StructuralAlarm);
    }
  }

  TEST_CASE("explain derives the classify verdict on 1000 generated requests") {
    const auto requests = generated_requests(1000, 77);
    for (bool coverage : {true, false}) {
      DetectorConfig config;
      config.coverage_required = coverage;
      const auto model = test::detection_model(corpus_model().trained, config);
      std::size_t alarms = 0;
      for (const auto& xml : requests) {
        const auto verdict = classify(model, xml);
        CHECK(derive_verdict(explain(model, xml)) == verdict);
        CHECK(classify(model, xml) == verdict);
        CHECK(verdict.reasons.empty() == !verdict.alarm());
        alarms += verdict.alarm();
      }
      CHECK(alarms > 0);
      CHECK(alarms < requests.size());
    }
  }

  TEST_CASE("explain names uncovered nodes") {
    const auto model = test::detection_model(corpus_model().trained);
    const auto report = explain(model, envelope("<GetWikiSubCategory><Other>x</Other></GetWikiSubCategory>"));
    CHECK(std::any_of(report.nodes.begin(), report.nodes.end(), [](const NodeReport& n) {
      return n.covering.empty() && n.path.ends_with("Other");
    }));
    const auto ok = explain(model, request(some_category()));
    for (const auto& n : ok.nodes) CHECK_FALSE(n.covering.empty());
  }

  TEST_CASE("removing rules never turns an alarm into Allow") {
    const auto& all = corpus_model().trained.rules.rules();
    const auto requests = generated_requests(120, 5);
    Rng rng(6);
    for (bool coverage : {true, false}) {
      DetectorConfig config;
      config.coverage_required = coverage;
      config.implication_check = false;
      const auto full = model_with(all, config);
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<TreeRule> kept;
        for (const auto& r : all) {
          if (rng.chance(2, 3)) kept.push_back(r);
        }
        const auto fewer = model_with(kept, config);
        for (const auto& xml : requests) {
          if (classify(full, xml).alarm()) CHECK(classify(fewer, xml).alarm());
        }
      }
    }
  }

  TEST_CASE("any-node coverage mode") {
    DetectorConfig config;
    config.coverage_required = false;
    const auto model = test::detection_model(corpus_model().trained, config);
    const auto v = classify(model, envelope("<GetWikiSubCategory><CategoryName>" + some_category() +
                                            "</CategoryName><Limit>5</Limit></GetWikiSubCategory>"));
    CHECK(v.outcome != Outcome::StructuralAlarm);
    config.strict_soap = false;
    const auto lax = test::detection_model(corpus_model().trained, config);
    const auto none = classify(lax, "<Unrelated><x/></Unrelated>");
    CHECK(none.outcome == Outcome::StructuralAlarm);
    CHECK(none.reasons == std::vector<Reason>{{"message", "no node is covered by an occurring rule head"}});
  }

  TEST_CASE("loading models") {
    const test::TempDir dir;
    write_model_dir(dir / "m", corpus_model().trained, "{}\n");
    const auto m = dir / "m";
    const auto with_index = load_model_dir(m, {});
    const auto rebuilt = load_model(m / kRulesFile, m / "missing.tsv", m / kProfileFile, {});
    CHECK(rebuilt.index() == with_index.index());
    for (const auto& xml : generated_requests(200, 9)) CHECK(classify(rebuilt, xml) == classify(with_index, xml));

    CHECK(thrown([&] { load_model_dir(dir / "absent", {}); }) == ErrorKind::IoFailure);
    CHECK(thrown([&] { load_model(m / kRulesFile, m / kIndexFile, dir / "none.tsv", {}); }) == ErrorKind::IoFailure);

    write_file(dir / "bad-rules.xml",
               "<rules><rule0><Cs><c/></Cs><S><a><b/></a></S><confidence>1</confidence><support>2</support></rule0>"
               "</rules>");
    CHECK(thrown([&] { load_model(dir / "bad-rules.xml", dir / "x.tsv", m / kProfileFile, {}); }) ==
          ErrorKind::InvariantViolation);
    write_file(dir / "other-index.tsv", "a\trule0\n");
    CHECK(thrown([&] { load_model(m / kRulesFile, dir / "other-index.tsv", m / kProfileFile, {}); }) ==
          ErrorKind::InvariantViolation);
    write_file(dir / "bad-profile.tsv", "garbage\n");
    CHECK(thrown([&] { load_model(m / kRulesFile, m / kIndexFile, dir / "bad-profile.tsv", {}); }) ==
          ErrorKind::SchemaViolation);
  }

  TEST_CASE("empty shared model") {
    const std::shared_ptr<const DetectionModel> none;
    CHECK(thrown([&] { classify(none, "<a/>"); }) == ErrorKind::ModelNotLoaded);
    CHECK(thrown([&] { explain(none, "<a/>"); }) == ErrorKind::ModelNotLoaded);
  }

  TEST_CASE("config checks") {
    DetectorConfig bad;
    bad.implication_minconf = 0;
    CHECK(thrown([&] { bad.validate(); }) == ErrorKind::ConfigError);
    bad = {};
    bad.max_depth = 0;
    CHECK(thrown([&] { bad.validate(); }) == ErrorKind::ConfigError);
  }

  TEST_CASE("verdict lines") {
    CHECK(verdict_json("a.xml", {}) == R"({"file":"a.xml","outcome":"Allow","reasons":[]})");
    CHECK(verdict_json("b.xml", Verdict{Outcome::ContentAlarm, {{"x/y", "bad"}}}) ==
          R"({"file":"b.xml","outcome":"ContentAlarm","reasons":[{"where":"x/y","why":"bad"}]})");
    for (Outcome o : {Outcome::Allow, Outcome::StructuralAlarm, Outcome::ContentAlarm, Outcome::ParseAlarm}) {
      CHECK(parse_outcome(to_string(o)) == o);
    }
    CHECK(thrown([] { parse_outcome("Maybe"); }) == ErrorKind::InvalidArgument);
  }
}
