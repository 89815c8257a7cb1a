#include <doctest.h>

#include <json.hpp>

#include "printers.hpp"
#include "support.hpp"

using namespace wsids;
using test::run_cli;

namespace fs = std::filesystem;

namespace {

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const char* kSmall = " --n-categories 40 --n-train 30 --n-normal-test 6 --n-attack 5";

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and version") {
    for (const char* cmd : {"", "gen-corpus ", "mine ", "train ", "detect ", "explain ", "eval ", "serve "}) {
      const auto r = run_cli(std::string(cmd) + "--help");
      CHECK_MESSAGE(r.code == 0, cmd);
      CHECK(r.out.find("Usage") != std::string::npos);
    }
    const auto v = run_cli("--version");
    CHECK(v.code == 0);
    CHECK(v.out == "0.1.0\n");
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("train --corpus /nonexistent --out /tmp/x").code == 2);
    CHECK(run_cli("eval --out /tmp/x --no-such-flag 1").code == 2);
  }

  TEST_CASE("generate, train, detect and explain") {
    const test::TempDir dir;
    const auto corpus = dir / "corpus";
    REQUIRE(run_cli("gen-corpus --out " + q(corpus) + kSmall).code == 0);
    CHECK(list_xml_files(corpus / "train").size() == 30);
    CHECK(list_xml_files(corpus / "test-attack").size() == 5);

    REQUIRE(run_cli("train --corpus " + q(corpus) + " --out " + q(dir / "m1")).code == 0);
    REQUIRE(run_cli("train --corpus " + q(corpus / "train") + " --out " + q(dir / "m2")).code == 0);
    const auto m1 = snapshot(dir / "m1");
    CHECK(m1 == snapshot(dir / "m2"));
    CHECK(m1.size() == 4);
    for (auto name : {kRulesFile, kIndexFile, kProfileFile, kReportFile}) CHECK(m1.contains(std::string(name)));
    const auto report = nlohmann::json::parse(m1.at(std::string(kReportFile)));
    CHECK(report.at("version") == "0.1.0");
    CHECK(report.at("documents") == 30);
    CHECK(report.at("config").at("minsup") == "2");

    const auto model = " --model-dir " + q(dir / "m1");
    const auto train_file = list_xml_files(corpus / "train").front();
    const auto allow = run_cli("detect" + model + " " + q(train_file));
    CHECK(allow.code == 0);
    const auto line = nlohmann::json::parse(allow.out);
    CHECK(line.at("outcome") == "Allow");
    CHECK(line.at("file") == train_file.string());

    fs::path recursive;
    for (const auto& l : test::lines(read_file(corpus / "labels.tsv"))) {
      if (l.ends_with("\tRecursivePayload")) recursive = corpus / l.substr(0, l.find('\t'));
    }
    REQUIRE_FALSE(recursive.empty());
    const auto alarm = run_cli("detect" + model + " " + q(recursive));
    CHECK(alarm.code == 1);
    CHECK(nlohmann::json::parse(alarm.out).at("outcome") == "ParseAlarm");

    const auto all = run_cli("detect" + model + " " + q(corpus / "test-attack") + " --output " + q(dir / "v.jsonl"));
    CHECK(all.code == 1);
    CHECK(test::lines(read_file(dir / "v.jsonl")).size() == 5);

    const auto ex = run_cli("explain" + model + " " + q(train_file));
    CHECK(ex.code == 0);
    CHECK(nlohmann::json::parse(ex.out).contains("nodes"));
    CHECK(run_cli("explain" + model + " " + q(recursive)).code == 1);

    CHECK(run_cli("detect --model-dir " + q(dir / "absent") + " " + q(train_file)).code == 2);
    CHECK(run_cli("detect" + model + " " + q(dir / "absent.xml")).code == 2);

    const auto mined = run_cli("mine --input " + q(corpus / "train") + " --max-size 2");
    CHECK(mined.code == 0);
    CHECK_FALSE(mined.out.empty());
    for (const auto& l : test::lines(mined.out)) CHECK(l.find('\t') != std::string::npos);
  }

  TEST_CASE("empty corpus leaves no model behind") {
    const test::TempDir dir;
    fs::create_directories(dir / "empty");
    const auto r = run_cli("train --corpus " + q(dir / "empty") + " --out " + q(dir / "m"));
    CHECK(r.code == 2);
    CHECK(r.err.find("wsids train:") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "m"));
  }

  TEST_CASE("config files and flag overrides") {
    const test::TempDir dir;
    REQUIRE(run_cli("gen-corpus --out " + q(dir / "c") + kSmall).code == 0);
    write_file(dir / "a.conf", "minconf = 0.9\nminsup = 3\n");
    const auto base = "--config " + q(dir / "a.conf") + " train --corpus " + q(dir / "c") + " --out ";
    REQUIRE(run_cli(base + q(dir / "m1")).code == 0);
    REQUIRE(run_cli(base + q(dir / "m2") + " --minconf 0.6").code == 0);
    const auto r1 = nlohmann::json::parse(read_file(dir / "m1" / kReportFile));
    const auto r2 = nlohmann::json::parse(read_file(dir / "m2" / kReportFile));
    CHECK(r1.at("config").at("minconf") == "0.9");
    CHECK(r2.at("config").at("minconf") == "0.6");
    CHECK(r2.at("config").at("minsup") == "3");

    write_file(dir / "bad.conf", "minsup = 2\nwhat = 1\n");
    const auto bad = run_cli("--config " + q(dir / "bad.conf") + " train --corpus " + q(dir / "c") + " --out " +
                             q(dir / "m3"));
    CHECK(bad.code == 2);
    CHECK(bad.err.find("bad.conf:2") != std::string::npos);
    CHECK(run_cli("train --corpus " + q(dir / "c") + " --out " + q(dir / "m4") + " --minconf 2").code == 2);
  }

  TEST_CASE("eval writes identical results twice") {
    const test::TempDir dir;
    const std::string plan = " --training-sizes 10,20 --repeats 1 --n-categories 40 --n-normal-test 6 --n-attack 5";
    const auto a = run_cli("eval --out " + q(dir / "a") + plan);
    const auto b = run_cli("eval --out " + q(dir / "b") + plan);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == read_file(dir / "a" / "results.csv"));
    CHECK(test::lines(a.out).size() == 3);
    CHECK(snapshot(dir / "a") == snapshot(dir / "b"));
    const auto json = nlohmann::json::parse(read_file(dir / "a" / "results.json"));
    CHECK(json.at("config").at("training_sizes") == "10,20");
  }
}
