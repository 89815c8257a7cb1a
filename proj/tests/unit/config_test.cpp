#include <doctest.h>

#include "printers.hpp"
#include "support.hpp"
#include "wsids/config.hpp"

using namespace wsids;
using test::thrown;

namespace {

std::string error_of(std::string_view text) {
  Config c;
  try {
    c.load_text(text, "f.conf");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.message();
  }
  FAIL("accepted: ", text);
  return {};
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const Config c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.get("minsup") == "2");
    CHECK(c.get("minconf") == "0.5");
    CHECK(c.get("training_sizes") == "50,100,150,200,250,300");
    CHECK(c.get("coverage_required") == "true");
    CHECK(c.experiment().n_attacks == 50);
    CHECK(c.experiment().repeats == 2);
    CHECK(c.echo().size() == Config::keys().size());
    CHECK(thrown([&] { c.get("nope"); }) == ErrorKind::ConfigError);
  }

  TEST_CASE("file text") {
    Config c;
    c.load_text(
        "# tuned\n"
        "\n"
        "minsup = 5\n"
        "  minconf=0.75  \r\n"
        "training_sizes = 10, 20,30\n"
        "coverage_required = off\n"
        "upstream = http://svc:9000/x\n",
        "t");
    CHECK(c.train.mining.minsup == 5);
    CHECK(c.train.rules.minconf == 0.75);
    CHECK(c.training_sizes == std::vector<std::size_t>{10, 20, 30});
    CHECK_FALSE(c.detector.coverage_required);
    CHECK(c.gateway.upstream == "http://svc:9000/x");

    Config back;
    back.load_text(c.echo_text());
    CHECK(back.echo() == c.echo());
  }

  TEST_CASE("errors carry file and line") {
    CHECK(error_of("minsup = 2\nbogus = 1\n") == "f.conf:2: unknown config key 'bogus'");
    CHECK(error_of("\n\nminsup\n").starts_with("f.conf:3: "));
    CHECK(error_of("minsup = 2\nminsup = 3\n") == "f.conf:2: duplicate key minsup");
    CHECK(error_of("minsup = two\n").starts_with("f.conf:1: invalid value 'two' for minsup"));
    CHECK(error_of("minsup = -1\n").starts_with("f.conf:1: invalid value"));
    CHECK(error_of("minconf = 0.5x\n").starts_with("f.conf:1: invalid value"));
    CHECK(error_of("strict_soap = maybe\n").starts_with("f.conf:1: invalid value"));
    CHECK(error_of("training_sizes = 10,,20\n").starts_with("f.conf:1: invalid value"));
  }

  TEST_CASE("validation") {
    const auto invalid = [](std::string_view key, std::string_view value) {
      Config c;
      c.set(key, value);
      return thrown([&] { c.validate(); }) == ErrorKind::ConfigError;
    };
    CHECK(invalid("minsup", "0"));
    CHECK(invalid("minconf", "0"));
    CHECK(invalid("minconf", "1.5"));
    CHECK(invalid("implication_minconf", "0"));
    CHECK(invalid("max_depth", "0"));
    CHECK(invalid("training_sizes", "100,50"));
    CHECK(invalid("repeats", "0"));
    CHECK(invalid("n_categories", "0"));
  }

  TEST_CASE("files") {
    const test::TempDir dir;
    write_file(dir / "a.conf", "seed = 9\nn_train = 12\n");
    Config c;
    c.load_file(dir / "a.conf");
    CHECK(c.corpus.seed == 9);
    CHECK(c.corpus.n_train == 12);
    CHECK(thrown([&] { c.load_file(dir / "missing.conf"); }) == ErrorKind::ConfigError);
  }
}
