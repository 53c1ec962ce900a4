#include "varflow/config.hpp"
#include "varflow/output.hpp"

#include <doctest.h>

#include <sstream>

using namespace varflow;

TEST_CASE("config defaults and parsing") {
  std::istringstream is("# comment\n\nalpha = 0.6\n  Q=3  \nr0 = 0.2\nlog_base = two\nkind = flat_stack\n");
  const Config c = parse_config(is);
  CHECK(c.alpha == 0.6);
  CHECK(c.Q == 3);
  CHECK(c.r0_or(0.1) == 0.2);
  CHECK(c.log_base == LogBase::two);
  CHECK(c.kind == FixtureKind::flat_stack);
  CHECK(c.zeta == 0.1);
  CHECK(c.delta == 0.2);
  CHECK(c.quad_order == 3);
  CHECK_NOTHROW(c.validate());
  CHECK(Config{}.r0_or(0.1) == 0.1);
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream is(text);
    try {
      parse_config(is);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("alpha = 0.6\nbogus = 1\n") == 2u);
  CHECK(line_of("alpha 0.6\n") == 1u);
  CHECK(line_of("\n\nQ = two\n") == 3u);
  CHECK(line_of("alpha = 0.6x\n") == 1u);
}

TEST_CASE("config invariants") {
  Config c;
  c.alpha = 0.5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.allow_critical = true;
  CHECK_NOTHROW(c.validate());
  Config q;
  q.Q = 0;
  CHECK_THROWS_AS(q.validate(), InvalidArgument);
  Config e;
  e.eps = -1;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  Config o;
  o.quad_order = 4;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
}

TEST_CASE("config echo parses back to itself") {
  Config c;
  c.alpha = 0.55;
  c.r0 = 0.25;
  c.seed = 9;
  std::istringstream is(c.echo());
  const Config back = parse_config(is);
  CHECK(back.echo() == c.echo());
  std::istringstream reset("r0 = default\n");
  CHECK_FALSE(parse_config(reset, c).r0.has_value());
}

TEST_CASE("experiment config mapping") {
  Config c;
  c.mesh_level = 4;
  const ExperimentConfig e = to_experiment_config(c);
  CHECK(e.level == 4);
  CHECK(e.r0 == 0.3);
  c.r0 = 0.2;
  CHECK(to_experiment_config(c).r0 == 0.2);
}

TEST_CASE("git blob hashes") {
  CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("output header layout") {
  const std::string h = output_header("a = 1\nb = 2\n", {{"in.dvar", "abc"}});
  CHECK(h == "# varflow output\n# config a = 1\n# config b = 2\n# input in.dvar abc\n");
}
