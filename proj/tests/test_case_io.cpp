#include "gridwatch/case_io.hpp"

#include <string>

#include "doctest.h"

using namespace gridwatch;

namespace {

const char* kTiny = R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 230;
mpc.bus = [
  1  3;
  2  1;
  3  1;
];
mpc.branch = [
  1  2  0.0  0.25;
  2  3  0.0  -0.5;
];
)";

std::string data_path(const std::string& name) {
  return std::string(GRIDWATCH_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("minimal case parses with susceptance 1/|x|") {
  GridCase gc = parse_matpower_case(kTiny);
  CHECK(gc.base_mva == doctest::Approx(230.0));
  CHECK(gc.slack == 1);
  REQUIRE(gc.buses.size() == 3);
  CHECK(gc.buses[0].id == 1);
  CHECK(gc.buses[0].area == 1);
  REQUIRE(gc.branches.size() == 2);
  CHECK(gc.branches[0].b == doctest::Approx(4.0));
  CHECK(gc.branches[1].b == doctest::Approx(2.0));
  CHECK(gc.bus_index(3) == 2);
  CHECK(gc.bus_index(7) == -1);
}

TEST_CASE("baseMVA defaults to 100 when absent") {
  std::string text = kTiny;
  text.erase(text.find("mpc.baseMVA = 230;\n"), 19);
  CHECK(parse_matpower_case(text).base_mva == doctest::Approx(100.0));
}

TEST_CASE("comments and unknown blocks are ignored") {
  const char* text = R"(% leading comment
mpc.baseMVA = 100; % trailing comment
mpc.gen = [
  1 0 0 10 -10 1.06 100 1 332 0;
];
mpc.bus = [
  1 3; % slack
  2 1;
];
mpc.branch = [ 1 2 0 0.5; ];
)";
  GridCase gc = parse_matpower_case(text);
  CHECK(gc.buses.size() == 2);
  CHECK(gc.branches.size() == 1);
}

TEST_CASE("out-of-service branches are dropped") {
  const char* text = R"(mpc.bus = [
  1 3; 2 1;
];
mpc.branch = [
  1 2 0 0.5   0 0 0 0 0 0 1;
  1 2 0 0.125 0 0 0 0 0 0 0;
];
)";
  GridCase gc = parse_matpower_case(text);
  REQUIRE(gc.branches.size() == 1);
  CHECK(gc.branches[0].b == doctest::Approx(2.0));
}

TEST_CASE("parallel branches merge by susceptance sum") {
  const char* text = R"(mpc.bus = [ 1 3; 2 1; ];
mpc.branch = [
  1 2 0 0.5;
  2 1 0 0.25;
];
)";
  GridCase gc = parse_matpower_case(text);
  REQUIRE(gc.branches.size() == 1);
  CHECK(gc.branches[0].from == 1);
  CHECK(gc.branches[0].to == 2);
  CHECK(gc.branches[0].b == doctest::Approx(6.0));
}

TEST_CASE("ragged matrix rows carry the offending line number") {
  const char* text = R"(mpc.bus = [
  1 3;
  2 1 0;
];
mpc.branch = [ 1 2 0 0.5; ];
)";
  try {
    parse_matpower_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("columns") != std::string::npos);
  }
}

TEST_CASE("non-numeric matrix tokens are rejected") {
  const char* text = "mpc.bus = [ 1 3; two 1; ];\nmpc.branch = [ 1 2 0 0.5; ];\n";
  CHECK_THROWS_AS(parse_matpower_case(text), ParseError);
}

TEST_CASE("unterminated block is rejected") {
  CHECK_THROWS_AS(parse_matpower_case("mpc.bus = [\n 1 3;\n 2 1;\n"), ParseError);
}

TEST_CASE("missing required blocks are rejected") {
  CHECK_THROWS_AS(parse_matpower_case("mpc.baseMVA = 100;\n"), ParseError);
  CHECK_THROWS_AS(parse_matpower_case("mpc.bus = [ 1 3; ];\n"), ParseError);
}

TEST_CASE("slack multiplicity is validated") {
  CHECK_THROWS_AS(parse_matpower_case("mpc.bus = [ 1 1; 2 1; ];\n"
                                      "mpc.branch = [ 1 2 0 0.5; ];\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_matpower_case("mpc.bus = [ 1 3; 2 3; ];\n"
                                      "mpc.branch = [ 1 2 0 0.5; ];\n"),
                  ValidationError);
}

TEST_CASE("zero reactance is rejected") {
  CHECK_THROWS_AS(parse_matpower_case("mpc.bus = [ 1 3; 2 1; ];\n"
                                      "mpc.branch = [ 1 2 0 0.0; ];\n"),
                  ValidationError);
}

TEST_CASE("structural validation rejects bad graphs") {
  GridCase gc = parse_matpower_case(kTiny);

  GridCase dup = gc;
  dup.buses.push_back({2, 1});
  std::sort(dup.buses.begin(), dup.buses.end(),
            [](const Bus& a, const Bus& b) { return a.id < b.id; });
  CHECK_THROWS_AS(validate(dup), ValidationError);

  GridCase dangling = gc;
  dangling.branches.push_back({3, 9, 1.0});
  CHECK_THROWS_AS(validate(dangling), ValidationError);

  GridCase self = gc;
  self.branches.push_back({2, 2, 1.0});
  CHECK_THROWS_AS(validate(self), ValidationError);

  GridCase split = gc;
  split.buses.push_back({4, 1});
  split.buses.push_back({5, 1});
  split.branches.push_back({4, 5, 1.0});
  CHECK_THROWS_AS(validate(split), ValidationError);

  GridCase negative = gc;
  negative.branches[0].b = -1.0;
  CHECK_THROWS_AS(validate(negative), ValidationError);

  GridCase no_slack = gc;
  no_slack.slack = 9;
  CHECK_THROWS_AS(validate(no_slack), ValidationError);
}

TEST_CASE("canonical JSON round trip is byte-stable") {
  GridCase gc = parse_matpower_case(kTiny);
  const std::string one = to_canonical_json(gc);
  GridCase back = from_canonical_json(one);
  const std::string two = to_canonical_json(back);
  CHECK(one == two);
  CHECK(one.back() == '\n');
  CHECK(back.slack == gc.slack);
  CHECK(back.buses.size() == gc.buses.size());
  CHECK(back.branches.size() == gc.branches.size());
  CHECK(back.branches[0].b == doctest::Approx(gc.branches[0].b));

  // Field order in the output is fixed regardless of construction order.
  GridCase shuffled = gc;
  std::swap(shuffled.branches[0], shuffled.branches[1]);
  std::swap(shuffled.buses[0], shuffled.buses[2]);
  CHECK(to_canonical_json(shuffled) == one);
}

TEST_CASE("canonical JSON rejects missing fields") {
  CHECK_THROWS_AS(from_canonical_json("{}"), ParseError);
  CHECK_THROWS_AS(from_canonical_json("not json"), ParseError);
  CHECK_THROWS_AS(
      from_canonical_json(R"({"base_mva":100,"slack":1,"buses":[{"id":1}],"branches":[]})"),
      ParseError);
}

TEST_CASE("bundled IEEE cases load with expected shapes") {
  GridCase c14 = load_case_file(data_path("case14.m"));
  CHECK(c14.buses.size() == 14);
  CHECK(c14.branches.size() == 20);
  CHECK(c14.slack == 1);
  for (const auto& b : c14.buses) CHECK(b.area == 1);
  // branch 1-2: x = 0.05917
  CHECK(c14.branches[0].b == doctest::Approx(1.0 / 0.05917));

  GridCase c30 = load_case_file(data_path("case30.m"));
  CHECK(c30.buses.size() == 30);
  CHECK(c30.branches.size() == 41);
  CHECK(c30.slack == 1);
  bool seen[4] = {false, false, false, false};
  for (const auto& b : c30.buses) {
    REQUIRE(b.area >= 1);
    REQUIRE(b.area <= 3);
    seen[b.area] = true;
  }
  CHECK(seen[1]);
  CHECK(seen[2]);
  CHECK(seen[3]);
}

TEST_CASE("missing file raises") {
  CHECK_THROWS_AS(load_case_file(data_path("nope.m")), Error);
}
