#include "doctest.h"
#include "tfab/cli.hpp"
#include "tfab/cornerlab.hpp"
#include "tfab/dsl.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tfab;

namespace {

const char* kSample = "group G { rank 2; base e1 : 2^inf; base e2 : Z; rel (e1+e2)/3; }";

SourcePos error_pos(const std::string& text) {
  try {
    parse_presentation(text);
  } catch (const PositionedError& e) {
    return e.pos();
  }
  FAIL("expected a parse error");
  return {};
}

ErrorCode error_code(const std::string& text) {
  try {
    parse_presentation(text);
  } catch (const PositionedError& e) {
    return e.code();
  }
  FAIL("expected a parse error");
  return ErrorCode::ParseError;
}

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("tfab_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("parse the sample presentation") {
  auto doc = parse_presentation(kSample);
  CHECK(doc.name == "G");
  CHECK(doc.rank == 2);
  REQUIRE(doc.base.size() == 2);
  CHECK(doc.base[0].id == "e1");
  CHECK(doc.base[1].chi.empty());
  REQUIRE(doc.relations.size() == 1);
  CHECK(doc.relations[0].modulus == 3);
  Group g = doc.to_group();
  CHECK(g.universe() == std::set<Prime>{2, 3});
  CHECK(g.member(parse_element(doc, "(e1+e2)/3")));
  CHECK_FALSE(g.member(parse_element(doc, "e2/3")));
}

TEST_CASE("comments, whitespace and coefficients") {
  auto doc = parse_presentation(
      "# leading comment\n"
      "group H {\n"
      "  rank 3;   # three lines\n"
      "  base a : 2^inf * 5^2;\n"
      "  base b : 3^1;\n"
      "  base c : Z;\n"
      "  rel (2*a - 3 b + c)/7;\n"
      "  rel (-a + c)/2;\n"
      "}\n");
  CHECK(doc.base[0].chi.str() == "2^inf * 5^2");
  CHECK(doc.relations[0].terms == std::vector<std::pair<Int, std::string>>{{2, "a"}, {-3, "b"}, {1, "c"}});
  CHECK(doc.relations[1].terms.front().first == -1);
  CHECK(doc.to_group().rank() == 3);
}

TEST_CASE("parse errors carry positions") {
  auto p = error_pos("group G { rank 2; base e1 : 2^inf\n base e2 : Z; }");
  CHECK(p.line == 2);
  CHECK(p.col == 2);
  CHECK(error_pos("group G { rank 2; base e1 : 4^inf; base e2 : Z; }") == SourcePos{1, 29});
  CHECK(error_pos("group G { rank 3; base e1 : Z; }") == SourcePos{1, 11});
  CHECK(error_pos("group G { rank 1; base e1 : Z; base e1 : Z; }").col == 37);
  CHECK(error_pos("group G { rank 1; base e1 : Z; } extra").col == 34);
  CHECK(error_pos("group G { rank 1; base e1 : 2^inf * 2^1; }").col == 37);
  CHECK(error_pos("group G { rank 1; base e1 : Z; rel (e1 - e1)/3; }").col == 32);
  CHECK(error_pos("group G { rank 1; base e1 : Z; rel (e1)/0; }").col == 41);
  CHECK(error_pos("group G { rank 1; base e1 : 2^99; }").col == 31);
  CHECK(error_pos("group G { rank 1; base e1 : Z; $ }").col == 32);
  CHECK(error_code("group G { rank 2; base e1 : 2^inf; base e2 : Z; rel (e1+e3)/3; }") == ErrorCode::UnknownIdentifier);
  CHECK(error_pos("group G { rank 2; base e1 : 2^inf; base e2 : Z; rel (e1+e3)/3; }") == SourcePos{1, 57});
  CHECK(error_code("") == ErrorCode::ParseError);
}

TEST_CASE("print is canonical and round-trips") {
  auto doc = parse_presentation("group G{rank 2;base e1:5^1*2^inf;base e2:Z;rel(e1+e2)/3;}");
  std::string text = print_presentation(doc);
  CHECK(text ==
        "group G {\n"
        "  rank 2;\n"
        "  base e1 : 2^inf * 5^1;\n"
        "  base e2 : Z;\n"
        "  rel (e1 + e2)/3;\n"
        "}\n");
  auto again = parse_presentation(text);
  CHECK(again.same_as(doc));
  CHECK(print_presentation(again) == text);
}

TEST_CASE("element expressions") {
  auto doc = parse_presentation(kSample);
  CHECK(parse_element(doc, "2*e1 - e2/5") == QVec{Rat(2), Rat(-1, 5)});
  CHECK(parse_element(doc, "(e1 + 2 * (e2 - e1)) / 4") == QVec{Rat(-1, 4), Rat(1, 2)});
  CHECK(parse_element(doc, "0") == QVec{Rat(0), Rat(0)});
  for (const auto& s : {"e1 * e2", "e1 / 0", "e1 + 1", "e3", "(e1", "e1 e2"})
    CHECK_THROWS_AS(parse_element(doc, s), PositionedError);
  QVec x{Rat(1, 3), Rat(-2)};
  CHECK(print_element(doc, x) == "1/3*e1 - 2*e2");
  CHECK(parse_element(doc, print_element(doc, x)) == x);
}

TEST_CASE("example truncations round-trip through the DSL") {
  std::vector<Group> gs;
  auto e1 = build_example1(Example1Config::defaults(4));
  gs.insert(gs.end(), {e1.g, e1.b, e1.c, e1.d});
  auto e2 = build_example2(Example2Config::defaults(2));
  gs.insert(gs.end(), {e2.g, e2.b});
  gs.insert(gs.end(), e2.e_blocks.begin(), e2.e_blocks.end());
  auto e3 = build_example3(Example3Config::defaults(3));
  gs.push_back(e3.g);
  for (const auto& g : gs) {
    auto doc = PresentationDocument::from_group("T", g);
    auto back = parse_presentation(print_presentation(doc));
    CHECK(back.same_as(doc));
    Group h = back.to_group();
    CHECK(h.rank() == g.rank());
    CHECK(h.relations() == g.relations());
  }
}

TEST_CASE("cli commands and exit codes") {
  std::string g = temp_file("g.tfab", kSample);
  std::string pocket = temp_file("pocket.tfab", "group P { rank 2; base e1 : 2^inf; base e2 : 3^inf; rel (e1 + e2)/5; }");
  CHECK(run({"validate", g}).code == kExitTrue);
  CHECK(run({"member", g, "--elt", "(e1+e2)/3"}).code == kExitTrue);
  CHECK(run({"member", g, "--elt", "e2/3"}).code == kExitFalse);
  auto h = run({"height", g, "--elt", "e1+e2", "--prime", "3", "--json"});
  CHECK(h.code == kExitTrue);
  CHECK(h.out.find("\"height\": \"1\"") != std::string::npos);
  CHECK(run({"type", g, "--elt", "e1"}).out.find("{2}") != std::string::npos);
  CHECK(run({"purify", g, "--elt", "e1"}).code == kExitTrue);
  auto c = run({"clipped", pocket, "--bound", "5"});
  CHECK(c.code == kExitTrue);
  CHECK(c.out.find("ClippedWithinBound") != std::string::npos);
  CHECK(run({"clipped", g}).code == kExitFalse);
  CHECK(run({"decompose", g, "--json"}).out.find("\"schema\": \"tfab/1\"") != std::string::npos);
  CHECK(run({"stein", pocket, "--type", "2"}).code == kExitTrue);
  CHECK(run({"end", pocket}).code == kExitTrue);
  CHECK(run({"end", pocket, "--cap", "1"}).code == kExitInconclusive);
  CHECK(run({"example", "2", "verify", "--n", "2", "--json"}).code == kExitTrue);
  CHECK(run({"example", "3", "split", "--n", "2"}).code == kExitTrue);
  CHECK(run({"example", "4", "verify"}).code == kExitUsage);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"member", g}).code == kExitUsage);
  CHECK(run({"validate", "/nonexistent/file.tfab"}).code == kExitUsage);
  auto bad = run({"member", g, "--elt", "e1 +* 2"});
  CHECK(bad.code == kExitParse);
  CHECK(bad.err.find("--elt:1:5") != std::string::npos);
  std::string broken = temp_file("broken.tfab", "group G { rank 2; base e1 : 2^inf\n base e2 : Z; }");
  auto b = run({"validate", broken});
  CHECK(b.code == kExitParse);
  CHECK(b.err.find(":2:2:") != std::string::npos);
}

TEST_CASE("seeded commands are reproducible") {
  auto a = run({"example", "3", "verify", "--n", "3", "--summands", "4", "--seed", "9", "--json"});
  auto b = run({"example", "3", "verify", "--n", "3", "--summands", "4", "--seed", "9", "--json"});
  CHECK(a.code == kExitTrue);
  CHECK(a.out == b.out);
}
