#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "qclift/error.hpp"
#include "qclift/io.hpp"

using namespace qclift;

namespace {

std::string message_of_parse(const Json& j) {
  try {
    gadget_from_json(j);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("gadget JSON round-trips") {
  for (const char* name : {"and1", "ip2", "rand:2:7"}) {
    Gadget g = Gadget::builtin(name);
    CHECK(gadget_from_json(gadget_to_json(g)) == g);
  }
}

TEST_CASE("gadget parse errors carry a location") {
  Json wrong_rows = Json::parse(R"({"b": 2, "rows": ["0000", "0101", "0011"]})");
  CHECK(message_of_parse(wrong_rows).find("gadget.rows") != std::string::npos);
  Json bad_bit = Json::parse(R"({"b": 1, "rows": ["01", "1x"]})");
  CHECK(message_of_parse(bad_bit).find("gadget.rows[1]") != std::string::npos);
  CHECK_FALSE(message_of_parse(Json::parse(R"({"rows": []})")).empty());
}

TEST_CASE("protocol, tree and problem JSON round-trip") {
  SearchProblem s(2, {"1", "2", "none"}, {{2}, {1}, {0}, {0, 1}});
  SearchProblem s2 = problem_from_json(problem_to_json(s));
  CHECK(s2.table() == s.table());
  CHECK(s2.outputs() == s.outputs());
  DecisionTreeOracle o = brute_force_Ddt(s);
  ParallelDecisionTree t2 = tree_from_json(tree_to_json(o.tree));
  for (Code z = 0; z < 4; ++z) CHECK(run_tree(t2, z).output == run_tree(o.tree, z).output);
  ProtocolTree p = canonical_protocol(o.tree, Gadget::builtin("ip2"));
  Json pj = protocol_to_json(p);
  CHECK(protocol_to_json(protocol_from_json(pj)) == pj);
  RandomizedProtocol rp{{{p, Rational(1, 3)}, {ProtocolTree::leaf_only(2, 2, "1"), Rational(2, 3)}}};
  Json rj = randomized_protocol_to_json(rp);
  CHECK(is_randomized_protocol(rj));
  CHECK(randomized_protocol_to_json(randomized_protocol_from_json(rj)) == rj);
}

TEST_CASE("rationals in JSON") {
  CHECK(rational_json(Rational(3, 4)) == "3/4");
  CHECK(rational_from_json(Json("1/2"), "x") == Rational(1, 2));
  CHECK(rational_from_json(Json(2), "x") == 2);
  CHECK_THROWS_AS(rational_from_json(Json("a"), "x"), ParseError);
}

TEST_CASE("files round-trip and syntax errors report the offset") {
  auto path = std::filesystem::temp_directory_path() / "qclift_io_test.json";
  Json doc = gadget_to_json(Gadget::builtin("xor1"));
  write_json_file(path.string(), doc);
  CHECK(read_json_file(path.string()) == doc);
  {
    std::ofstream out(path);
    out << "{\"b\": 1,";
  }
  CHECK_THROWS_AS(read_json_file(path.string()), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS(read_json_file("/nonexistent/file.json"));
}

TEST_CASE("load_gadget falls back to builtins") {
  CHECK(load_gadget("ip1") == Gadget::builtin("ip1"));
  CHECK_THROWS(load_gadget("no-such-gadget"));
}
