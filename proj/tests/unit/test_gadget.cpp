#include "doctest.h"
#include "oracles.hpp"
#include "qclift/error.hpp"
#include "qclift/gadget.hpp"

using namespace qclift;

TEST_CASE("builtin gadgets") {
  CHECK(Gadget::builtin("and1").table() == std::vector<std::uint8_t>{0, 0, 0, 1});
  CHECK(Gadget::builtin("ip2").eval(3, 3) == 0);
  CHECK(Gadget::builtin("ip2").eval(3, 1) == 1);
  CHECK(Gadget::builtin("rand:2:7") == Gadget::builtin("rand:2:7"));
  CHECK_THROWS_AS(Gadget::builtin("nope"), ParseError);
  CHECK_THROWS_AS(Gadget::builtin("rand:2:x"), ParseError);
}

TEST_CASE("discrepancy of the small gadgets") {
  CHECK(discrepancy(Gadget::builtin("xor1")).value == Rational(1, 4));
  CHECK(discrepancy(Gadget::builtin("and1")).value == Rational(1, 2));
  CHECK(discrepancy(Gadget::constant(1, 0)).value == 1);
}

TEST_CASE("discrepancy agrees with rectangle enumeration") {
  for (const char* name : {"and1", "or1", "xor1", "ip1", "ip2", "rand:2:1", "rand:2:7", "rand:2:99"}) {
    Gadget g = Gadget::builtin(name);
    DiscrepancyResult d = discrepancy(g);
    CHECK_MESSAGE(d.value == oracle::discrepancy(g), name);
    CHECK(rectangle_discrepancy(g, d.argmax) == d.value);
  }
}

TEST_CASE("parallel discrepancy equals sequential") {
  Gadget g = Gadget::builtin("rand:2:3");
  CHECK(discrepancy(g, kDefaultRectangleSide, 4).value == discrepancy(g).value);
}

TEST_CASE("XOR powers evaluate to parities") {
  Gadget g = Gadget::builtin("and1");
  MultiGadget h = xor_power(g, 2);
  for (Code x = 0; x < 4; ++x) {
    for (Code y = 0; y < 4; ++y) {
      CHECK(h.eval(x, y) == static_cast<std::uint32_t>(g.eval(x >> 1, y >> 1) ^ g.eval(x & 1, y & 1)));
    }
  }
}

TEST_CASE("XOR-lemma sandwich holds on the builtin set") {
  for (const char* name : {"and1", "or1", "xor1", "ip1"}) {
    for (int m = 1; m <= 3; ++m) {
      XorLemmaReport r = check_xor_lemma(Gadget::builtin(name), m);
      CHECK(r.lower <= r.value);
      CHECK(r.value <= r.upper);
      CHECK(r.sandwich_holds);
    }
  }
}

TEST_CASE("rectangle side budget") {
  CHECK_THROWS_AS(discrepancy(Gadget::builtin("ip4"), 8), BudgetError);
}
