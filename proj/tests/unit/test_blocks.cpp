#include <random>

#include "doctest.h"
#include "qclift/blocks.hpp"
#include "qclift/error.hpp"

using namespace qclift;

TEST_CASE("canonical subset order: size, then lexicographic members") {
  const auto& s = canonical_subsets(3);
  REQUIRE(s.size() == 8);
  std::vector<std::string> got;
  for (CoordSet c : s) got.push_back(format_set(c));
  CHECK(got == std::vector<std::string>{"{}", "{0}", "{1}", "{2}", "{0,1}", "{0,2}", "{1,2}", "{0,1,2}"});
  CHECK_THROWS_AS(canonical_subsets(21), BudgetError);
}

TEST_CASE("first block is most significant") {
  BlockSpace s{3, 2};
  Code x = 0b011011;  // blocks 01, 10, 11
  CHECK(s.block(x, 0) == 1);
  CHECK(s.block(x, 1) == 2);
  CHECK(s.block(x, 2) == 3);
  CHECK(s.format(x) == "01|10|11");
  CHECK(s.with_block(x, 1, 0) == 0b010011);
}

TEST_CASE("project and merge are inverse") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    int n = 1 + static_cast<int>(rng() % 4);
    int b = 1 + static_cast<int>(rng() % 2);
    BlockSpace s{n, b};
    Code x = static_cast<Code>(rng() % s.size());
    CoordSet I = static_cast<CoordSet>(rng() % (1U << n));
    CHECK(s.merge(I, s.project(x, I), s.project(x, s.all() & ~I)) == x);
  }
}

TEST_CASE("bit vectors round-trip") {
  BitVector v = BitVector::from_string("0110");
  CHECK(v.code() == 6);
  CHECK(BitVector::from_code(6, 4) == v);
  CHECK(v.to_string() == "0110");
  CHECK_THROWS_AS(BitVector::from_string("01x"), ParseError);
}
