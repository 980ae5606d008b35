#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qclift/error.hpp"
#include "qclift/structure.hpp"
#include "qclift/verify.hpp"

using namespace qclift;

TEST_CASE("restrictions") {
  Restriction r = Restriction::parse("*1*0");
  CHECK(r.free() == set_from({0, 2}));
  CHECK(r.fixed() == set_from({1, 3}));
  CHECK(r.consistent(BitVector::from_string("0100")));
  CHECK_FALSE(r.consistent(BitVector::from_string("0000")));
  CHECK_THROWS_AS(Restriction::parse("*2"), ParseError);
}

TEST_CASE("density agrees with the brute-force definition") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 150; ++k) {
    int n = 1 + k % 3;
    int b = 1 + (k / 3) % 2;
    BlockSpace s{n, b};
    DistributionTable X = k % 2 ? random_distribution(s, rng)
                                : DistributionTable::uniform_on(s, random_support(s, rng));
    for (Rational delta : {Rational(1, 4), Rational(1, 2), Rational(3, 4), Rational(1)}) {
      CHECK(is_dense(X, LogReal(delta)).dense == oracle::dense(X.masses(), n, b, delta));
    }
  }
}

TEST_CASE("max density is the largest delta for which X is dense") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 40; ++k) {
    BlockSpace s{1 + k % 2, 2};
    DistributionTable X = DistributionTable::uniform_on(s, random_support(s, rng));
    DensityBracket d = max_density(X);
    CHECK(is_dense(X, d.exact).dense);
    CHECK(d.lower <= d.upper);
    CHECK(LogReal(d.lower) <= d.exact);
    CHECK_FALSE(is_dense(X, d.exact + LogReal(Rational(1, 64))).dense);
  }
}

TEST_CASE("density-restoring fix leaves a dense remainder") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 60; ++k) {
    BlockSpace s{1 + k % 3, 1 + k % 2};
    DistributionTable X = random_distribution(s, rng);
    for (Rational delta : {Rational(1, 2), Rational(3, 4)}) {
      DensityFix f = density_restoring_fix(X, LogReal(delta));
      CHECK(is_dense(f.remainder, LogReal(delta)).dense);
      CHECK(check_partition(X, LogReal(delta), density_restoring_partition(X, LogReal(delta))).ok());
    }
  }
}

TEST_CASE("leaking agrees with the brute-force definition") {
  std::mt19937_64 rng(34);
  for (const char* name : {"xor1", "and1", "ip2"}) {
    Gadget g = Gadget::builtin(name);
    BlockSpace s{2, g.b()};
    for (int k = 0; k < 10; ++k) {
      DistributionTable Y = DistributionTable::uniform_on(s, random_support(s, rng));
      for (Code x = 0; x < s.size(); ++x) {
        auto w = is_leaking(x, Y, g);
        CHECK(w.has_value() == oracle::leaking(x, Y.masses(), g, 2));
        if (w) CHECK(recheck(*w, x, Y, g));
      }
    }
  }
}

TEST_CASE("witnesses from the danger tests re-verify") {
  std::mt19937_64 rng(35);
  Gadget g = Gadget::builtin("ip2");
  BlockSpace s{2, 2};
  for (int k = 0; k < 10; ++k) {
    DistributionTable Y = DistributionTable::uniform_on(s, random_support(s, rng));
    DangerParams p{max_density(Y).exact, LogReal(Rational(1, 4))};
    for (Code x = 0; x < s.size(); ++x) {
      if (auto w = is_sparsifying(x, Y, g, p)) CHECK(recheck(*w, x, Y, g, p));
      if (auto w = is_skewing(x, Y, g, p)) CHECK(recheck(*w, x, Y, g, p));
      if (auto w = is_biasing(x, Y, g, p, Rational(64), 2)) CHECK(recheck(*w, x, Y, g, p, Rational(64), 2));
    }
  }
}

TEST_CASE("structure certificates re-verify") {
  Gadget g = Gadget::builtin("xor1");
  BlockSpace s{2, 1};
  DistributionTable U = DistributionTable::uniform(s);
  auto c = is_structured(U, U, Restriction::parse("**"), LogReal(2), g);
  REQUIRE(c.certificate.has_value());
  CHECK(verify_certificate(U, U, *c.certificate, g));
  auto bad = is_structured(U, U, Restriction::parse("0*"), LogReal(1), g);
  CHECK_FALSE(bad.certificate.has_value());
  CHECK(bad.refusal == "fixed-block consistency");
}
