#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qclift/distribution.hpp"
#include "qclift/error.hpp"
#include "qclift/verify.hpp"

using namespace qclift;

TEST_CASE("Fourier coefficients match the direct sum and |coef| = 2^-m bias") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 60; ++k) {
    int m = 1 + k % 4;
    BlockSpace s{m, 1};
    DistributionTable d = random_distribution(s, rng);
    auto coeffs = fourier_transform(d);
    for (std::uint32_t S = 0; S < (1U << m); ++S) {
      Rational direct = oracle::fourier(d.masses(), m, S);
      CHECK(coeffs[S] == direct);
      CHECK(fourier_coefficient(d, S) == direct);
      CHECK(abs(direct) == pow2(-m) * parity_bias(d, S));
    }
    CHECK(fourier_inverse(coeffs, m) == d.masses());
  }
}

TEST_CASE("statistical distance is half the L1 distance") {
  BlockSpace s{1, 2};
  DistributionTable a(s, {Rational(1, 2), Rational(1, 2), 0, 0});
  DistributionTable b = DistributionTable::uniform(s);
  CHECK(statistical_distance(a, b) == Rational(1, 2));
  CHECK(statistical_distance(a, a) == 0);
}

TEST_CASE("distribution tables reject bad masses") {
  BlockSpace s{1, 1};
  CHECK_THROWS(DistributionTable(s, {Rational(1, 2), Rational(1, 3)}));
  CHECK_THROWS(DistributionTable(s, {Rational(3, 2), Rational(-1, 2)}));
}

TEST_CASE("projection sums masses") {
  BlockSpace s{2, 1};
  DistributionTable d(s, {Rational(1, 8), Rational(3, 8), Rational(1, 4), Rational(1, 4)});
  DistributionTable p0 = project(d, set_from({0}));
  CHECK(p0[0] == Rational(1, 2));
  DistributionTable p1 = project(d, set_from({1}));
  CHECK(p1[1] == Rational(5, 8));
}

TEST_CASE("Vazirani: uniform distributions satisfy both sides") {
  DistributionTable u = DistributionTable::uniform(BlockSpace{3, 1});
  auto r = vazirani_uniformity_check(u, Rational(1, 4));
  CHECK(r.hypothesis);
  CHECK(r.conclusion);
  auto p = vazirani_uniformity_check(DistributionTable::point(BlockSpace{3, 1}, 0), Rational(1, 4));
  CHECK_FALSE(p.hypothesis);
}

TEST_CASE("Vazirani property: no hypothesis-true, conclusion-false instance") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    int m = 1 + k % 4;
    DistributionTable d = random_distribution(BlockSpace{m, 1}, rng, 1 + k % 40);
    for (Rational eps : {Rational(1, 4), Rational(1, 2), Rational(1)}) {
      auto r = vazirani_uniformity_check(d, eps);
      CHECK((!r.hypothesis || r.conclusion));
    }
  }
}

TEST_CASE("outcome distributions merge and measure distance") {
  OutcomeDistribution a, b;
  a.add("0", Rational(1, 2));
  a.add("1", Rational(1, 2));
  b.add("0", Rational(1));
  CHECK(statistical_distance(a, b) == Rational(1, 2));
  a.merge(b.scaled(Rational(1)));
  CHECK(a.mass("0") == Rational(3, 2));
}
