#include "doctest.h"
#include "qclift/error.hpp"
#include "qclift/dtree.hpp"
#include "qclift/simulate.hpp"

using namespace qclift;

namespace {

SearchProblem parity2() {
  return SearchProblem(2, {"0", "1"}, {{0}, {1}, {1}, {0}});
}

ProtocolTree parity_protocol() { return canonical_protocol(brute_force_Ddt(parity2()).tree, Gadget::builtin("ip2")); }

}  // namespace

TEST_CASE("derived parameters") {
  LiftingParams d = LiftingParams::derive(SimMode::Deterministic, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  CHECK(d.eps == LogReal(Rational(1, 32)));
  CHECK(d.delta == LogReal(Rational(1) - Rational(1, 8) + Rational(1, 64)));
  CHECK(d.tau == d.delta * Rational(2) - d.eps);
  CHECK(d.gamma == LogReal(Rational(1, 2)));
  LiftingParams r = LiftingParams::derive(SimMode::Randomized, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  CHECK(r.eps == LogReal(Rational(6, 32)));  // log2 64 = 6
  CHECK_FALSE(r.nonstandard);
  r.override_values(LogReal(Rational(1, 2)), std::nullopt, std::nullopt, std::nullopt);
  CHECK(r.nonstandard);
}

TEST_CASE("regime checks name the failing inequalities") {
  LiftingParams d = LiftingParams::derive(SimMode::Deterministic, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  auto checks = regime_checks(d, Rational(1, 4));
  bool saw = false;
  for (const auto& c : checks) {
    if (c.name == "eps >= 4/b") {
      saw = true;
      CHECK_FALSE(c.holds);
    }
  }
  CHECK(saw);
}

TEST_CASE("deterministic simulation certifies every input") {
  ProtocolTree p = parity_protocol();
  Gadget g = Gadget::builtin("ip2");
  LiftingParams prm = LiftingParams::derive(SimMode::Deterministic, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  for (Code zc = 0; zc < 4; ++zc) {
    BitVector z = BitVector::from_code(zc, 2);
    SimResult r = lift_deterministic(p, g, z, prm);
    REQUIRE(r.completed());
    CHECK(certify_transcript(r, p, g, z).has_value());
    CHECK(r.output == std::to_string(__builtin_parity(zc)));
    CHECK(r.depth <= complexity(p).r);
    CHECK(ledger_assertions(r, g).unexplained() == 0);
    CHECK(r.trace.rounds.size() * 6 >= 6);
  }
}

TEST_CASE("zero-communication protocol makes zero queries") {
  ProtocolTree p = ProtocolTree::leaf_only(2, 2, "0");
  Gadget g = Gadget::builtin("ip2");
  LiftingParams prm = LiftingParams::derive(SimMode::Deterministic, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  SimResult r = lift_deterministic(p, g, BitVector::from_string("10"), prm);
  CHECK(r.completed());
  CHECK(r.total_queries == 0);
  CHECK(r.transcript.empty());
}

TEST_CASE("randomized enumeration is a distribution and matches sampling support") {
  ProtocolTree p = parity_protocol();
  Gadget g = Gadget::builtin("ip2");
  LiftingParams prm = LiftingParams::derive(SimMode::Randomized, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  BitVector z = BitVector::from_string("01");
  Rational visited = 0;
  EnumeratedDistribution d = enumerate_output_distribution(p, g, z, prm, [&](const SimResult& r, const Rational& w) {
    visited += w;
    CHECK(ledger_assertions(r, g).unexplained() == 0);
  });
  CHECK(visited == 1);
  CHECK(d.outcomes.total() == 1);
  CHECK(d.error_total() < pow2(-2));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimResult a = lift_randomized(p, g, z, prm, seed);
    SimResult b = lift_randomized(p, g, z, prm, seed);
    CHECK(a.transcript == b.transcript);
    std::string label = a.completed() ? a.transcript : std::string(kErrorLabel);
    CHECK(d.outcomes.mass(label) > 0);
  }
}

TEST_CASE("branch budget is enforced") {
  ProtocolTree p = parity_protocol();
  LiftingParams prm = LiftingParams::derive(SimMode::Randomized, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  prm.branch_budget = 2;
  CHECK_THROWS_AS(enumerate_output_distribution(p, Gadget::builtin("ip2"), BitVector::from_string("00"), prm),
                  BudgetError);
}

TEST_CASE("reference distribution is uniform over the preimage") {
  ProtocolTree p = parity_protocol();
  OutcomeDistribution ref = reference_distribution(p, Gadget::builtin("ip2"), BitVector::from_string("11"));
  CHECK(ref.total() == 1);
  ProtocolTree c = ProtocolTree::leaf_only(1, 1, "x");
  CHECK_THROWS(reference_distribution(c, Gadget::constant(1, 0), BitVector::from_string("1")));
}

TEST_CASE("deficiency snapshots are exact") {
  ProtocolTree p = parity_protocol();
  Gadget g = Gadget::builtin("ip2");
  LiftingParams prm = LiftingParams::derive(SimMode::Deterministic, Rational(1, 2), Rational(64), Rational(1), 2, 2);
  SimResult r = lift_deterministic(p, g, BitVector::from_string("00"), prm);
  REQUIRE_FALSE(r.trace.rounds.empty());
  const DeficiencySnapshot& s = r.trace.rounds.front().checkpoints.front();
  CHECK(s.power() == pow2(2 * 2 * set_size(s.free)) * s.maxprob_x * s.maxprob_y);
  CHECK(s.power() == 1);  // uniform start
}
