#include "doctest.h"
#include "qclift/dtree.hpp"
#include "qclift/error.hpp"
#include "qclift/protocol.hpp"

using namespace qclift;

namespace {

SearchProblem parity(int n) {
  std::vector<std::vector<int>> valid(1U << n);
  for (Code z = 0; z < valid.size(); ++z) valid[z] = {__builtin_parity(z)};
  return SearchProblem(n, {"0", "1"}, valid);
}

}  // namespace

TEST_CASE("canonical protocol computes T(g^n(x, y)) on every input") {
  for (const char* name : {"ip1", "and1", "ip2"}) {
    Gadget g = Gadget::builtin(name);
    SearchProblem s = parity(2);
    DecisionTreeOracle o = brute_force_Ddt(s);
    ProtocolTree p = canonical_protocol(o.tree, g);
    p.validate();
    BlockSpace sp = p.space();
    for (Code x = 0; x < sp.size(); ++x) {
      for (Code y = 0; y < sp.size(); ++y) {
        Code z = outputs_on(g, sp, x, y, sp.all());
        CHECK(run_protocol(p, x, y).output == run_tree(o.tree, z).output);
      }
    }
    Complexity c = complexity(p);
    CHECK(c.C == o.depth * (g.b() + 1));
    CHECK(c.r == 2 * o.depth);
  }
}

TEST_CASE("transcripts follow back to their leaves") {
  Gadget g = Gadget::builtin("ip2");
  ProtocolTree p = canonical_protocol(brute_force_Ddt(parity(2)).tree, g);
  for (Code x = 0; x < 16; x += 5) {
    for (Code y = 0; y < 16; y += 3) {
      RunResult r = run_protocol(p, x, y);
      CHECK(follow(p, r.transcript.bits) == r.leaf);
    }
  }
}

TEST_CASE("message distribution from the root") {
  Gadget g = Gadget::builtin("ip1");
  ProtocolTree p = canonical_protocol(brute_force_Ddt(parity(2)).tree, g);
  MessageDistribution m = message_distribution(p, p.root(), DistributionTable::uniform(p.space()));
  CHECK(m.speaker == Speaker::Alice);
  CHECK(m.messages.total() == 1);
  for (const auto& [w, mass] : m.messages.masses()) {
    CHECK(message_of(p, p.root(), 0).first.size() == w.size());
  }
}

TEST_CASE("prefix-freeness and the Kraft-heavy message") {
  CHECK(is_prefix_free({"0", "10", "11"}));
  CHECK_FALSE(is_prefix_free({"0", "01"}));
  OutcomeDistribution d;
  d.add("0", Rational(1, 4));
  d.add("10", Rational(1, 4));
  d.add("11", Rational(1, 2));
  CHECK(kraft_heavy_message(d) == "10");
  OutcomeDistribution e;
  e.add("0", Rational(1, 2));
  e.add("1", Rational(1, 2));
  CHECK(kraft_heavy_message(e) == "0");
}

TEST_CASE("protocol validation") {
  ProtocolTree p(1, 1);
  int a = p.add_leaf("a");
  CHECK_THROWS(p.add_internal(Speaker::Alice, {0}, a, a));
  int n = p.add_internal(Speaker::Alice, {0, 1}, a, a);
  p.set_root(n);
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS(ProtocolTree(11, 2).validate());
}
