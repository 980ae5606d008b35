#include "doctest.h"
#include "qclift/error.hpp"
#include "qclift/verify.hpp"

using namespace qclift;

TEST_CASE("verdicts") {
  CHECK(verdict_of(true, true) == Verdict::Pass);
  CHECK(verdict_of(false, false) == Verdict::Vacuous);
  CHECK(verdict_of(true, false) == Verdict::Fail);
}

TEST_CASE("multiplicative uniformity on a uniform XOR instance") {
  Gadget g = Gadget::builtin("xor1");
  BlockSpace s{1, 1};
  DistributionTable U = DistributionTable::uniform(s);
  LemmaContext ctx{Rational(1, 2), Rational(64), discrepancy(g).value};
  LemmaCheck c = check_multiplicative_uniformity(U, U, Restriction::parse("*"), g, BitVector::from_string("0"),
                                                 Rational(1, 4), ctx);
  CHECK(c.hypothesis);
  CHECK(c.measured == 0);
  CHECK(c.verdict() == Verdict::Pass);
}

TEST_CASE("uniform marginals: AND on uniform inputs with z = 0") {
  Gadget g = Gadget::builtin("and1");
  BlockSpace s{1, 1};
  DistributionTable U = DistributionTable::uniform(s);
  LemmaContext ctx{Rational(1, 2), Rational(64), discrepancy(g).value};
  LemmaCheck c = check_uniform_marginals(U, U, Restriction::parse("*"), g, BitVector::from_string("0"),
                                         Rational(1, 4), ctx);
  // Fiber {00, 01, 10}: marginal of x is (2/3, 1/3).
  CHECK(c.measured == Rational(1, 6));
  DistributionTable one = DistributionTable::point(s, 0);
  CHECK_THROWS(check_uniform_marginals(one, one, Restriction::parse("*"), g, BitVector::from_string("1"),
                                       Rational(1, 4), ctx));
}

TEST_CASE("main-lemma tau requirement is decided exactly") {
  // slack = tau - 2 + eta + gamma = 1/2; needs slack * eps >= h / c.
  CHECK(main_lemma_tau_ok(LogReal(2), LogReal(Rational(1, 4)), Rational(1, 4), LogReal(Rational(1, 4)),
                          Rational(1), Rational(8)));
  CHECK_FALSE(main_lemma_tau_ok(LogReal(2), LogReal(Rational(1, 4)), Rational(1, 4), LogReal(Rational(1, 4)),
                                Rational(1), Rational(7)));
  LogReal eps = LogReal::log2_of(Rational(3)) / Rational(8);  // ~0.198
  CHECK(main_lemma_tau_ok(LogReal(2), eps, Rational(1, 4), LogReal(Rational(1, 4)), Rational(1), Rational(11)));
  CHECK_FALSE(main_lemma_tau_ok(LogReal(2), eps, Rational(1, 4), LogReal(Rational(1, 4)), Rational(1), Rational(10)));
}

TEST_CASE("instance runner: order, refusals, re-verification, all-vacuous flag") {
  std::vector<Instance> inst;
  inst.push_back({"a", [] { return LemmaCheck{true, true, 0, LogReal(0), ""}; }});
  inst.push_back({"b", [] { return LemmaCheck{false, false, 0, LogReal(0), ""}; }});
  inst.push_back({"c", []() -> LemmaCheck { throw BudgetError("too big"); }});
  inst.push_back({"d", [] { return LemmaCheck{true, false, 1, LogReal(0), "bad"}; }});
  for (int jobs : {1, 4}) {
    SectionReport r = run_instances("t", inst, jobs, 10);
    CHECK(r.pass == 1);
    CHECK(r.vacuous == 1);
    CHECK(r.refused == 1);
    CHECK(r.fail == 1);
    REQUIRE(r.counterexamples.size() == 1);
    CHECK(r.counterexamples[0].id == "d");
    CHECK(r.counterexamples[0].reverified);
    CHECK(r.archive["instances"].size() == 3);
  }
  SectionReport v = run_instances("v", {inst[1]}, 1);
  CHECK(v.all_vacuous());
}

TEST_CASE("planted faults are caught") {
  LemmaConfig cfg;
  cfg.gadgets = {"and1"};
  cfg.n = {1};
  cfg.supports = 1;
  auto clean = section_lemmas(cfg);
  for (const auto& s : clean) CHECK(s.fail == 0);
  auto planted = section_lemmas(cfg, {PlantedFault{"multiplicative_uniformity", Rational(0), true}});
  CHECK(planted[0].fail > 0);
  for (const auto& c : planted[0].counterexamples) CHECK(c.reverified);
}

TEST_CASE("corpus specs") {
  CorpusSpec empty = corpus_from_json(Json::object(), ".");
  CorpusReport r = run_corpus(empty);
  CHECK(r.sections.empty());
  CHECK(r.failures() == 0);
  CHECK_THROWS_AS(corpus_from_json(Json::parse(R"({"bogus": 1})"), "."), ParseError);
  CHECK_THROWS_AS(corpus_from_json(Json::parse(R"({"kraft": {"depth": 1}})"), "."), ParseError);
  CorpusSpec s = corpus_from_json(Json::parse(R"({"simulation": {"problems": ["p.json"]}})"), "/data/c");
  REQUIRE(s.simulation.has_value());
  CHECK(s.simulation->problems[0] == "/data/c/p.json");
}

TEST_CASE("sections are reproducible and independent of job count") {
  DensityConfig d;
  d.count = 20;
  d.jobs = 1;
  Json a = section_density(d).to_json();
  d.jobs = 4;
  CHECK(section_density(d).to_json() == a);
  KraftConfig k;
  k.max_depth = 3;
  k.assignments = 5;
  SectionReport kr = section_kraft(k);
  CHECK(kr.fail == 0);
  CHECK(kr.pass == 25 * 5);
}
