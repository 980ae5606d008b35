#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qclift/dtree.hpp"
#include "qclift/error.hpp"

using namespace qclift;

namespace {

SearchProblem function_problem(int n, const std::function<int(Code)>& f) {
  std::vector<std::vector<int>> valid(1U << n);
  for (Code z = 0; z < valid.size(); ++z) valid[z] = {f(z)};
  return SearchProblem(n, {"0", "1"}, valid);
}

}  // namespace

TEST_CASE("D^dt of standard functions") {
  CHECK(brute_force_Ddt(function_problem(3, [](Code z) { return __builtin_parity(z); })).depth == 3);
  CHECK(brute_force_Ddt(function_problem(2, [](Code) { return 0; })).depth == 0);
  CHECK(brute_force_Ddt(function_problem(3, [](Code z) { return (z >> 2) & 1; })).depth == 1);
  CHECK_THROWS_AS(brute_force_Ddt(function_problem(5, [](Code) { return 0; })), BudgetError);
}

TEST_CASE("D^dt agrees with the minimax oracle on random relations") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 80; ++k) {
    int n = 1 + k % 3;
    std::vector<std::vector<int>> valid(1U << n);
    for (auto& row : valid) {
      for (int o = 0; o < 3; ++o) {
        if (rng() % 3 == 0) row.push_back(o);
      }
    }
    SearchProblem s(n, {"a", "b", "c"}, valid);
    DecisionTreeOracle d = brute_force_Ddt(s);
    CHECK(d.depth == oracle::ddt(s));
    CHECK(solves(d.tree, s).solves);
    CHECK(d.tree.depth() == d.depth);
  }
}

TEST_CASE("empty rows are padded with the bottom output") {
  SearchProblem s(1, {"0"}, {{0}, {}});
  CHECK(s.is_valid(1, SearchProblem::kBottom));
  CHECK_FALSE(s.is_valid(1, "0"));
}

TEST_CASE("parallel trees: run, validate, complexity") {
  ParallelDecisionTree t(2);
  int l0 = t.add_leaf("0");
  int l1 = t.add_leaf("1");
  int q = t.add_query(set_from({0, 1}), {l0, l1, l1, l0});
  t.set_root(q);
  t.validate();
  CHECK(t.query_complexity() == 2);
  CHECK(t.depth() == 1);
  CHECK(run_tree(t, 0b10).output == "1");
  CHECK(run_tree(t, 0b11).output == "0");
  SearchProblem parity = function_problem(2, [](Code z) { return __builtin_parity(z); });
  CHECK(solves(t, parity).solves);
  std::vector<WeightedTree> mix{{t, Rational(1, 2)}, {ParallelDecisionTree(2), Rational(1, 2)}};
  mix[1].tree.set_root(mix[1].tree.add_leaf("0"));
  CHECK(randomized_error(mix, parity) == Rational(1, 2));
}
