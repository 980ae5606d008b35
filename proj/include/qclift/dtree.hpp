#pragma once

// Search problems over {0,1}^n and parallel decision trees.

#include <optional>
#include <string>
#include <vector>

#include "qclift/blocks.hpp"
#include "qclift/exact.hpp"

namespace qclift {

/// Relation S subset {0,1}^n x O.  Inputs are codes with z_0 most significant.
class SearchProblem {
 public:
  static constexpr const char* kBottom = "\xE2\x8A\xA5";  // the padding output

  SearchProblem() = default;
  /// `valid[z]` lists output indices; an empty list is padded with the bottom output.
  SearchProblem(int n, std::vector<std::string> outputs, std::vector<std::vector<int>> valid);

  int n() const { return n_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<std::vector<int>>& table() const { return valid_; }
  bool is_valid(Code z, const std::string& output) const;
  int output_index(const std::string& output) const;

 private:
  int n_ = 0;
  std::vector<std::string> outputs_;
  std::vector<std::vector<int>> valid_;
};

struct TreeNode {
  bool leaf = true;
  std::string output;
  CoordSet query = 0;
  /// 2^|query| children indexed by the answers, first member most significant.
  std::vector<int> children;
};

class ParallelDecisionTree {
 public:
  ParallelDecisionTree() = default;
  explicit ParallelDecisionTree(int n) : n_(n) {}

  int n() const { return n_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  int root() const { return root_; }

  int add_leaf(const std::string& output);
  int add_query(CoordSet query, std::vector<int> children);
  void set_root(int index) { root_ = index; }
  void validate() const;

  /// Total number of queried coordinates on the worst path.
  int query_complexity() const;
  /// Number of query nodes on the worst path.
  int depth() const;

 private:
  int n_ = 0;
  std::vector<TreeNode> nodes_;
  int root_ = 0;
};

struct TreeRun {
  std::string output;
  std::vector<CoordSet> queries;  // one entry per query node visited
};

TreeRun run_tree(const ParallelDecisionTree& t, Code z);

struct SolveCheck {
  bool solves = true;
  std::optional<Code> counterexample;
  std::string output;
};

SolveCheck solves(const ParallelDecisionTree& t, const SearchProblem& s);

struct WeightedTree {
  ParallelDecisionTree tree;
  Rational weight;
};

/// max_z sum_k w_k [T_k(z) not in S(z)].
Rational randomized_error(const std::vector<WeightedTree>& trees, const SearchProblem& s);

struct DecisionTreeOracle {
  int depth = 0;
  ParallelDecisionTree tree;
};

constexpr int kDefaultOracleMaxN = 4;

/// Exact serial decision-tree depth by memoized search over the set of
/// inputs consistent with the answers so far, with an optimal tree.
DecisionTreeOracle brute_force_Ddt(const SearchProblem& s, int max_n = kDefaultOracleMaxN);

}  // namespace qclift
