#include "qclift/dtree.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "qclift/error.hpp"

namespace qclift {

SearchProblem::SearchProblem(int n, std::vector<std::string> outputs, std::vector<std::vector<int>> valid)
    : n_(n), outputs_(std::move(outputs)), valid_(std::move(valid)) {
  if (n < 1 || n > 20) throw Error("search problem needs 1 <= n <= 20");
  if (valid_.size() != (std::size_t{1} << n)) throw Error("search problem table must list every input");
  int bottom = -1;
  for (auto& row : valid_) {
    for (int o : row) {
      if (o < 0 || o >= static_cast<int>(outputs_.size())) throw Error("output index out of range");
    }
    if (row.empty()) {
      if (bottom < 0) {
        bottom = output_index(kBottom);
        if (bottom < 0) {
          outputs_.emplace_back(kBottom);
          bottom = static_cast<int>(outputs_.size()) - 1;
        }
      }
      row.push_back(bottom);
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
}

int SearchProblem::output_index(const std::string& output) const {
  auto it = std::find(outputs_.begin(), outputs_.end(), output);
  return it == outputs_.end() ? -1 : static_cast<int>(it - outputs_.begin());
}

bool SearchProblem::is_valid(Code z, const std::string& output) const {
  int o = output_index(output);
  if (o < 0) return false;
  const auto& row = valid_.at(z);
  return std::binary_search(row.begin(), row.end(), o);
}

int ParallelDecisionTree::add_leaf(const std::string& output) {
  TreeNode node;
  node.output = output;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int ParallelDecisionTree::add_query(CoordSet query, std::vector<int> children) {
  if (query == 0) throw Error("query node with empty query set");
  if (children.size() != (std::size_t{1} << set_size(query))) throw Error("query node needs 2^|I| children");
  TreeNode node;
  node.leaf = false;
  node.query = query;
  node.children = std::move(children);
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

void ParallelDecisionTree::validate() const {
  if (nodes_.empty()) throw Error("decision tree has no nodes");
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size())) throw Error("decision tree root out of range");
  std::vector<int> state(nodes_.size(), 0);
  std::function<void(int)> visit = [&](int i) {
    if (i < 0 || i >= static_cast<int>(nodes_.size())) throw Error("decision tree child out of range");
    if (state[i] == 1) throw Error("decision tree has a cycle");
    if (state[i] == 2) return;
    state[i] = 1;
    const auto& node = nodes_[i];
    if (!node.leaf) {
      if (node.query >> n_) throw Error("query outside [n]");
      for (int c : node.children) visit(c);
    }
    state[i] = 2;
  };
  visit(root_);
}

namespace {

template <typename F>
int worst_path(const ParallelDecisionTree& t, int i, F weight) {
  const auto& node = t.node(i);
  if (node.leaf) return 0;
  int best = 0;
  for (int c : node.children) best = std::max(best, worst_path(t, c, weight));
  return best + weight(node);
}

}  // namespace

int ParallelDecisionTree::query_complexity() const {
  return worst_path(*this, root_, [](const TreeNode& n) { return set_size(n.query); });
}

int ParallelDecisionTree::depth() const {
  return worst_path(*this, root_, [](const TreeNode&) { return 1; });
}

TreeRun run_tree(const ParallelDecisionTree& t, Code z) {
  TreeRun run;
  int i = t.root();
  while (!t.node(i).leaf) {
    const auto& node = t.node(i);
    std::uint32_t answer = 0;
    for (int c : set_members(node.query)) answer = (answer << 1) | ((z >> (t.n() - 1 - c)) & 1U);
    run.queries.push_back(node.query);
    i = node.children.at(answer);
  }
  run.output = t.node(i).output;
  return run;
}

SolveCheck solves(const ParallelDecisionTree& t, const SearchProblem& s) {
  if (t.n() != s.n()) throw Error("tree and problem disagree on n");
  for (Code z = 0; z < (Code{1} << s.n()); ++z) {
    auto run = run_tree(t, z);
    if (!s.is_valid(z, run.output)) return SolveCheck{false, z, run.output};
  }
  return SolveCheck{};
}

Rational randomized_error(const std::vector<WeightedTree>& trees, const SearchProblem& s) {
  Rational total = 0;
  for (const auto& wt : trees) {
    if (wt.weight < 0) throw Error("negative tree weight");
    total += wt.weight;
  }
  if (total != 1) throw Error("tree weights must sum to 1");
  Rational worst = 0;
  for (Code z = 0; z < (Code{1} << s.n()); ++z) {
    Rational err = 0;
    for (const auto& wt : trees) {
      if (!s.is_valid(z, run_tree(wt.tree, z).output)) err += wt.weight;
    }
    worst = std::max(worst, err);
  }
  return worst;
}

DecisionTreeOracle brute_force_Ddt(const SearchProblem& s, int max_n) {
  const int n = s.n();
  if (n > max_n) throw BudgetError("decision-tree oracle limited to n <= " + std::to_string(max_n));
  const Code inputs = Code{1} << n;
  using Mask = std::uint64_t;  // set of inputs, n <= 6 fits

  // Smallest output index valid on every input of the mask, or -1.
  auto common_output = [&](Mask mask) {
    for (int o = 0; o < static_cast<int>(s.outputs().size()); ++o) {
      bool ok = true;
      for (Code z = 0; z < inputs && ok; ++z) {
        if ((mask >> z) & 1U) ok = std::binary_search(s.table()[z].begin(), s.table()[z].end(), o);
      }
      if (ok) return o;
    }
    return -1;
  };
  auto split = [&](Mask mask, int coord, int bit) {
    Mask out = 0;
    for (Code z = 0; z < inputs; ++z) {
      if (((mask >> z) & 1U) && static_cast<int>((z >> (n - 1 - coord)) & 1U) == bit) out |= Mask{1} << z;
    }
    return out;
  };

  struct Entry {
    int depth;
    int coord;   // -1 at a leaf
    int output;  // leaf output index
  };
  std::unordered_map<Mask, Entry> memo;
  std::function<int(Mask)> solve = [&](Mask mask) -> int {
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second.depth;
    Entry e{0, -1, common_output(mask)};
    if (e.output < 0) {
      e.depth = n + 1;
      for (int c = 0; c < n; ++c) {
        Mask m0 = split(mask, c, 0);
        Mask m1 = split(mask, c, 1);
        if (m0 == 0 || m1 == 0) continue;
        int d = 1 + std::max(solve(m0), solve(m1));
        if (d < e.depth) {
          e.depth = d;
          e.coord = c;
        }
      }
      if (e.coord < 0) throw InvariantError("no informative query on a non-trivial input set");
    }
    memo[mask] = e;
    return e.depth;
  };

  const Mask all = inputs == 64 ? ~Mask{0} : ((Mask{1} << inputs) - 1);
  DecisionTreeOracle result;
  result.depth = solve(all);
  result.tree = ParallelDecisionTree(n);
  std::function<int(Mask)> build = [&](Mask mask) -> int {
    const Entry& e = memo.at(mask);
    if (e.coord < 0) return result.tree.add_leaf(s.outputs()[e.output]);
    int c0 = build(split(mask, e.coord, 0));
    int c1 = build(split(mask, e.coord, 1));
    return result.tree.add_query(CoordSet{1} << e.coord, {c0, c1});
  };
  result.tree.set_root(build(all));
  return result;
}

}  // namespace qclift
