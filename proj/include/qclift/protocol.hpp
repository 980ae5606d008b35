#pragma once

// Bit-granular two-party protocols over Lambda^n x Lambda^n.

#include <string>
#include <vector>

#include "qclift/blocks.hpp"
#include "qclift/distribution.hpp"
#include "qclift/gadget.hpp"

namespace qclift {

class ParallelDecisionTree;

enum class Speaker { Alice, Bob };
inline Speaker other(Speaker s) { return s == Speaker::Alice ? Speaker::Bob : Speaker::Alice; }
inline char speaker_char(Speaker s) { return s == Speaker::Alice ? 'A' : 'B'; }

struct ProtocolNode {
  bool leaf = true;
  std::string output;
  Speaker speaker = Speaker::Alice;
  /// bit_map[v] for every speaker input v in Lambda^n (code order).
  std::vector<std::uint8_t> bit_map;
  int children[2] = {-1, -1};
};

/// Nodes are stored in a flat vector; builders add children before parents
/// and then mark the root.
class ProtocolTree {
 public:
  ProtocolTree() = default;
  ProtocolTree(int n, int b) : n_(n), b_(b) {}

  static ProtocolTree leaf_only(int n, int b, const std::string& output);

  int n() const { return n_; }
  int b() const { return b_; }
  BlockSpace space() const { return BlockSpace{n_, b_}; }
  const std::vector<ProtocolNode>& nodes() const { return nodes_; }
  const ProtocolNode& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

  int add_leaf(const std::string& output);
  int add_internal(Speaker speaker, std::vector<std::uint8_t> bit_map, int child0, int child1);
  void set_root(int index) { root_ = index; }
  int root() const { return root_; }

  /// Bit-map sizes, child references, reachability without cycles.
  void validate() const;

 private:
  int n_ = 0;
  int b_ = 1;
  std::vector<ProtocolNode> nodes_;
  int root_ = 0;
};

struct Transcript {
  std::string bits;
  /// Indices into `bits` where the speaker changes (first index of each new round).
  std::vector<int> round_boundaries;
};

struct RunResult {
  Transcript transcript;
  std::string output;
  int leaf = -1;
};

RunResult run_protocol(const ProtocolTree& p, Code x, Code y);

/// Follows `bits` from the root; returns the node reached or -1.
int follow(const ProtocolTree& p, const std::string& bits);

struct MessageDistribution {
  Speaker speaker = Speaker::Alice;
  OutcomeDistribution messages;
  /// Node reached after each message, keyed like `messages`.
  std::map<std::string, int> end_node;
};

/// Distribution of the maximal same-speaker message from `node` when the
/// speaker's input is distributed as `input` (over Lambda^n).
MessageDistribution message_distribution(const ProtocolTree& p, int node, const DistributionTable& input);
/// Message sent from `node` by a speaker holding `v`, and the node it ends at.
std::pair<std::string, int> message_of(const ProtocolTree& p, int node, Code v);

bool is_prefix_free(const std::vector<std::string>& words);

/// First message (shortest, then lexicographic) with mass >= 2^-|w|.
std::string kraft_heavy_message(const OutcomeDistribution& d);

/// Alice sends x_i (b bits), Bob replies g(x_i, y_i), per queried coordinate.
ProtocolTree canonical_protocol(const ParallelDecisionTree& t, const Gadget& g);

struct Complexity {
  int C = 0;
  int r = 0;
};
Complexity complexity(const ProtocolTree& p);

struct WeightedProtocol {
  ProtocolTree protocol;
  Rational weight;
};

struct RandomizedProtocol {
  std::vector<WeightedProtocol> components;
  void validate() const;
};

}  // namespace qclift
