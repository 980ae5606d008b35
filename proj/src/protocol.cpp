#include "qclift/protocol.hpp"

#include <algorithm>
#include <functional>

#include "qclift/dtree.hpp"
#include "qclift/error.hpp"

namespace qclift {

ProtocolTree ProtocolTree::leaf_only(int n, int b, const std::string& output) {
  ProtocolTree p(n, b);
  p.set_root(p.add_leaf(output));
  return p;
}

int ProtocolTree::add_leaf(const std::string& output) {
  ProtocolNode node;
  node.output = output;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

int ProtocolTree::add_internal(Speaker speaker, std::vector<std::uint8_t> bit_map, int child0, int child1) {
  if (static_cast<long>(n_) * b_ <= 20 && bit_map.size() != space().size()) {
    throw Error("bit_map must cover Lambda^n");
  }
  ProtocolNode node;
  node.leaf = false;
  node.speaker = speaker;
  node.bit_map = std::move(bit_map);
  node.children[0] = child0;
  node.children[1] = child1;
  nodes_.push_back(std::move(node));
  return static_cast<int>(nodes_.size()) - 1;
}

void ProtocolTree::validate() const {
  if (n_ < 1 || b_ < 1) throw Error("protocol needs n >= 1 and b >= 1");
  if (static_cast<long>(n_) * b_ > 20) throw BudgetError("protocol input space above 2^20");
  if (nodes_.empty()) throw Error("protocol has no nodes");
  if (root_ < 0 || root_ >= static_cast<int>(nodes_.size())) throw Error("protocol root out of range");
  const std::size_t inputs = space().size();
  std::vector<int> state(nodes_.size(), 0);
  std::function<void(int)> visit = [&](int i) {
    if (i < 0 || i >= static_cast<int>(nodes_.size())) throw Error("protocol child out of range");
    if (state[i] == 1) throw Error("protocol graph has a cycle");
    if (state[i] == 2) return;
    state[i] = 1;
    const auto& node = nodes_[i];
    if (!node.leaf) {
      if (node.bit_map.size() != inputs) throw Error("bit_map must cover Lambda^n");
      for (auto v : node.bit_map) {
        if (v > 1) throw Error("bit_map entries must be bits");
      }
      visit(node.children[0]);
      visit(node.children[1]);
    }
    state[i] = 2;
  };
  visit(root_);
}

RunResult run_protocol(const ProtocolTree& p, Code x, Code y) {
  RunResult r;
  int i = p.root();
  bool first = true;
  Speaker last = Speaker::Alice;
  while (!p.node(i).leaf) {
    const auto& node = p.node(i);
    if (!first && node.speaker != last) r.transcript.round_boundaries.push_back(static_cast<int>(r.transcript.bits.size()));
    first = false;
    last = node.speaker;
    int bit = node.bit_map.at(node.speaker == Speaker::Alice ? x : y);
    r.transcript.bits.push_back(static_cast<char>('0' + bit));
    i = node.children[bit];
  }
  r.output = p.node(i).output;
  r.leaf = i;
  return r;
}

int follow(const ProtocolTree& p, const std::string& bits) {
  int i = p.root();
  for (char ch : bits) {
    const auto& node = p.node(i);
    if (node.leaf || (ch != '0' && ch != '1')) return -1;
    i = node.children[ch - '0'];
  }
  return i;
}

std::pair<std::string, int> message_of(const ProtocolTree& p, int node, Code v) {
  std::string msg;
  int i = node;
  if (p.node(i).leaf) return {msg, i};
  const Speaker s = p.node(i).speaker;
  while (!p.node(i).leaf && p.node(i).speaker == s) {
    int bit = p.node(i).bit_map.at(v);
    msg.push_back(static_cast<char>('0' + bit));
    i = p.node(i).children[bit];
  }
  return {msg, i};
}

MessageDistribution message_distribution(const ProtocolTree& p, int node, const DistributionTable& input) {
  if (input.space() != p.space()) throw Error("speaker input must live on Lambda^n");
  if (p.node(node).leaf) throw Error("no message at a leaf");
  MessageDistribution md;
  md.speaker = p.node(node).speaker;
  for (Code v : input.support()) {
    auto [msg, end] = message_of(p, node, v);
    md.messages.add(msg, input[v]);
    md.end_node[msg] = end;
  }
  std::vector<std::string> words;
  for (const auto& [w, m] : md.messages.masses()) words.push_back(w);
  if (!is_prefix_free(words)) throw InvariantError("message set is not prefix-free");
  return md;
}

bool is_prefix_free(const std::vector<std::string>& words) {
  std::vector<std::string> sorted = words;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1].compare(0, sorted[i].size(), sorted[i]) == 0) return false;
  }
  return true;
}

std::string kraft_heavy_message(const OutcomeDistribution& d) {
  std::vector<std::string> words;
  for (const auto& [w, m] : d.masses()) {
    if (m > 0) words.push_back(w);
  }
  if (!is_prefix_free(words)) throw InvariantError("message set is not prefix-free");
  std::sort(words.begin(), words.end(), [](const std::string& a, const std::string& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  for (const auto& w : words) {
    if (d.mass(w) * pow2(static_cast<long>(w.size())) >= 1) return w;
  }
  throw InvariantError("no message w with Pr[w] >= 2^-|w|");
}

ProtocolTree canonical_protocol(const ParallelDecisionTree& t, const Gadget& g) {
  t.validate();
  const int n = t.n();
  const int b = g.b();
  ProtocolTree p(n, b);
  const BlockSpace space{n, b};
  const std::size_t inputs = space.size();
  if (static_cast<long>(n) * b > 20) throw BudgetError("canonical protocol input space above 2^20");

  // Emits the exchanges for queries[k..] of tree node `tn`; `answers` holds the
  // replies so far for this node.
  std::function<int(int)> build_node;
  std::function<int(int, std::size_t, std::uint32_t)> build_query;
  build_query = [&](int tn, std::size_t k, std::uint32_t answers) -> int {
    const auto& node = t.node(tn);
    auto coords = set_members(node.query);
    if (k == coords.size()) return build_node(node.children.at(answers));
    const int i = coords[k];
    // Alice's b bits, most significant first, then Bob's reply computed
    // from the x_i now fixed by the path.
    std::function<int(int, Code)> alice = [&](int bit, Code prefix) -> int {
      if (bit == b) {
        std::vector<std::uint8_t> map(inputs);
        for (Code y = 0; y < inputs; ++y) map[y] = static_cast<std::uint8_t>(g.eval(prefix, space.block(y, i)));
        int c0 = build_query(tn, k + 1, answers << 1);
        int c1 = build_query(tn, k + 1, (answers << 1) | 1U);
        return p.add_internal(Speaker::Bob, std::move(map), c0, c1);
      }
      std::vector<std::uint8_t> map(inputs);
      for (Code x = 0; x < inputs; ++x) map[x] = static_cast<std::uint8_t>((space.block(x, i) >> (b - 1 - bit)) & 1U);
      int c0 = alice(bit + 1, prefix << 1);
      int c1 = alice(bit + 1, (prefix << 1) | 1U);
      return p.add_internal(Speaker::Alice, std::move(map), c0, c1);
    };
    return alice(0, 0);
  };
  build_node = [&](int tn) -> int {
    const auto& node = t.node(tn);
    if (node.leaf) return p.add_leaf(node.output);
    return build_query(tn, 0, 0);
  };
  p.set_root(build_node(t.root()));
  return p;
}

Complexity complexity(const ProtocolTree& p) {
  std::function<Complexity(int, int)> walk = [&](int i, int last) -> Complexity {
    const auto& node = p.node(i);
    if (node.leaf) return {};
    int s = node.speaker == Speaker::Alice ? 0 : 1;
    Complexity best;
    for (int c : node.children) {
      Complexity sub = walk(c, s);
      best.C = std::max(best.C, sub.C);
      best.r = std::max(best.r, sub.r);
    }
    best.C += 1;
    if (s != last) best.r += 1;
    return best;
  };
  return walk(p.root(), -1);
}

void RandomizedProtocol::validate() const {
  if (components.empty()) throw Error("randomized protocol has no components");
  Rational total = 0;
  for (const auto& c : components) {
    if (c.weight < 0) throw Error("negative component weight");
    total += c.weight;
    c.protocol.validate();
    if (c.protocol.n() != components.front().protocol.n() || c.protocol.b() != components.front().protocol.b()) {
      throw Error("components disagree on n or b");
    }
  }
  if (total != 1) throw Error("component weights must sum to 1");
}

}  // namespace qclift
