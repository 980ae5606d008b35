#pragma once

// JSON formats.  Rationals are strings "p/q" (or "p"); LogReals are
// rendered as "r + k*log2(B)" strings and are not read back.
//
//   gadget:   {"b": int, "rows": ["0101", ...]}              rows[x][y] = g(x, y)
//   protocol: {"n": int, "b": int, "root": node}
//             node = {"speaker": "A"|"B", "bit_map": [0,1,...], "children": [node, node]} | {"leaf": str}
//   randomized protocol: {"components": [{"weight": "1/2", "protocol": protocol}, ...]}
//   problem:  {"n": int, "outputs": [str], "table": {"01": [0, 2], ...}}
//   tree:     {"n": int, "root": tnode}
//             tnode = {"query": [int], "children": [tnode, ...]} | {"leaf": str}

#include <string>

#include "json.hpp"
#include "qclift/dtree.hpp"
#include "qclift/protocol.hpp"
#include "qclift/simulate.hpp"

namespace qclift {

using Json = nlohmann::ordered_json;

/// Parses a file, reporting the byte offset of syntax errors.
Json read_json_file(const std::string& path);
/// Writes `doc` with two-space indentation and a trailing newline.
void write_json_file(const std::string& path, const Json& doc);

std::string rational_json(const Rational& q);
Rational rational_from_json(const Json& j, const std::string& where);

Json gadget_to_json(const Gadget& g);
Gadget gadget_from_json(const Json& j);
/// A builtin name (and1, ip2, rand:2:7, ...) or a path to a gadget file.
Gadget load_gadget(const std::string& spec);

Json protocol_to_json(const ProtocolTree& p);
/// Accepts the {"n","b","root"} wrapper, or a bare node when n and b are given.
ProtocolTree protocol_from_json(const Json& j, int n = 0, int b = 0);
Json randomized_protocol_to_json(const RandomizedProtocol& rp);
RandomizedProtocol randomized_protocol_from_json(const Json& j);
bool is_randomized_protocol(const Json& j);

Json problem_to_json(const SearchProblem& s);
SearchProblem problem_from_json(const Json& j);

Json tree_to_json(const ParallelDecisionTree& t);
ParallelDecisionTree tree_from_json(const Json& j);

Json params_to_json(const LiftingParams& p);
Json result_to_json(const SimResult& r, const BlockSpace& space);
Json ledger_to_json(const LedgerReport& r);
Json enumerated_to_json(const EnumeratedDistribution& d);
Json outcome_to_json(const OutcomeDistribution& d);

}  // namespace qclift
