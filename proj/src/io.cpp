#include "qclift/io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

#include "qclift/error.hpp"

namespace qclift {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing \"") + key + "\"");
  return *it;
}

int int_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) fail(where + "." + key, "expected an integer");
  return v.get<int>();
}

std::string str_field(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) fail(where + "." + key, "expected a string");
  return v.get<std::string>();
}

std::string speaker_name(Speaker s) { return std::string(1, speaker_char(s)); }

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw ParseError(path + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(path + ": cannot write file");
  out << doc.dump(2) << '\n';
}

std::string rational_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) fail(where, "expected a rational string");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Json gadget_to_json(const Gadget& g) {
  Json j;
  j["b"] = g.b();
  Json rows = Json::array();
  for (Code x = 0; x < g.side(); ++x) {
    std::string row;
    for (Code y = 0; y < g.side(); ++y) row.push_back(static_cast<char>('0' + g.eval(x, y)));
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j;
}

Gadget gadget_from_json(const Json& j) {
  const std::string where = "gadget";
  int b = int_field(j, "b", where);
  if (b < 1 || b > 12) fail(where + ".b", "block length must lie in 1..12");
  const Json& rows = field(j, "rows", where);
  if (!rows.is_array()) fail(where + ".rows", "expected an array");
  const std::size_t side = std::size_t{1} << b;
  if (rows.size() != side) {
    fail(where + ".rows", "expected " + std::to_string(side) + " rows, found " + std::to_string(rows.size()));
  }
  std::vector<std::uint8_t> table;
  table.reserve(side * side);
  for (std::size_t x = 0; x < side; ++x) {
    const std::string loc = where + ".rows[" + std::to_string(x) + "]";
    if (!rows[x].is_string()) fail(loc, "expected a bitstring");
    std::string row = rows[x].get<std::string>();
    if (row.size() != side) fail(loc, "expected " + std::to_string(side) + " bits, found " + std::to_string(row.size()));
    for (std::size_t y = 0; y < side; ++y) {
      if (row[y] != '0' && row[y] != '1') fail(loc, "column " + std::to_string(y) + " is not a bit");
      table.push_back(static_cast<std::uint8_t>(row[y] - '0'));
    }
  }
  return Gadget(b, std::move(table));
}

Gadget load_gadget(const std::string& spec) {
  std::ifstream probe(spec);
  if (probe) return gadget_from_json(read_json_file(spec));
  try {
    return Gadget::builtin(spec);
  } catch (const ParseError& e) {
    throw ParseError("'" + spec + "' is neither a readable gadget file nor a builtin (" + e.what() + ")");
  }
}

Json protocol_to_json(const ProtocolTree& p) {
  std::function<Json(int)> node = [&](int i) -> Json {
    const auto& nd = p.node(i);
    Json j;
    if (nd.leaf) {
      j["leaf"] = nd.output;
      return j;
    }
    j["speaker"] = speaker_name(nd.speaker);
    Json map = Json::array();
    for (auto v : nd.bit_map) map.push_back(static_cast<int>(v));
    j["bit_map"] = map;
    j["children"] = Json::array({node(nd.children[0]), node(nd.children[1])});
    return j;
  };
  Json j;
  j["n"] = p.n();
  j["b"] = p.b();
  j["root"] = node(p.root());
  return j;
}

ProtocolTree protocol_from_json(const Json& j, int n, int b) {
  const Json* root = &j;
  if (j.is_object() && j.contains("root")) {
    n = int_field(j, "n", "protocol");
    b = int_field(j, "b", "protocol");
    root = &j["root"];
  }
  if (n < 1 || b < 1) fail("protocol", "n and b must be given and positive");
  if (static_cast<long>(n) * b > 20) throw BudgetError("protocol input space above 2^20");
  ProtocolTree p(n, b);
  const std::size_t inputs = std::size_t{1} << (n * b);
  std::function<int(const Json&, const std::string&)> parse = [&](const Json& nd, const std::string& where) -> int {
    if (!nd.is_object()) fail(where, "expected a node object");
    if (nd.contains("leaf")) {
      const Json& leaf = nd["leaf"];
      if (!leaf.is_string()) fail(where + ".leaf", "expected a string");
      return p.add_leaf(leaf.get<std::string>());
    }
    std::string s = str_field(nd, "speaker", where);
    if (s != "A" && s != "B") fail(where + ".speaker", "expected \"A\" or \"B\"");
    const Json& map = field(nd, "bit_map", where);
    if (!map.is_array() || map.size() != inputs) {
      fail(where + ".bit_map", "expected an array of " + std::to_string(inputs) + " bits");
    }
    std::vector<std::uint8_t> bits;
    for (std::size_t v = 0; v < inputs; ++v) {
      if (!map[v].is_number_integer() || (map[v].get<int>() != 0 && map[v].get<int>() != 1)) {
        fail(where + ".bit_map[" + std::to_string(v) + "]", "expected 0 or 1");
      }
      bits.push_back(static_cast<std::uint8_t>(map[v].get<int>()));
    }
    const Json& kids = field(nd, "children", where);
    if (!kids.is_array() || kids.size() != 2) fail(where + ".children", "expected two children");
    int c0 = parse(kids[0], where + ".children[0]");
    int c1 = parse(kids[1], where + ".children[1]");
    return p.add_internal(s == "A" ? Speaker::Alice : Speaker::Bob, std::move(bits), c0, c1);
  };
  p.set_root(parse(*root, "protocol.root"));
  p.validate();
  return p;
}

bool is_randomized_protocol(const Json& j) { return j.is_object() && j.contains("components"); }

Json randomized_protocol_to_json(const RandomizedProtocol& rp) {
  Json comps = Json::array();
  for (const auto& c : rp.components) {
    Json e;
    e["weight"] = rational_json(c.weight);
    e["protocol"] = protocol_to_json(c.protocol);
    comps.push_back(e);
  }
  Json j;
  j["components"] = comps;
  return j;
}

RandomizedProtocol randomized_protocol_from_json(const Json& j) {
  const Json& comps = field(j, "components", "randomized protocol");
  if (!comps.is_array()) fail("randomized protocol.components", "expected an array");
  RandomizedProtocol rp;
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const std::string where = "randomized protocol.components[" + std::to_string(k) + "]";
    rp.components.push_back(WeightedProtocol{protocol_from_json(field(comps[k], "protocol", where)),
                                             rational_from_json(field(comps[k], "weight", where), where + ".weight")});
  }
  rp.validate();
  return rp;
}

Json problem_to_json(const SearchProblem& s) {
  Json j;
  j["n"] = s.n();
  j["outputs"] = s.outputs();
  Json table = Json::object();
  for (Code z = 0; z < (Code{1} << s.n()); ++z) table[BitVector::from_code(z, s.n()).to_string()] = s.table()[z];
  j["table"] = table;
  return j;
}

SearchProblem problem_from_json(const Json& j) {
  const std::string where = "problem";
  int n = int_field(j, "n", where);
  if (n < 1 || n > 20) fail(where + ".n", "n must lie in 1..20");
  const Json& outs = field(j, "outputs", where);
  if (!outs.is_array()) fail(where + ".outputs", "expected an array of strings");
  std::vector<std::string> outputs;
  for (std::size_t k = 0; k < outs.size(); ++k) {
    if (!outs[k].is_string()) fail(where + ".outputs[" + std::to_string(k) + "]", "expected a string");
    outputs.push_back(outs[k].get<std::string>());
  }
  const Json& table = field(j, "table", where);
  if (!table.is_object()) fail(where + ".table", "expected an object keyed by bitstrings");
  std::vector<std::vector<int>> valid(std::size_t{1} << n);
  for (auto it = table.begin(); it != table.end(); ++it) {
    const std::string loc = where + ".table[\"" + it.key() + "\"]";
    BitVector z;
    try {
      z = BitVector::from_string(it.key());
    } catch (const Error&) {
      fail(loc, "key is not a bitstring");
    }
    if (z.size() != n) fail(loc, "key must have length n");
    if (!it.value().is_array()) fail(loc, "expected an array of output indices");
    for (const auto& o : it.value()) {
      if (!o.is_number_integer()) fail(loc, "expected integer output indices");
      int idx = o.get<int>();
      if (idx < 0 || idx >= static_cast<int>(outputs.size())) fail(loc, "output index out of range");
      valid[z.code()].push_back(idx);
    }
  }
  return SearchProblem(n, std::move(outputs), std::move(valid));
}

Json tree_to_json(const ParallelDecisionTree& t) {
  std::function<Json(int)> node = [&](int i) -> Json {
    const auto& nd = t.node(i);
    Json j;
    if (nd.leaf) {
      j["leaf"] = nd.output;
      return j;
    }
    j["query"] = set_members(nd.query);
    Json kids = Json::array();
    for (int c : nd.children) kids.push_back(node(c));
    j["children"] = kids;
    return j;
  };
  Json j;
  j["n"] = t.n();
  j["root"] = node(t.root());
  return j;
}

ParallelDecisionTree tree_from_json(const Json& j) {
  int n = int_field(j, "n", "tree");
  ParallelDecisionTree t(n);
  std::function<int(const Json&, const std::string&)> parse = [&](const Json& nd, const std::string& where) -> int {
    if (!nd.is_object()) fail(where, "expected a node object");
    if (nd.contains("leaf")) {
      if (!nd["leaf"].is_string()) fail(where + ".leaf", "expected a string");
      return t.add_leaf(nd["leaf"].get<std::string>());
    }
    const Json& q = field(nd, "query", where);
    if (!q.is_array() || q.empty()) fail(where + ".query", "expected a nonempty coordinate list");
    std::vector<int> members;
    for (const auto& c : q) {
      if (!c.is_number_integer() || c.get<int>() < 0 || c.get<int>() >= n) fail(where + ".query", "bad coordinate");
      members.push_back(c.get<int>());
    }
    CoordSet query = set_from(members);
    if (set_size(query) != static_cast<int>(members.size())) fail(where + ".query", "repeated coordinate");
    const Json& kids = field(nd, "children", where);
    if (!kids.is_array() || kids.size() != (std::size_t{1} << members.size())) {
      fail(where + ".children", "expected 2^|query| children");
    }
    std::vector<int> children;
    for (std::size_t k = 0; k < kids.size(); ++k) {
      children.push_back(parse(kids[k], where + ".children[" + std::to_string(k) + "]"));
    }
    return t.add_query(query, std::move(children));
  };
  t.set_root(parse(field(j, "root", "tree"), "tree.root"));
  t.validate();
  return t;
}

Json params_to_json(const LiftingParams& p) {
  Json j;
  j["mode"] = p.mode == SimMode::Deterministic ? "det" : "rand";
  j["eta"] = rational_json(p.eta);
  j["c"] = rational_json(p.c);
  j["h"] = rational_json(p.h);
  j["b"] = p.b;
  j["n"] = p.n;
  j["eps"] = p.eps.to_string();
  j["delta"] = p.delta.to_string();
  j["tau"] = p.tau.to_string();
  j["gamma"] = p.gamma.to_string();
  j["nonstandard"] = p.nonstandard;
  j["truncation"] = p.truncation == TruncationReading::BlockExponent ? "2^-(eta/8)b" : "2^-(eta/8)";
  return j;
}

Json result_to_json(const SimResult& r, const BlockSpace& space) {
  Json j;
  j["status"] = to_string(r.status);
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["z"] = r.trace.z;
  j["transcript"] = r.transcript;
  j["output"] = r.output;
  j["rho"] = r.rho.str();
  j["total_queries"] = r.total_queries;
  Json rq = Json::array();
  for (CoordSet s : r.round_queries) rq.push_back(set_members(s));
  j["round_queries"] = rq;
  j["depth"] = r.depth;
  j["protocol"] = {{"C", r.trace.C}, {"r", r.trace.r}};
  j["params"] = params_to_json(r.trace.params);
  Json regime = Json::array();
  for (const auto& c : r.trace.regime) regime.push_back({{"inequality", c.name}, {"holds", c.holds}, {"detail", c.detail}});
  j["regime"] = regime;
  Json rounds = Json::array();
  for (const auto& rec : r.trace.rounds) {
    Json o;
    o["round"] = rec.round;
    o["speaker"] = speaker_name(rec.speaker);
    o["free"] = set_members(rec.free_at_start);
    o["delta_silent"] = rational_json(rec.delta_silent);
    o["discarded_mass"] = rational_json(rec.discarded_mass);
    o["message"] = rec.message;
    o["p_M"] = rational_json(rec.p_message);
    o["k_product"] = rational_json(rec.k_product);
    o["class"] = rec.partition_class;
    o["classes"] = rec.partition_size;
    o["p_class"] = rational_json(rec.p_class);
    o["p_geq"] = rational_json(rec.p_geq);
    o["I"] = set_members(rec.query);
    o["x_I"] = space.sub(rec.query).format(rec.x_query);
    o["z_I"] = BitVector::from_code(rec.z_query, set_size(rec.query)).to_string();
    o["y_condition_prob"] = rational_json(rec.y_condition_prob);
    Json cps = Json::array();
    for (const auto& cp : rec.checkpoints) {
      cps.push_back({{"free", set_members(cp.free)},
                     {"maxprob_x", rational_json(cp.maxprob_x)},
                     {"maxprob_y", rational_json(cp.maxprob_y)},
                     {"pow2_deficiency", rational_json(cp.power())},
                     {"x_support", cp.xset.size()},
                     {"y_support", cp.yset.size()}});
    }
    o["deficiency"] = cps;
    o["speaker_dense"] = rec.speaker_dense_at_start;
    o["silent_dense"] = rec.silent_dense_at_start;
    o["flags"] = rec.flags;
    rounds.push_back(o);
  }
  j["rounds"] = rounds;
  return j;
}

Json ledger_to_json(const LedgerReport& r) {
  Json j;
  j["recompute_mismatches"] = r.recompute_mismatches;
  j["unexplained"] = r.unexplained();
  Json cl = Json::array();
  for (const auto& c : r.clauses) {
    cl.push_back({{"round", c.round},
                  {"clause", c.clause},
                  {"precondition", c.precondition},
                  {"holds", c.holds},
                  {"detail", c.detail}});
  }
  j["clauses"] = cl;
  return j;
}

Json outcome_to_json(const OutcomeDistribution& d) {
  Json j = Json::object();
  for (const auto& [label, mass] : d.masses()) j[label] = rational_json(mass);
  return j;
}

Json enumerated_to_json(const EnumeratedDistribution& d) {
  Json j;
  j["distribution"] = outcome_to_json(d.outcomes);
  j["error"] = {{"total", rational_json(d.error_total())},
                {"k_halt", rational_json(d.error_k)},
                {"truncation", rational_json(d.error_truncation)},
                {"violation", rational_json(d.error_violation)}};
  j["branches"] = d.branches;
  return j;
}

}  // namespace qclift
