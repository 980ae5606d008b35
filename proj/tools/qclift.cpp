// qclift command-line front end.
//
//   qclift gadget analyze <gadget> [--m 1,2] [--out report.json]
//   qclift lift (--protocol P | --problem S) --gadget G --z 01 [--mode det|rand] [--enumerate] ...
//   qclift verify <corpus.json> [--jobs N] [--out report.json]
//   qclift oracle dt --problem S [--out tree.json]
//   qclift protocol canonical --problem S --gadget G --out P
//
// Exit status: 0 success, 1 verification failure, 2 usage/parse/budget error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qclift/error.hpp"
#include "qclift/io.hpp"
#include "qclift/verify.hpp"

using namespace qclift;

namespace {

std::string show(const Rational& q) {
  std::string d = to_decimal(q);
  if (!d.empty() && d[0] == '~') return to_string(q) + " (approx. " + d.substr(1) + ")";
  return to_string(q) + " (= " + d + ")";
}

std::string show(const LogReal& v) {
  if (v.is_rational()) return show(v.constant());
  std::ostringstream out;
  out << std::setprecision(12) << v.approx();
  return v.to_string() + " (approx. " + out.str() + ")";
}

std::string set_list(const BlockSpace& s, const std::vector<Code>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + s.bits(xs[i]);
  return out;
}

void maybe_write(const std::string& path, const Json& doc) {
  if (!path.empty()) write_json_file(path, doc);
}

struct GadgetOpts {
  std::string gadget;
  std::vector<int> m{1};
  std::uint32_t side = kDefaultRectangleSide;
  int jobs = 1;
  std::string out;
};

int cmd_gadget_analyze(const GadgetOpts& o) {
  Gadget g = load_gadget(o.gadget);
  BlockSpace lambda{1, g.b()};
  DiscrepancyResult d = discrepancy(g, o.side, o.jobs);
  std::cout << "gadget " << o.gadget << "\n";
  std::cout << "b = " << g.b() << "\n";
  std::cout << "disc = " << show(d.value) << "\n";
  std::cout << "witness rows = {" << set_list(lambda, d.argmax.rows) << "}\n";
  std::cout << "witness cols = {" << set_list(lambda, d.argmax.cols) << "}\n";
  Json rep;
  rep["gadget"] = gadget_to_json(g);
  rep["disc"] = rational_json(d.value);
  rep["witness"] = {{"rows", d.argmax.rows}, {"cols", d.argmax.cols}};
  Json xs = Json::array();
  for (int m : o.m) {
    XorLemmaReport r = check_xor_lemma(g, m, o.side, o.jobs);
    std::cout << "xor m=" << m << ": lower " << show(r.lower) << ", disc(g^m) " << show(r.value) << ", upper "
              << show(r.upper) << ", sandwich " << (r.sandwich_holds ? "holds" : "FAILS") << "\n";
    xs.push_back({{"m", m},
                  {"lower", rational_json(r.lower)},
                  {"value", rational_json(r.value)},
                  {"upper", rational_json(r.upper)},
                  {"sandwich_holds", r.sandwich_holds}});
  }
  rep["xor_lemma"] = xs;
  maybe_write(o.out, rep);
  return 0;
}

struct LiftOpts {
  std::string protocol;
  std::string problem;
  std::string gadget = "ip2";
  std::string z;
  std::string mode = "det";
  std::string eta = "1/2";
  std::string c = "64";
  std::string h = "1";
  std::uint64_t seed = 1;
  bool enumerate = false;
  std::string truncation = "block";
  std::uint64_t branches = 1000000;
  std::string out;
};

int cmd_lift(const LiftOpts& o) {
  Gadget g = load_gadget(o.gadget);
  BitVector z = BitVector::from_string(o.z);
  std::optional<RandomizedProtocol> rp;
  if (!o.protocol.empty() && !o.problem.empty()) throw Error("give either --protocol or --problem, not both");
  if (!o.protocol.empty()) {
    Json j = read_json_file(o.protocol);
    if (is_randomized_protocol(j)) {
      rp = randomized_protocol_from_json(j);
    } else {
      rp = RandomizedProtocol{{WeightedProtocol{protocol_from_json(j), Rational(1)}}};
    }
  } else if (!o.problem.empty()) {
    SearchProblem s = problem_from_json(read_json_file(o.problem));
    rp = RandomizedProtocol{{WeightedProtocol{canonical_protocol(brute_force_Ddt(s).tree, g), Rational(1)}}};
  } else {
    throw Error("lift needs --protocol or --problem");
  }
  rp->validate();
  const ProtocolTree& first = rp->components.front().protocol;
  if (first.space().b != g.b()) {
    throw Error("dimension mismatch: protocol has b = " + std::to_string(first.space().b) + ", gadget has b = " +
                std::to_string(g.b()));
  }
  if (first.space().blocks != z.size()) {
    throw Error("dimension mismatch: protocol has n = " + std::to_string(first.space().blocks) + ", z has " +
                std::to_string(z.size()) + " bits");
  }
  if (o.mode != "det" && o.mode != "rand") throw Error("--mode must be det or rand");
  SimMode mode = o.mode == "det" ? SimMode::Deterministic : SimMode::Randomized;
  LiftingParams params = LiftingParams::derive(mode, parse_rational(o.eta), parse_rational(o.c),
                                               parse_rational(o.h), g.b(), z.size());
  params.branch_budget = o.branches;
  if (o.truncation == "block") params.truncation = TruncationReading::BlockExponent;
  else if (o.truncation == "constant") params.truncation = TruncationReading::ConstantExponent;
  else throw Error("--truncation must be block or constant");
  BlockSpace space = first.space();

  if (mode == SimMode::Randomized && o.enumerate) {
    EnumeratedDistribution d = enumerate_output_distribution(*rp, g, z, params);
    OutcomeDistribution ref;
    for (const auto& wc : rp->components) ref.merge(reference_distribution(wc.protocol, g, z).scaled(wc.weight));
    Rational tv = statistical_distance(d.outcomes, ref);
    std::cout << "branches: " << d.branches << "\n";
    for (const auto& [t, m] : d.outcomes.masses()) std::cout << "  " << (t.empty() ? "(empty)" : t) << "  " << show(m) << "\n";
    std::cout << "error-halt mass: " << show(d.error_total()) << "\n";
    std::cout << "  K halts: " << show(d.error_k) << "\n";
    std::cout << "  truncation halts: " << show(d.error_truncation) << "\n";
    std::cout << "  invariant violations: " << show(d.error_violation) << "\n";
    std::cout << "TV vs reference: " << show(tv) << "\n";
    Json rep;
    rep["params"] = params_to_json(params);
    rep["z"] = z.to_string();
    rep["distribution"] = enumerated_to_json(d);
    rep["reference"] = outcome_to_json(ref);
    rep["tv_to_reference"] = rational_json(tv);
    maybe_write(o.out, rep);
    return 0;
  }

  SimResult r;
  const ProtocolTree* used = &first;
  if (mode == SimMode::Deterministic) {
    if (rp->components.size() != 1) throw Error("deterministic mode needs a single protocol");
    r = lift_deterministic(first, g, z, params);
  } else {
    r = lift_randomized_protocol(*rp, g, z, params, o.seed);
  }
  std::cout << "status: " << to_string(r.status) << "\n";
  if (!r.reason.empty()) std::cout << "reason: " << r.reason << "\n";
  for (const auto& rc : r.trace.regime) {
    if (!rc.holds) std::cout << "outside regime: " << rc.name << " (" << rc.detail << ")\n";
  }
  std::cout << "queries: " << r.total_queries << "\n";
  std::cout << "depth: " << r.depth << "\n";
  std::cout << "transcript: " << r.transcript << "\n";
  std::cout << "output: " << r.output << "\n";
  std::cout << "rho: " << r.rho.str() << "\n";
  std::cout << "eps: " << show(params.eps) << "\n";
  Json rep = result_to_json(r, space);
  if (r.completed() && rp->components.size() == 1) {
    auto cert = certify_transcript(r, *used, g, z);
    if (cert) {
      std::cout << "certified: x=" << space.bits(cert->first) << " y=" << space.bits(cert->second) << "\n";
      rep["certificate"] = {{"x", space.bits(cert->first)}, {"y", space.bits(cert->second)}};
    } else {
      std::cout << "certified: no\n";
      rep["certificate"] = nullptr;
    }
  }
  maybe_write(o.out, rep);
  return 0;
}

int cmd_verify(const std::string& path, int jobs, const std::string& out) {
  Json j = read_json_file(path);
  std::string base = std::filesystem::path(path).parent_path().string();
  CorpusSpec spec = corpus_from_json(j, base.empty() ? "." : base);
  if (jobs > 0) {
    spec.jobs = jobs;
    if (spec.extractor) spec.extractor->jobs = jobs;
    if (spec.density) spec.density->jobs = jobs;
    if (spec.claims) spec.claims->jobs = jobs;
    if (spec.lemmas) spec.lemmas->jobs = jobs;
    if (spec.simulation) spec.simulation->jobs = jobs;
  }
  CorpusReport rep = run_corpus(spec);
  std::cout << rep.table();
  for (const auto& s : rep.sections) {
    for (const auto& c : s.counterexamples) {
      std::cout << "FAIL [" << s.name << "] " << c.id << ": " << c.detail
                << (c.reverified ? " (reverified)" : " (not reproduced)") << "\n";
    }
  }
  maybe_write(out, rep.to_json());
  return rep.failures() > 0 ? 1 : 0;
}

int cmd_oracle(const std::string& problem, int max_n, const std::string& out) {
  SearchProblem s = problem_from_json(read_json_file(problem));
  DecisionTreeOracle o = brute_force_Ddt(s, max_n);
  std::cout << "D^dt = " << o.depth << "\n";
  maybe_write(out, tree_to_json(o.tree));
  return 0;
}

int cmd_canonical(const std::string& problem, const std::string& gadget, const std::string& out) {
  SearchProblem s = problem_from_json(read_json_file(problem));
  Gadget g = load_gadget(gadget);
  ProtocolTree p = canonical_protocol(brute_force_Ddt(s).tree, g);
  Complexity cx = complexity(p);
  std::cout << "C = " << cx.C << "\nr = " << cx.r << "\nnodes = " << p.nodes().size() << "\n";
  maybe_write(out, protocol_to_json(p));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact desk-scale checks for query-to-communication lifting"};
  app.require_subcommand(1);

  auto* gadget = app.add_subcommand("gadget", "gadget tools");
  gadget->require_subcommand(1);
  GadgetOpts go;
  auto* analyze = gadget->add_subcommand("analyze", "discrepancy and XOR-lemma sandwich");
  analyze->add_option("gadget", go.gadget, "builtin name or gadget file")->required();
  analyze->add_option("--m", go.m, "XOR powers to check")->delimiter(',');
  analyze->add_option("--budget-side", go.side, "largest matrix side for rectangle enumeration");
  analyze->add_option("--jobs", go.jobs, "worker threads");
  analyze->add_option("--out", go.out, "JSON report path");

  LiftOpts lo;
  auto* lift = app.add_subcommand("lift", "simulate a protocol on g^n by a decision tree");
  lift->set_help_flag("--help", "print this help message and exit");
  lift->add_option("--protocol", lo.protocol, "protocol or randomized-protocol file");
  lift->add_option("--problem", lo.problem, "search problem; lifts its canonical protocol");
  lift->add_option("--gadget", lo.gadget, "builtin name or gadget file");
  lift->add_option("--z", lo.z, "input to the decision tree, e.g. 01")->required();
  lift->add_option("--mode", lo.mode, "det or rand");
  lift->add_option("--eta", lo.eta, "gadget discrepancy exponent");
  lift->add_option("--c", lo.c, "constant c");
  lift->add_option("--h", lo.h, "constant h in eps");
  lift->add_option("--seed", lo.seed, "sampling seed (rand mode)");
  lift->add_flag("--enumerate", lo.enumerate, "exact output distribution (rand mode)");
  lift->add_option("--truncation", lo.truncation, "truncation exponent reading: block or constant");
  lift->add_option("--budget-branches", lo.branches, "enumeration branch limit");
  lift->add_option("--out", lo.out, "trace/report path");

  std::string corpus, verify_out;
  int verify_jobs = 0;
  auto* verify = app.add_subcommand("verify", "run a verification corpus");
  verify->add_option("spec", corpus, "corpus spec file")->required();
  verify->add_option("--jobs", verify_jobs, "worker threads (overrides the spec)");
  verify->add_option("--out", verify_out, "JSON report path");

  std::string problem, tree_out, proto_gadget = "ip2";
  int max_n = kDefaultOracleMaxN;
  auto* oracle = app.add_subcommand("oracle", "decision-tree oracles");
  oracle->require_subcommand(1);
  auto* dt = oracle->add_subcommand("dt", "exact D^dt by brute force");
  dt->add_option("--problem", problem, "search problem file")->required();
  dt->add_option("--budget-n", max_n, "largest n accepted");
  dt->add_option("--out", tree_out, "optimal tree path");

  auto* protocol = app.add_subcommand("protocol", "protocol tools");
  protocol->require_subcommand(1);
  auto* canonical = protocol->add_subcommand("canonical", "canonical protocol of an optimal tree");
  canonical->add_option("--problem", problem, "search problem file")->required();
  canonical->add_option("--gadget", proto_gadget, "builtin name or gadget file");
  canonical->add_option("--out", tree_out, "protocol path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_gadget_analyze(go);
    if (*lift) return cmd_lift(lo);
    if (*verify) return cmd_verify(corpus, verify_jobs, verify_out);
    if (*dt) return cmd_oracle(problem, max_n, tree_out);
    if (*canonical) return cmd_canonical(problem, proto_gadget, tree_out);
  } catch (const BudgetError& e) {
    std::cerr << "budget refusal: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
