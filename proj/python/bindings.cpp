// Python module _qclift.  Structured results cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qclift/dtree.hpp"
#include "qclift/error.hpp"
#include "qclift/exact.hpp"
#include "qclift/gadget.hpp"
#include "qclift/io.hpp"
#include "qclift/protocol.hpp"
#include "qclift/simulate.hpp"
#include "qclift/verify.hpp"

namespace py = pybind11;
using namespace qclift;

namespace {

std::string analyze_gadget(const std::string& spec, std::uint32_t max_side) {
  Gadget g = load_gadget(spec);
  DiscrepancyResult d = discrepancy(g, max_side);
  Json rep;
  rep["gadget"] = gadget_to_json(g);
  rep["disc"] = rational_json(d.value);
  return rep.dump();
}

std::string decision_tree(const std::string& problem_json) {
  SearchProblem s = problem_from_json(Json::parse(problem_json));
  DecisionTreeOracle o = brute_force_Ddt(s);
  return Json{{"depth", o.depth}, {"tree", tree_to_json(o.tree)}}.dump();
}

std::string canonical(const std::string& problem_json, const std::string& gadget) {
  SearchProblem s = problem_from_json(Json::parse(problem_json));
  return protocol_to_json(canonical_protocol(brute_force_Ddt(s).tree, load_gadget(gadget))).dump();
}

std::string lift(const std::string& protocol_json, const std::string& gadget, const std::string& z_bits,
                 const std::string& mode, const std::string& eta, const std::string& c, const std::string& h,
                 std::uint64_t seed) {
  Gadget g = load_gadget(gadget);
  BitVector z = BitVector::from_string(z_bits);
  Json j = Json::parse(protocol_json);
  RandomizedProtocol rp = is_randomized_protocol(j)
                              ? randomized_protocol_from_json(j)
                              : RandomizedProtocol{{WeightedProtocol{protocol_from_json(j), Rational(1)}}};
  rp.validate();
  const ProtocolTree& first = rp.components.front().protocol;
  if (first.space().b != g.b() || first.space().blocks != z.size()) throw Error("dimension mismatch");
  if (mode != "det" && mode != "rand") throw Error("mode must be det or rand");
  SimMode m = mode == "det" ? SimMode::Deterministic : SimMode::Randomized;
  LiftingParams params =
      LiftingParams::derive(m, parse_rational(eta), parse_rational(c), parse_rational(h), g.b(), z.size());
  SimResult r;
  if (m == SimMode::Deterministic) {
    if (rp.components.size() != 1) throw Error("deterministic mode needs a single protocol");
    r = lift_deterministic(first, g, z, params);
  } else {
    r = lift_randomized_protocol(rp, g, z, params, seed);
  }
  return result_to_json(r, first.space()).dump();
}

std::string verify(const std::string& corpus_path, int jobs) {
  std::size_t slash = corpus_path.find_last_of('/');
  std::string base = slash == std::string::npos ? "" : corpus_path.substr(0, slash);
  CorpusSpec spec = corpus_from_json(read_json_file(corpus_path), base.empty() ? "." : base);
  if (jobs > 0) {
    spec.jobs = jobs;
    if (spec.extractor) spec.extractor->jobs = jobs;
    if (spec.density) spec.density->jobs = jobs;
    if (spec.claims) spec.claims->jobs = jobs;
    if (spec.lemmas) spec.lemmas->jobs = jobs;
    if (spec.simulation) spec.simulation->jobs = jobs;
  }
  CorpusReport rep;
  {
    py::gil_scoped_release release;
    rep = run_corpus(spec);
  }
  return rep.to_json().dump();
}

std::string canonical_rational(const std::string& text) { return to_string(parse_rational(text)); }

}  // namespace

PYBIND11_MODULE(_qclift, m) {
  m.doc() = "Exact checkers for query-to-communication lifting";

  static py::exception<Error> error(m, "Error");
  static py::exception<BudgetError> budget(m, "BudgetError", error.ptr());
  static py::exception<ParseError> parse(m, "ParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const BudgetError& e) {
      py::set_error(budget, e.what());
    } catch (const ParseError& e) {
      py::set_error(parse, e.what());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    } catch (const Json::exception& e) {
      py::set_error(parse, e.what());
    }
  });

  m.def("analyze_gadget", &analyze_gadget, py::arg("gadget"), py::arg("max_side") = kDefaultRectangleSide);
  m.def("decision_tree", &decision_tree, py::arg("problem_json"));
  m.def("canonical_protocol", &canonical, py::arg("problem_json"), py::arg("gadget"));
  m.def("lift", &lift, py::arg("protocol_json"), py::arg("gadget"), py::arg("z"), py::arg("mode") = "det",
        py::arg("eta") = "1/2", py::arg("c") = "64", py::arg("h") = "1", py::arg("seed") = 1);
  m.def("verify", &verify, py::arg("corpus_path"), py::arg("jobs") = 0);
  m.def("rational", &canonical_rational, py::arg("text"));
}
