// Acceptance criteria: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "qclift/error.hpp"
#include "qclift/verify.hpp"

using namespace qclift;

namespace {

const std::string kData = QCLIFT_DATA_DIR;

int failures = 0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.ok) ++failures;
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2f s", secs);
  std::cout << (o.ok ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << " (" << timing << ")"
            << std::endl;
}

std::string counts(const SectionReport& s) {
  std::ostringstream out;
  out << s.pass << " pass, " << s.vacuous << " vacuous, " << s.fail << " FAIL, " << s.refused << " refused";
  return out.str();
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SimulationConfig simulation_config() {
  SimulationConfig c;
  for (const char* p : {"const2", "first_bit2", "parity2", "and2", "or2", "index2", "find_one2"}) {
    c.problems.push_back(kData + "/problems/" + p + ".json");
  }
  c.gadget = "ip2";
  return c;
}

const SectionReport& find(const std::vector<SectionReport>& v, const std::string& name) {
  for (const auto& s : v) {
    if (s.name == name) return s;
  }
  throw Error("missing section " + name);
}

}  // namespace

int main() {
  criterion(1, "Fourier-bias identity", [] {
    auto t0 = std::chrono::steady_clock::now();
    SectionReport r = section_fourier(FourierConfig{});
    double secs = elapsed_since(t0);
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass >= 1000 && secs < 30, counts(r)};
  });

  criterion(2, "Vazirani checkers", [] {
    SectionReport r = section_vazirani(VaziraniConfig{});
    long total = r.pass + r.vacuous + r.fail;
    std::ostringstream d;
    d << counts(r) << ", vacuity rate " << (total ? 100.0 * r.vacuous / total : 0.0) << "%";
    return Outcome{r.fail == 0 && r.refused == 0 && total >= 1000, d.str()};
  });

  criterion(3, "XOR-lemma sandwich", [] {
    auto t0 = std::chrono::steady_clock::now();
    SectionReport r = section_xor_lemma(XorLemmaConfig{});
    double secs = elapsed_since(t0);
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass == 13 && secs < 120, counts(r)};
  });

  criterion(4, "extractor and sampling lemmas", [] {
    ExtractorConfig c;
    c.jobs = 4;
    SectionReport r = section_extractor_sampling(c);
    return Outcome{r.fail == 0 && r.refused == 0, counts(r)};
  });

  criterion(5, "Kraft fact", [] {
    SectionReport r = section_kraft(KraftConfig{});
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass == 676 * 100,
                   counts(r) + ", " + r.archive["codes"].dump() + " codes"};
  });

  criterion(6, "density-restoring fix and partition", [] {
    DensityConfig c;
    c.jobs = 4;
    SectionReport r = section_density(c);
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass == 200 * 3, counts(r)};
  });

  criterion(7, "claim chain", [] {
    ClaimConfig c;
    c.jobs = 4;
    auto rs = section_claims(c);
    const SectionReport& skew = find(rs, "claim skewing");
    const SectionReport& bias = find(rs, "claim biasing");
    bool ok = skew.fail == 0 && bias.fail == 0 && !skew.all_vacuous() && !bias.all_vacuous() &&
              skew.refused == 0 && bias.refused == 0;
    std::string d = "skewing: " + counts(skew) + "; biasing: " + counts(bias);
    if (!bias.counterexamples.empty()) d += "; first counterexample " + bias.counterexamples.front().id;
    return Outcome{ok, d};
  });

  std::vector<SectionReport> sim;
  double sim_secs = 0;
  try {
    auto t0 = std::chrono::steady_clock::now();
    SimulationConfig c = simulation_config();
    c.jobs = 4;
    sim = section_simulation(c);
    sim_secs = elapsed_since(t0);
  } catch (const std::exception& e) {
    std::cerr << "simulation corpus: " << e.what() << "\n";
  }

  criterion(8, "deterministic end-to-end", [&] {
    const SectionReport& r = find(sim, "simulation det");
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass + r.vacuous == 28 && sim_secs < 300, counts(r)};
  });

  criterion(9, "randomized error-halt bound", [&] {
    const SectionReport& r = find(sim, "simulation rand");
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass == 28, counts(r)};
  });

  criterion(10, "deficiency ledger", [&] {
    const SectionReport& r = find(sim, "ledger");
    return Outcome{r.fail == 0 && r.refused == 0 && r.pass == 56, counts(r)};
  });

  criterion(11, "oracle sanity", [&] {
    SearchProblem parity3 = problem_from_json(read_json_file(kData + "/problems/parity3.json"));
    int d = brute_force_Ddt(parity3).depth;
    const SectionReport& r = find(sim, "oracle");
    return Outcome{d == 3 && r.fail == 0 && r.pass == 7, "D^dt(parity, n=3) = " + std::to_string(d) + "; " + counts(r)};
  });

  criterion(12, "determinism", [] {
    std::string path = kData + "/corpus/default.json";
    CorpusSpec a = corpus_from_json(read_json_file(path), kData + "/corpus");
    CorpusSpec b = a;
    auto set_jobs = [](CorpusSpec& s, int j) {
      s.jobs = j;
      if (s.extractor) s.extractor->jobs = j;
      if (s.density) s.density->jobs = j;
      if (s.claims) s.claims->jobs = j;
      if (s.lemmas) s.lemmas->jobs = j;
      if (s.simulation) s.simulation->jobs = j;
    };
    set_jobs(a, 1);
    set_jobs(b, 4);
    std::string ra = run_corpus(a).to_json().dump(2);
    std::string rb = run_corpus(b).to_json().dump(2);
    return Outcome{ra == rb, ra == rb ? "two runs byte-identical (" + std::to_string(ra.size()) + " bytes)"
                                      : "reports differ"};
  });

  std::cout << (failures == 0 ? "all criteria PASS" : std::to_string(failures) + " criteria FAIL") << std::endl;
  return failures == 0 ? 0 : 1;
}
