#pragma once

// Lemma-level checkers and the corpus runner.  Every conditional statement
// is reported per instance as pass (hypothesis and conclusion hold),
// vacuous (hypothesis fails) or FAIL (hypothesis holds, conclusion fails).

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qclift/io.hpp"

namespace qclift {

/// Global constants shared by the structure lemmas.
struct LemmaContext {
  Rational eta{1, 2};
  Rational c{1};
  /// disc(g), computed by the caller.
  Rational disc{1};
};

struct LemmaCheck {
  bool hypothesis = false;
  bool conclusion = false;
  Rational measured;
  LogReal bound_exponent;  // bound = 2^bound_exponent
  std::string detail;
  Verdict verdict() const { return verdict_of(hypothesis, conclusion); }
};

/// Constant in the multiplicative-uniformity proposition's tau requirement.
inline constexpr int kUniformityH = 8;
/// Constant in the uniform-marginals lemma's tau requirement.
inline constexpr int kMarginalsH = 10;

/// Pr[g^I(X_I, Y_I) = z_I] in (1 +- 2^(-gamma b)) 2^(-|I|) for every z_I, I = free(rho).
/// measured = max over z_I of |2^|I| Pr - 1|.
LemmaCheck check_multiplicative_uniformity(const DistributionTable& X, const DistributionTable& Y,
                                           const Restriction& rho, const Gadget& g, const BitVector& z,
                                           const Rational& gamma, const LemmaContext& ctx);

/// X', Y' uniform on (supp X x supp Y) cap G^-1(z); measured = the larger
/// marginal distance.  Throws when the intersection is empty.
LemmaCheck check_uniform_marginals(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                                   const Gadget& g, const BitVector& z, const Rational& gamma,
                                   const LemmaContext& ctx);

struct MainLemmaParams {
  LogReal eps;
  LogReal gamma;
  Rational h{1};
};

/// measured = Pr[X_free is eps-dangerous for Y_free], with delta_Y the exact
/// maximal density of Y_free.
LemmaCheck check_main_lemma(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                            const Gadget& g, const MainLemmaParams& params, const LemmaContext& ctx);

/// tau >= 2 + h/(c eps) - eta - gamma, decided exactly when possible.
bool main_lemma_tau_ok(const LogReal& tau, const LogReal& eps, const Rational& eta, const LogReal& gamma,
                       const Rational& h, const Rational& c);

// ---------------------------------------------------------------------------
// Sections: each runs one family of checks and reports verdict counts.

struct Counterexample {
  std::string id;
  std::string detail;
  bool reverified = false;
};

struct SectionReport {
  std::string name;
  long pass = 0;
  long vacuous = 0;
  long fail = 0;
  long refused = 0;
  std::vector<Counterexample> counterexamples;
  std::vector<std::string> refusals;
  /// Section-specific archive (exact values, coverage counts).
  Json archive = Json::object();

  bool all_vacuous() const { return pass == 0 && fail == 0 && vacuous > 0; }
  bool ok() const { return fail == 0; }
  void merge_verdict(Verdict v);
  Json to_json() const;
};

/// One instance: an id and a function that recomputes its verdict from raw
/// inputs.  FAILs are recomputed once more before being reported.
struct Instance {
  std::string id;
  std::function<LemmaCheck()> check;
};

/// Runs instances on `jobs` threads and merges in id order.
SectionReport run_instances(const std::string& name, const std::vector<Instance>& instances, int jobs,
                            std::size_t archive_limit = 0);

struct FourierConfig {
  int count = 1000;
  int max_m = 4;
  std::uint64_t seed = 1;
};
SectionReport section_fourier(const FourierConfig& cfg);

struct VaziraniConfig {
  int count = 1000;
  int max_m = 4;
  std::vector<Rational> eps{Rational(1, 4), Rational(1, 2), Rational(1)};
  std::vector<int> t{1, 2};
  std::uint64_t seed = 2;
};
SectionReport section_vazirani(const VaziraniConfig& cfg);

struct XorLemmaConfig {
  std::vector<std::pair<std::string, std::vector<int>>> cases{
      {"and1", {1, 2, 3}}, {"or1", {1, 2, 3}}, {"xor1", {1, 2, 3}}, {"ip1", {1, 2, 3}}, {"ip2", {1}}};
  int jobs = 1;
};
SectionReport section_xor_lemma(const XorLemmaConfig& cfg);

struct ExtractorConfig {
  std::vector<std::string> gadgets_b1{"and1", "or1", "xor1", "ip1"};
  std::vector<std::string> gadgets_b2{"ip2", "rand:2:7"};
  int max_m_b1 = 2;
  int samples_b2 = 200;
  std::vector<Rational> grid{Rational(1, 4), Rational(1, 2)};
  std::uint64_t seed = 4;
  int jobs = 1;
};
SectionReport section_extractor_sampling(const ExtractorConfig& cfg);

struct KraftConfig {
  int max_depth = 4;
  int assignments = 100;
  std::uint64_t seed = 5;
};
SectionReport section_kraft(const KraftConfig& cfg);

struct DensityConfig {
  int count = 200;
  int max_n = 3;
  int max_b = 2;
  std::vector<Rational> deltas{Rational(1, 2), Rational(3, 4), Rational(1)};
  std::uint64_t seed = 6;
  int jobs = 1;
};
SectionReport section_density(const DensityConfig& cfg);

struct ClaimConfig {
  std::vector<std::string> gadgets{"xor1", "and1", "ip1", "ip2"};
  int n = 2;
  int supports = 20;
  std::vector<Rational> eps{Rational(1, 4), Rational(1, 2)};
  Rational c{64};
  std::uint64_t seed = 7;
  int jobs = 1;
};
/// Two sections: "claim skewing" and "claim biasing".
std::vector<SectionReport> section_claims(const ClaimConfig& cfg);

struct LemmaConfig {
  /// Pairs with b n > 4 are skipped.
  std::vector<std::string> gadgets{"xor1", "and1", "ip1", "ip2", "ip4"};
  std::vector<int> n{1, 2};
  int supports = 4;
  Rational eta{1, 2};
  std::vector<Rational> c{Rational(1), Rational(64)};
  std::vector<Rational> gamma{Rational(1, 4), Rational(1, 2)};
  std::vector<Rational> eps{Rational(1, 4), Rational(1, 2), Rational(1)};
  Rational h{1};
  std::uint64_t seed = 8;
  int jobs = 1;
};

/// Deliberately wrong bound for harness self-tests.
struct PlantedFault {
  std::string lemma;  // "multiplicative_uniformity", "uniform_marginals" or "main_lemma"
  Rational bound;
  bool assume_hypothesis = true;
};

/// Three sections: multiplicative uniformity, uniform marginals, main lemma.
std::vector<SectionReport> section_lemmas(const LemmaConfig& cfg, const std::vector<PlantedFault>& planted = {});

struct SimulationConfig {
  std::vector<std::string> problems;  // file paths
  std::string gadget = "ip2";
  Rational eta{1, 2};
  Rational c{64};
  Rational h{1};
  bool deterministic = true;
  bool randomized = true;
  TruncationReading truncation = TruncationReading::BlockExponent;
  std::uint64_t branch_budget = 1000000;
  int jobs = 1;
};

/// Sections "oracle", "simulation det", "simulation rand" and "ledger".
std::vector<SectionReport> section_simulation(const SimulationConfig& cfg);

// ---------------------------------------------------------------------------

struct CorpusSpec {
  std::string name = "corpus";
  int jobs = 1;
  std::optional<FourierConfig> fourier;
  std::optional<VaziraniConfig> vazirani;
  std::optional<XorLemmaConfig> xor_lemma;
  std::optional<ExtractorConfig> extractor;
  std::optional<KraftConfig> kraft;
  std::optional<DensityConfig> density;
  std::optional<ClaimConfig> claims;
  std::optional<LemmaConfig> lemmas;
  std::optional<SimulationConfig> simulation;
  std::vector<PlantedFault> planted;
};

/// Reads a spec; relative problem paths resolve against `base_dir`.
CorpusSpec corpus_from_json(const Json& j, const std::string& base_dir);

struct CorpusReport {
  std::string name;
  std::vector<SectionReport> sections;
  long failures() const;
  Json to_json() const;
  std::string table() const;
};

CorpusReport run_corpus(const CorpusSpec& spec);

// Seeded generators shared by the sections and the tests.
DistributionTable random_distribution(const BlockSpace& space, std::mt19937_64& rng, int max_weight = 7);
std::vector<Code> random_support(const BlockSpace& space, std::mt19937_64& rng);

}  // namespace qclift
