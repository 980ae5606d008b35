#include "qclift/verify.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "qclift/error.hpp"

namespace qclift {

namespace {

Rational abs_q(const Rational& q) { return q < 0 ? Rational(-q) : q; }

bool global_assumptions(const LemmaContext& ctx, const Gadget& g, int n) {
  int b = g.b();
  if (!le_pow2(ctx.disc, LogReal(Rational(-ctx.eta * b)))) return false;
  if (n <= 1) return true;
  return LogReal(b) >= LogReal::log2_of(Rational(n)) * ctx.c;
}

std::string support_string(const BlockSpace& s, const std::vector<Code>& xs) {
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += s.bits(xs[i]);
  }
  return out + "}";
}

std::vector<Code> all_codes(const BlockSpace& s) {
  std::vector<Code> out(s.size());
  for (Code x = 0; x < out.size(); ++x) out[x] = x;
  return out;
}

// Every restriction consistent with z: each coordinate is free or fixed to z_i.
std::vector<Restriction> restrictions_for(const BitVector& z) {
  int n = z.size();
  std::vector<Restriction> out;
  for (CoordSet fixed = 0; fixed < (CoordSet{1} << n); ++fixed) {
    Restriction rho(n);
    for (int i = 0; i < n; ++i) {
      if (fixed & (CoordSet{1} << (n - 1 - i))) rho.fix(i, z.bits[i]);
    }
    out.push_back(rho);
  }
  return out;
}

LogReal structure_tau(int h, const Rational& gamma, const LemmaContext& ctx) {
  return LogReal(Rational(2 + Rational(h) / ctx.c - ctx.eta + gamma));
}

bool marginals_hypothesis(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                          const Gadget& g, const BitVector& z, const Rational& gamma, const LemmaContext& ctx) {
  if (!rho.consistent(z)) return false;
  if (!global_assumptions(ctx, g, rho.n())) return false;
  return is_structured(X, Y, rho, structure_tau(kMarginalsH, gamma, ctx), g).certificate.has_value();
}

std::vector<std::pair<Code, Code>> fiber_pairs(const DistributionTable& X, const DistributionTable& Y,
                                               const Gadget& g, const BitVector& z) {
  const BlockSpace& s = X.space();
  std::vector<std::pair<Code, Code>> out;
  for (Code x : X.support()) {
    for (Code y : Y.support()) {
      if (outputs_on(g, s, x, y, s.all()) == z.code()) out.emplace_back(x, y);
    }
  }
  return out;
}

Json check_json(const std::string& id, const LemmaCheck& c) {
  Json j;
  j["id"] = id;
  j["verdict"] = to_string(c.verdict());
  j["measured"] = rational_json(c.measured);
  j["bound_log2"] = c.bound_exponent.to_string();
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

int scaled_jobs(int jobs) { return std::max(1, jobs); }

}  // namespace

// ---------------------------------------------------------------------------
// Lemma checkers.

LemmaCheck check_multiplicative_uniformity(const DistributionTable& X, const DistributionTable& Y,
                                           const Restriction& rho, const Gadget& g, [[maybe_unused]] const BitVector& z,
                                           const Rational& gamma, const LemmaContext& ctx) {
  const BlockSpace& s = X.space();
  LemmaCheck out;
  out.hypothesis = global_assumptions(ctx, g, rho.n()) &&
                   is_structured(X, Y, rho, structure_tau(kUniformityH, gamma, ctx), g).certificate.has_value();
  CoordSet I = rho.free();
  int k = set_size(I);
  std::vector<Rational> p(std::size_t{1} << k, Rational(0));
  for (Code x : X.support()) {
    for (Code y : Y.support()) p[outputs_on(g, s, x, y, I)] += X[x] * Y[y];
  }
  Rational scale = pow2(k);
  std::uint32_t worst = 0;
  for (std::uint32_t v = 0; v < p.size(); ++v) {
    Rational dev = abs_q(Rational(p[v] * scale - 1));
    if (dev > out.measured) {
      out.measured = dev;
      worst = v;
    }
  }
  out.bound_exponent = LogReal(Rational(-gamma * g.b()));
  out.conclusion = le_pow2(out.measured, out.bound_exponent);
  out.detail = "I=" + format_set(I) + " worst z_I=" + BitVector::from_code(worst, k).to_string() +
               " p=" + to_string(p[worst]);
  return out;
}

LemmaCheck check_uniform_marginals(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                                   const Gadget& g, const BitVector& z, const Rational& gamma,
                                   const LemmaContext& ctx) {
  const BlockSpace& s = X.space();
  auto pairs = fiber_pairs(X, Y, g, z);
  if (pairs.empty()) throw Error("(supp X x supp Y) meets no preimage of z=" + z.to_string());
  LemmaCheck out;
  out.hypothesis = marginals_hypothesis(X, Y, rho, g, z, gamma, ctx);
  std::vector<Rational> mx(s.size(), Rational(0));
  std::vector<Rational> my(s.size(), Rational(0));
  Rational unit(1, static_cast<long>(pairs.size()));
  for (auto [x, y] : pairs) {
    mx[x] += unit;
    my[y] += unit;
  }
  Rational dx = statistical_distance(X, DistributionTable(s, mx));
  Rational dy = statistical_distance(Y, DistributionTable(s, my));
  out.measured = std::max(dx, dy);
  out.bound_exponent = LogReal(Rational(-gamma * g.b()));
  out.conclusion = le_pow2(out.measured, out.bound_exponent);
  out.detail = "fiber=" + std::to_string(pairs.size()) + " dist_x=" + to_string(dx) + " dist_y=" + to_string(dy);
  return out;
}

bool main_lemma_tau_ok(const LogReal& tau, const LogReal& eps, const Rational& eta, const LogReal& gamma,
                       const Rational& h, const Rational& c) {
  if (eps.sign() <= 0) return false;
  LogReal slack = tau - LogReal(2) + LogReal(eta) + gamma;
  if (slack.sign() <= 0) return false;
  auto s = sign_of_product_minus(slack, eps, Rational(h / c));
  return s.has_value() && *s >= 0;
}

LemmaCheck check_main_lemma(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                            const Gadget& g, const MainLemmaParams& params, const LemmaContext& ctx) {
  LemmaCheck out;
  int b = g.b();
  CoordSet F = rho.free();
  out.bound_exponent = params.gamma * Rational(-b);

  StructureCheck sc = is_structured(X, Y, rho, LogReal(0), g);
  bool consistent = sc.refusal != "fixed-block consistency";
  LogReal dx(1), dy(1);
  DistributionTable XF = project(X, F);
  DistributionTable YF = project(Y, F);
  if (F != 0) {
    dx = max_density(XF).exact;
    dy = max_density(YF).exact;
  }
  LogReal tau = dx + dy;
  bool ranges = params.gamma.sign() > 0 && params.gamma <= LogReal(1) && params.eps.sign() > 0 &&
                params.eps <= LogReal(1) && params.eps >= LogReal(ratio(4, b));
  out.hypothesis = consistent && dx.sign() > 0 && dy.sign() > 0 && ranges && global_assumptions(ctx, g, rho.n()) &&
                   main_lemma_tau_ok(tau, params.eps, ctx.eta, params.gamma, params.h, ctx.c);
  if (F != 0) out.measured = dangerous_probability(XF, YF, g, DangerParams{dy, params.eps});
  out.conclusion = le_pow2(out.measured, out.bound_exponent);
  out.detail = "F=" + format_set(F) + " delta_x=" + dx.to_string() + " delta_y=" + dy.to_string();
  return out;
}

// ---------------------------------------------------------------------------
// Reports and the instance runner.

void SectionReport::merge_verdict(Verdict v) {
  switch (v) {
    case Verdict::Pass: ++pass; break;
    case Verdict::Vacuous: ++vacuous; break;
    case Verdict::Fail: ++fail; break;
  }
}

Json SectionReport::to_json() const {
  Json j;
  j["name"] = name;
  j["pass"] = pass;
  j["vacuous"] = vacuous;
  j["fail"] = fail;
  j["refused"] = refused;
  j["all_vacuous"] = all_vacuous();
  Json ces = Json::array();
  for (const auto& c : counterexamples) ces.push_back({{"id", c.id}, {"detail", c.detail}, {"reverified", c.reverified}});
  j["counterexamples"] = ces;
  j["refusals"] = refusals;
  j["archive"] = archive;
  return j;
}

SectionReport run_instances(const std::string& name, const std::vector<Instance>& instances, int jobs,
                            std::size_t archive_limit) {
  enum class Kind { Ok, Refused, Broken };
  struct Slot {
    Kind kind = Kind::Ok;
    LemmaCheck check;
    std::string error;
  };
  std::vector<Slot> slots(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        slots[i].check = instances[i].check();
      } catch (const InvariantError& e) {
        slots[i].kind = Kind::Broken;
        slots[i].error = e.what();
      } catch (const std::exception& e) {
        slots[i].kind = Kind::Refused;
        slots[i].error = e.what();
      }
    }
  };
  int threads = std::min<int>(scaled_jobs(jobs), static_cast<int>(std::max<std::size_t>(1, instances.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SectionReport report;
  report.name = name;
  Json archived = Json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Slot& s = slots[i];
    const std::string& id = instances[i].id;
    if (s.kind == Kind::Refused) {
      ++report.refused;
      report.refusals.push_back(id + ": " + s.error);
      continue;
    }
    if (s.kind == Kind::Broken) {
      ++report.fail;
      report.counterexamples.push_back(Counterexample{id, "invariant: " + s.error, false});
      continue;
    }
    Verdict v = s.check.verdict();
    report.merge_verdict(v);
    if (v == Verdict::Fail) {
      bool again = false;
      try {
        again = instances[i].check().verdict() == Verdict::Fail;
      } catch (const std::exception&) {
        again = false;
      }
      report.counterexamples.push_back(Counterexample{
          id, s.check.detail + " measured=" + to_string(s.check.measured) + " bound=2^(" +
                  s.check.bound_exponent.to_string() + ")",
          again});
    }
    if (i < archive_limit) archived.push_back(check_json(id, s.check));
  }
  if (archive_limit > 0) report.archive["instances"] = archived;
  return report;
}

// ---------------------------------------------------------------------------
// Generators.

DistributionTable random_distribution(const BlockSpace& space, std::mt19937_64& rng, int max_weight) {
  std::vector<Rational> w(space.size());
  Rational total = 0;
  for (auto& v : w) {
    v = static_cast<long>(rng() % static_cast<std::uint64_t>(max_weight + 1));
    total += v;
  }
  if (total == 0) {
    w[rng() % w.size()] = 1;
    total = 1;
  }
  for (auto& v : w) v /= total;
  return DistributionTable(space, std::move(w));
}

std::vector<Code> random_support(const BlockSpace& space, std::mt19937_64& rng) {
  std::vector<Code> out;
  for (Code x = 0; x < space.size(); ++x) {
    if (rng() & 1) out.push_back(x);
  }
  if (out.empty()) out.push_back(static_cast<Code>(rng() % space.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Sections.

SectionReport section_fourier(const FourierConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> instances;
  for (int k = 0; k < cfg.count; ++k) {
    int m = 1 + k % cfg.max_m;
    BlockSpace space{m, 1};
    DistributionTable d = k % 2 == 0 ? random_distribution(space, rng)
                                     : DistributionTable::uniform_on(space, random_support(space, rng));
    instances.push_back({"fourier#" + std::to_string(k), [d, m]() {
                           LemmaCheck c;
                           c.hypothesis = true;
                           auto coeffs = fourier_transform(d);
                           long bad = 0;
                           for (std::uint32_t S = 0; S < (std::uint32_t{1} << m); ++S) {
                             Rational direct = fourier_coefficient(d, S);
                             if (direct != coeffs[S]) ++bad;
                             if (abs_q(direct) != pow2(-m) * abs_q(parity_bias(d, S))) ++bad;
                           }
                           if (fourier_inverse(coeffs, m) != d.masses()) ++bad;
                           c.measured = bad;
                           c.conclusion = bad == 0;
                           c.detail = "m=" + std::to_string(m) + " mismatches=" + std::to_string(bad);
                           return c;
                         }});
  }
  return run_instances("fourier", instances, 1);
}

SectionReport section_vazirani(const VaziraniConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> instances;
  for (int k = 0; k < cfg.count; ++k) {
    int m = 1 + k % cfg.max_m;
    BlockSpace space{m, 1};
    DistributionTable d = [&]() {
      switch (k % 3) {
        case 0: return random_distribution(space, rng);
        case 1: {
          // Near-uniform: small biases so the hypothesis is met.
          std::vector<Rational> w(space.size());
          Rational total = 0;
          for (auto& v : w) total += (v = 32 + static_cast<long>(rng() % 3));
          for (auto& v : w) v /= total;
          return DistributionTable(space, std::move(w));
        }
        default: return DistributionTable::uniform_on(space, random_support(space, rng));
      }
    }();
    std::string base = "vazirani#" + std::to_string(k);
    for (const Rational& eps : cfg.eps) {
      instances.push_back({base + " eps=" + to_string(eps), [d, eps]() {
                             VaziraniReport r = vazirani_uniformity_check(d, eps);
                             LemmaCheck c;
                             c.hypothesis = r.hypothesis;
                             c.conclusion = r.conclusion;
                             c.measured = r.worst_point_deviation;
                             c.detail = "worst set bias=" + to_string(r.worst_set_bias);
                             return c;
                           }});
    }
    for (int t : cfg.t) {
      if (t > m) continue;
      instances.push_back({base + " t=" + std::to_string(t), [d, t]() {
                             VaziraniMinEntropyReport r = vazirani_minentropy_check(d, t);
                             LemmaCheck c;
                             c.hypothesis = r.hypothesis;
                             c.conclusion = r.conclusion;
                             return c;
                           }});
    }
  }
  return run_instances("vazirani", instances, 1);
}

SectionReport section_xor_lemma(const XorLemmaConfig& cfg) {
  std::vector<Instance> instances;
  for (const auto& [name, ms] : cfg.cases) {
    Gadget g = Gadget::builtin(name);
    for (int m : ms) {
      int jobs = cfg.jobs;
      instances.push_back({name + " m=" + std::to_string(m), [g, m, jobs]() {
                             XorLemmaReport r = check_xor_lemma(g, m, kDefaultRectangleSide, jobs);
                             LemmaCheck c;
                             c.hypothesis = true;
                             c.conclusion = r.sandwich_holds;
                             c.measured = r.value;
                             c.detail = "disc=" + to_string(r.disc) + " lower=" + to_string(r.lower) +
                                        " value=" + to_string(r.value) + " upper=" + to_string(r.upper);
                             return c;
                           }});
    }
  }
  SectionReport rep = run_instances("xor lemma", instances, 1, instances.size());
  return rep;
}

namespace {

LemmaCheck from_report(const ExtractorReport& r) {
  LemmaCheck c;
  c.hypothesis = r.hypothesis;
  c.conclusion = r.conclusion;
  c.measured = r.bias;
  c.bound_exponent = -r.bound.bits;
  return c;
}

LemmaCheck from_report(const SamplingReport& r) {
  LemmaCheck c;
  c.hypothesis = r.hypothesis;
  c.conclusion = r.conclusion;
  c.measured = r.bad_mass;
  c.bound_exponent = -r.bound.bits;
  return c;
}

void add_extractor_instances(std::vector<Instance>& out, const std::string& gname, const Gadget& g,
                             const Rational& disc, const DistributionTable& X, const DistributionTable& Y,
                             const std::vector<Rational>& grid, const std::string& base) {
  bool single = X.space().blocks == 1;
  for (const Rational& eta : grid) {
    for (const Rational& lambda : grid) {
      std::string tag = base + " eta=" + to_string(eta) + " lambda=" + to_string(lambda);
      if (single) {
        out.push_back({gname + " extractor " + tag,
                       [=]() { return from_report(extractor_check(g, disc, X, Y, eta, lambda)); }});
      }
      out.push_back({gname + " xor-extractor " + tag,
                     [=]() { return from_report(xor_extractor_check(g, disc, X, Y, eta, lambda)); }});
      for (const Rational& gamma : grid) {
        std::string t2 = tag + " gamma=" + to_string(gamma);
        if (single) {
          out.push_back({gname + " sampling " + t2,
                         [=]() { return from_report(sampling_check(g, disc, X, Y, gamma, lambda, eta)); }});
        }
        out.push_back({gname + " xor-sampling " + t2,
                       [=]() { return from_report(xor_sampling_check(g, disc, X, Y, gamma, lambda, eta)); }});
      }
    }
  }
}

std::vector<std::vector<Code>> nonempty_subsets(const BlockSpace& s) {
  std::vector<std::vector<Code>> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.size()); ++mask) {
    std::vector<Code> sub;
    for (Code x = 0; x < s.size(); ++x) {
      if (mask & (std::uint64_t{1} << x)) sub.push_back(x);
    }
    out.push_back(sub);
  }
  return out;
}

}  // namespace

SectionReport section_extractor_sampling(const ExtractorConfig& cfg) {
  std::vector<Instance> instances;
  for (const auto& name : cfg.gadgets_b1) {
    Gadget g = Gadget::builtin(name);
    if (g.b() != 1) throw Error("gadget " + name + " is listed with b = 1 but has b = " + std::to_string(g.b()));
    Rational disc = discrepancy(g).value;
    for (int m = 1; m <= cfg.max_m_b1; ++m) {
      BlockSpace space{m, 1};
      auto subsets = nonempty_subsets(space);
      for (const auto& sx : subsets) {
        for (const auto& sy : subsets) {
          add_extractor_instances(instances, name, g, disc, DistributionTable::uniform_on(space, sx),
                                  DistributionTable::uniform_on(space, sy), cfg.grid,
                                  "m=" + std::to_string(m) + " X=" + support_string(space, sx) +
                                      " Y=" + support_string(space, sy));
        }
      }
    }
  }
  std::mt19937_64 rng(cfg.seed);
  std::vector<Gadget> gb2;
  std::vector<Rational> db2;
  for (const auto& name : cfg.gadgets_b2) {
    gb2.push_back(Gadget::builtin(name));
    db2.push_back(discrepancy(gb2.back()).value);
  }
  for (int s = 0; s < cfg.samples_b2 && !gb2.empty(); ++s) {
    std::size_t gi = static_cast<std::size_t>(s) % gb2.size();
    int m = 1 + static_cast<int>((static_cast<std::size_t>(s) / gb2.size()) % 2);
    BlockSpace space{m, gb2[gi].b()};
    auto sx = random_support(space, rng);
    auto sy = random_support(space, rng);
    add_extractor_instances(instances, cfg.gadgets_b2[gi], gb2[gi], db2[gi], DistributionTable::uniform_on(space, sx),
                            DistributionTable::uniform_on(space, sy), cfg.grid,
                            "sample#" + std::to_string(s) + " m=" + std::to_string(m));
  }
  return run_instances("extractor/sampling", instances, cfg.jobs);
}

namespace {

std::vector<std::vector<std::string>> complete_codes(int depth) {
  if (depth == 0) return {{""}};
  auto smaller = complete_codes(depth - 1);
  std::vector<std::vector<std::string>> out{{""}};
  for (const auto& a : smaller) {
    for (const auto& b : smaller) {
      std::vector<std::string> code;
      for (const auto& w : a) code.push_back("0" + w);
      for (const auto& w : b) code.push_back("1" + w);
      out.push_back(std::move(code));
    }
  }
  return out;
}

bool heavy(const OutcomeDistribution& d, const std::string& w) {
  return d.mass(w) * pow2(static_cast<long>(w.size())) >= 1;
}

}  // namespace

SectionReport section_kraft(const KraftConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> instances;
  auto codes = complete_codes(cfg.max_depth);
  int code_index = 0;
  for (const auto& code : codes) {
    if (code.size() == 1) continue;  // the empty word alone
    for (int a = 0; a < cfg.assignments; ++a) {
      std::vector<long> w(code.size());
      long total = 0;
      for (auto& v : w) total += (v = static_cast<long>(rng() % 8));
      if (total == 0) total = w[rng() % w.size()] = 1;
      OutcomeDistribution d;
      for (std::size_t i = 0; i < code.size(); ++i) {
        if (w[i] > 0) d.add(code[i], Rational(w[i]) / total);
      }
      auto words = code;
      instances.push_back({"code#" + std::to_string(code_index) + " assignment#" + std::to_string(a), [d, words]() {
                             LemmaCheck c;
                             c.hypothesis = d.total() == 1;
                             std::string w = kraft_heavy_message(d);
                             std::string first;
                             auto sorted = words;
                             std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
                               return x.size() != y.size() ? x.size() < y.size() : x < y;
                             });
                             for (const auto& u : sorted) {
                               if (heavy(d, u)) {
                                 first = u;
                                 break;
                               }
                             }
                             c.measured = d.mass(w) * pow2(static_cast<long>(w.size()));
                             c.conclusion = heavy(d, w) && w == first;
                             c.detail = "chosen=" + w + " expected=" + first;
                             return c;
                           }});
    }
    ++code_index;
  }
  SectionReport rep = run_instances("kraft", instances, 1);
  rep.archive["codes"] = code_index;
  return rep;
}

SectionReport section_density(const DensityConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> instances;
  for (int k = 0; k < cfg.count; ++k) {
    int n = 1 + k % cfg.max_n;
    int b = 1 + (k / cfg.max_n) % cfg.max_b;
    BlockSpace space{n, b};
    DistributionTable X = k % 2 == 0 ? random_distribution(space, rng)
                                     : DistributionTable::uniform_on(space, random_support(space, rng));
    for (const Rational& delta : cfg.deltas) {
      instances.push_back({"density#" + std::to_string(k) + " delta=" + to_string(delta), [X, delta]() {
                             const BlockSpace& s = X.space();
                             LemmaCheck c;
                             c.hypothesis = true;
                             LogReal d(delta);
                             auto violates = [&](CoordSet I, Rational* mass, Code* value) {
                               DistributionTable marg = project(X, I);
                               Rational mp = marg.max_prob();
                               if (mass) *mass = mp;
                               if (value) *value = marg.argmax();
                               return !le_pow2(mp, LogReal(Rational(-delta * s.b * set_size(I))));
                             };
                             DensityFix fix = density_restoring_fix(X, d);
                             std::vector<std::string> problems;
                             if (fix.I != 0) {
                               Rational mass;
                               Code value = 0;
                               if (!violates(fix.I, &mass, &value)) problems.push_back("fixed set is not violating");
                               if (s.project(0, 0) != 0) problems.push_back("projection");
                               Rational fixed_mass =
                                   X.probability([&](Code x) { return s.project(x, fix.I) == fix.x_I; });
                               if (fixed_mass != fix.mass) problems.push_back("recorded mass differs");
                               if (fixed_mass != mass) problems.push_back("fixed value is not a heaviest value");
                             }
                             for (CoordSet J = 1; J <= s.all(); ++J) {
                               if (set_size(J) > set_size(fix.I) && violates(J, nullptr, nullptr)) {
                                 problems.push_back("larger violating set " + format_set(J));
                                 break;
                               }
                             }
                             if (!is_dense(fix.remainder, d).dense) problems.push_back("remainder not dense");
                             PartitionCheck pc = check_partition(X, d, density_restoring_partition(X, d));
                             if (!pc.ok()) problems.push_back("partition: " + pc.detail);
                             c.measured = static_cast<long>(problems.size());
                             c.conclusion = problems.empty();
                             for (const auto& p : problems) c.detail += p + "; ";
                             return c;
                           }});
    }
  }
  return run_instances("density", instances, cfg.jobs);
}

std::vector<SectionReport> section_claims(const ClaimConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> skew;
  std::vector<Instance> biasing;
  for (const auto& name : cfg.gadgets) {
    Gadget g = Gadget::builtin(name);
    BlockSpace space{cfg.n, g.b()};
    for (int s = 0; s < cfg.supports; ++s) {
      auto support = random_support(space, rng);
      DistributionTable Y = DistributionTable::uniform_on(space, support);
      LogReal delta_y = max_density(Y).exact;
      for (const Rational& e : cfg.eps) {
        DangerParams p{delta_y, LogReal(e)};
        for (Code x = 0; x < space.size(); ++x) {
          std::string id = name + " Y=" + support_string(space, support) + " eps=" + to_string(e) +
                           " x=" + space.bits(x);
          skew.push_back({id, [=]() {
                            LemmaCheck c;
                            bool dangerous = is_dangerous(x, Y, g, p);
                            auto leak = is_leaking(x, Y, g);
                            auto sk = is_skewing(x, Y, g, p);
                            c.hypothesis = dangerous && !leak;
                            c.conclusion = sk.has_value() && recheck(*sk, x, Y, g, p);
                            c.detail = "delta_y=" + p.delta_y.to_string();
                            return c;
                          }});
          Rational cc = cfg.c;
          int n = cfg.n;
          biasing.push_back({id, [=]() {
                               LemmaCheck c;
                               auto bw = is_biasing(x, Y, g, p, cc, n);
                               bool dangerous = is_dangerous(x, Y, g, p);
                               c.hypothesis = !bw.has_value();
                               c.conclusion = !dangerous;
                               c.detail = "delta_y=" + p.delta_y.to_string();
                               if (auto leak = is_leaking(x, Y, g)) {
                                 c.detail += " leaking on I=" + format_set(leak->I) +
                                             " z=" + BitVector::from_code(leak->z, set_size(leak->I)).to_string() +
                                             " prob=" + to_string(leak->prob);
                               }
                               if (auto sp = is_sparsifying(x, Y, g, p)) {
                                 c.detail += " sparsifying on I=" + format_set(sp->I) + " J=" + format_set(sp->J);
                               }
                               return c;
                             }});
        }
      }
    }
  }
  std::vector<SectionReport> out;
  out.push_back(run_instances("claim skewing", skew, cfg.jobs));
  out.push_back(run_instances("claim biasing", biasing, cfg.jobs));
  for (auto& r : out) r.archive["antecedent_true"] = r.pass + r.fail;
  return out;
}

std::vector<SectionReport> section_lemmas(const LemmaConfig& cfg, const std::vector<PlantedFault>& planted) {
  std::mt19937_64 rng(cfg.seed);
  std::vector<Instance> mult, marg, main;
  auto apply_fault = [&planted](const std::string& lemma, LemmaCheck c) {
    for (const auto& f : planted) {
      if (f.lemma != lemma) continue;
      if (f.assume_hypothesis) c.hypothesis = true;
      c.conclusion = c.measured <= f.bound;
      c.bound_exponent = f.bound > 0 ? LogReal::log2_of(f.bound) : LogReal(Rational(-1000000));
      c.detail += " [planted bound " + to_string(f.bound) + "]";
    }
    return c;
  };
  for (const auto& name : cfg.gadgets) {
    Gadget g = Gadget::builtin(name);
    Rational disc = discrepancy(g).value;
    for (int n : cfg.n) {
      if (g.b() * n > 4) continue;
      BlockSpace space{n, g.b()};
      for (int s = 0; s < cfg.supports; ++s) {
        std::vector<Code> sx = s == 0 ? all_codes(space) : random_support(space, rng);
        std::vector<Code> sy = s == 0 ? all_codes(space) : random_support(space, rng);
        DistributionTable X = DistributionTable::uniform_on(space, sx);
        DistributionTable Y = DistributionTable::uniform_on(space, sy);
        std::string base = name + " X=" + support_string(space, sx) + " Y=" + support_string(space, sy);
        for (Code zc = 0; zc < (Code{1} << n); ++zc) {
          BitVector z = BitVector::from_code(zc, n);
          for (const Restriction& rho : restrictions_for(z)) {
            for (const Rational& c : cfg.c) {
              LemmaContext ctx{cfg.eta, c, disc};
              for (const Rational& gamma : cfg.gamma) {
                std::string id = base + " z=" + z.to_string() + " rho=" + rho.str() + " c=" + to_string(c) +
                                 " gamma=" + to_string(gamma);
                mult.push_back({id, [=]() {
                                  return apply_fault("multiplicative_uniformity",
                                                     check_multiplicative_uniformity(X, Y, rho, g, z, gamma, ctx));
                                }});
                marg.push_back({id, [=]() {
                                  if (fiber_pairs(X, Y, g, z).empty()) {
                                    LemmaCheck e;
                                    e.hypothesis = marginals_hypothesis(X, Y, rho, g, z, gamma, ctx);
                                    e.conclusion = false;
                                    e.detail = "empty fiber";
                                    return apply_fault("uniform_marginals", e);
                                  }
                                  return apply_fault("uniform_marginals",
                                                     check_uniform_marginals(X, Y, rho, g, z, gamma, ctx));
                                }});
                if (zc != 0) continue;  // the main lemma does not depend on z
                for (const Rational& e : cfg.eps) {
                  MainLemmaParams mp{LogReal(e), LogReal(gamma), cfg.h};
                  main.push_back({id + " eps=" + to_string(e), [=]() {
                                    return apply_fault("main_lemma", check_main_lemma(X, Y, rho, g, mp, ctx));
                                  }});
                }
              }
            }
          }
        }
      }
    }
  }
  std::vector<SectionReport> out;
  out.push_back(run_instances("multiplicative uniformity", mult, cfg.jobs));
  out.push_back(run_instances("uniform marginals", marg, cfg.jobs));
  out.push_back(run_instances("main lemma", main, cfg.jobs));
  return out;
}

std::vector<SectionReport> section_simulation(const SimulationConfig& cfg) {
  Gadget g = load_gadget(cfg.gadget);
  Rational disc = discrepancy(g).value;
  std::vector<Instance> oracle, det, rnd, ledger;
  Json problems_archive = Json::array();
  for (const auto& path : cfg.problems) {
    SearchProblem S = problem_from_json(read_json_file(path));
    std::string pname = std::filesystem::path(path).stem().string();
    DecisionTreeOracle orc = brute_force_Ddt(S);
    ProtocolTree P = canonical_protocol(orc.tree, g);
    Complexity cx = complexity(P);
    int D = orc.depth;
    problems_archive.push_back({{"problem", pname}, {"D", D}, {"C", cx.C}, {"r", cx.r}, {"nodes", P.nodes().size()}});
    oracle.push_back({pname, [=]() {
                        LemmaCheck c;
                        c.hypothesis = true;
                        c.measured = cx.C;
                        c.conclusion = solves(orc.tree, S).solves && orc.tree.depth() == D &&
                                       cx.C <= D * (g.b() + 1) && cx.r <= 2 * D;
                        c.detail = "D=" + std::to_string(D) + " C=" + std::to_string(cx.C) +
                                   " r=" + std::to_string(cx.r);
                        return c;
                      }});
    int n = S.n();
    for (Code zc = 0; zc < (Code{1} << n); ++zc) {
      BitVector z = BitVector::from_code(zc, n);
      std::string id = pname + " z=" + z.to_string();
      if (cfg.deterministic) {
        LiftingParams params = LiftingParams::derive(SimMode::Deterministic, cfg.eta, cfg.c, cfg.h, g.b(), n);
        params.branch_budget = cfg.branch_budget;
        det.push_back({id, [=]() {
                         LemmaCheck c;
                         SimResult r = lift_deterministic(P, g, z, params);
                         bool regime = std::all_of(r.trace.regime.begin(), r.trace.regime.end(),
                                                   [](const RegimeCheck& rc) { return rc.holds; });
                         c.measured = r.total_queries;
                         if (!r.completed()) {
                           c.hypothesis = regime;
                           c.conclusion = false;
                           c.detail = to_string(r.status) + ": " + r.reason;
                           for (const auto& rc : r.trace.regime) {
                             if (!rc.holds) c.detail += " [outside regime: " + rc.name + "]";
                           }
                           return c;
                         }
                         c.hypothesis = true;
                         bool certified = certify_transcript(r, P, g, z).has_value();
                         c.conclusion = certified && r.depth <= cx.r && S.is_valid(zc, r.output);
                         c.detail = "queries=" + std::to_string(r.total_queries) + " depth=" +
                                    std::to_string(r.depth) + " output=" + r.output +
                                    (certified ? "" : " uncertified");
                         return c;
                       }});
        ledger.push_back({"det " + id, [=]() {
                            LemmaCheck c;
                            SimResult r = lift_deterministic(P, g, z, params);
                            LedgerReport lr = ledger_assertions(r, g);
                            c.hypothesis = true;
                            c.measured = lr.unexplained();
                            c.conclusion = lr.unexplained() == 0;
                            for (const auto& cl : lr.clauses) {
                              if (cl.mismatch()) c.detail += "round " + std::to_string(cl.round) + " " + cl.clause + "; ";
                            }
                            return c;
                          }});
      }
      if (cfg.randomized) {
        LiftingParams params = LiftingParams::derive(SimMode::Randomized, cfg.eta, cfg.c, cfg.h, g.b(), n);
        params.truncation = cfg.truncation;
        params.branch_budget = cfg.branch_budget;
        rnd.push_back({id, [=]() {
                         LemmaCheck c;
                         EnumeratedDistribution d = enumerate_output_distribution(P, g, z, params);
                         c.hypothesis = true;
                         c.measured = d.error_total();
                         c.bound_exponent = LogReal(-g.b());
                         c.conclusion = lt_pow2(c.measured, c.bound_exponent);
                         OutcomeDistribution ref = reference_distribution(P, g, z);
                         c.detail = "branches=" + std::to_string(d.branches) + " error_k=" + to_string(d.error_k) +
                                    " error_truncation=" + to_string(d.error_truncation) +
                                    " error_violation=" + to_string(d.error_violation) + " tv_to_reference=" +
                                    to_string(statistical_distance(d.outcomes, ref));
                         return c;
                       }});
        ledger.push_back({"rand " + id, [=]() {
                            LemmaCheck c;
                            long bad = 0;
                            std::string first;
                            enumerate_output_distribution(P, g, z, params, [&](const SimResult& r, const Rational&) {
                              LedgerReport lr = ledger_assertions(r, g);
                              if (lr.unexplained() > 0 && first.empty()) {
                                for (const auto& cl : lr.clauses) {
                                  if (cl.mismatch()) first += "round " + std::to_string(cl.round) + " " + cl.clause + "; ";
                                }
                              }
                              bad += lr.unexplained();
                            });
                            c.hypothesis = true;
                            c.measured = bad;
                            c.conclusion = bad == 0;
                            c.detail = first;
                            return c;
                          }});
      }
    }
  }
  std::vector<SectionReport> out;
  out.push_back(run_instances("oracle", oracle, cfg.jobs));
  out.back().archive["problems"] = problems_archive;
  out.back().archive["gadget"] = cfg.gadget;
  if (cfg.deterministic) out.push_back(run_instances("simulation det", det, cfg.jobs, det.size()));
  if (cfg.randomized) out.push_back(run_instances("simulation rand", rnd, cfg.jobs, rnd.size()));
  out.push_back(run_instances("ledger", ledger, cfg.jobs));
  return out;
}

// ---------------------------------------------------------------------------
// Corpus specs.

namespace {

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) throw ParseError(where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const std::exception& e) {
    throw ParseError(where + "." + key + ": " + e.what());
  }
}

void read_rational(const Json& j, const char* key, Rational& out, const std::string& where) {
  if (j.contains(key)) out = rational_from_json(j.at(key), where + "." + key);
}

void read_rationals(const Json& j, const char* key, std::vector<Rational>& out, const std::string& where) {
  if (!j.contains(key)) return;
  const Json& a = j.at(key);
  if (!a.is_array()) throw ParseError(where + "." + key + ": expected an array");
  out.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.push_back(rational_from_json(a[i], where + "." + key + "[" + std::to_string(i) + "]"));
  }
}

}  // namespace

CorpusSpec corpus_from_json(const Json& j, const std::string& base_dir) {
  check_keys(j, "corpus", {"name", "jobs", "fourier", "vazirani", "xor_lemma", "extractor", "kraft", "density",
                           "claims", "lemmas", "simulation", "planted"});
  CorpusSpec spec;
  read(j, "name", spec.name, "corpus");
  read(j, "jobs", spec.jobs, "corpus");
  if (spec.jobs < 1) throw ParseError("corpus.jobs: must be at least 1");
  if (j.contains("fourier")) {
    const Json& s = j["fourier"];
    check_keys(s, "fourier", {"count", "max_m", "seed"});
    FourierConfig c;
    read(s, "count", c.count, "fourier");
    read(s, "max_m", c.max_m, "fourier");
    read(s, "seed", c.seed, "fourier");
    spec.fourier = c;
  }
  if (j.contains("vazirani")) {
    const Json& s = j["vazirani"];
    check_keys(s, "vazirani", {"count", "max_m", "eps", "t", "seed"});
    VaziraniConfig c;
    read(s, "count", c.count, "vazirani");
    read(s, "max_m", c.max_m, "vazirani");
    read_rationals(s, "eps", c.eps, "vazirani");
    read(s, "t", c.t, "vazirani");
    read(s, "seed", c.seed, "vazirani");
    spec.vazirani = c;
  }
  if (j.contains("xor_lemma")) {
    const Json& s = j["xor_lemma"];
    check_keys(s, "xor_lemma", {"cases"});
    XorLemmaConfig c;
    if (s.contains("cases")) {
      if (!s["cases"].is_object()) throw ParseError("xor_lemma.cases: expected an object");
      c.cases.clear();
      for (auto it = s["cases"].begin(); it != s["cases"].end(); ++it) {
        std::vector<int> ms;
        read(s["cases"], it.key().c_str(), ms, "xor_lemma.cases");
        c.cases.emplace_back(it.key(), ms);
      }
    }
    c.jobs = spec.jobs;
    spec.xor_lemma = c;
  }
  if (j.contains("extractor")) {
    const Json& s = j["extractor"];
    check_keys(s, "extractor", {"gadgets_b1", "gadgets_b2", "max_m_b1", "samples_b2", "grid", "seed"});
    ExtractorConfig c;
    read(s, "gadgets_b1", c.gadgets_b1, "extractor");
    read(s, "gadgets_b2", c.gadgets_b2, "extractor");
    read(s, "max_m_b1", c.max_m_b1, "extractor");
    read(s, "samples_b2", c.samples_b2, "extractor");
    read_rationals(s, "grid", c.grid, "extractor");
    read(s, "seed", c.seed, "extractor");
    c.jobs = spec.jobs;
    spec.extractor = c;
  }
  if (j.contains("kraft")) {
    const Json& s = j["kraft"];
    check_keys(s, "kraft", {"max_depth", "assignments", "seed"});
    KraftConfig c;
    read(s, "max_depth", c.max_depth, "kraft");
    read(s, "assignments", c.assignments, "kraft");
    read(s, "seed", c.seed, "kraft");
    spec.kraft = c;
  }
  if (j.contains("density")) {
    const Json& s = j["density"];
    check_keys(s, "density", {"count", "max_n", "max_b", "deltas", "seed"});
    DensityConfig c;
    read(s, "count", c.count, "density");
    read(s, "max_n", c.max_n, "density");
    read(s, "max_b", c.max_b, "density");
    read_rationals(s, "deltas", c.deltas, "density");
    read(s, "seed", c.seed, "density");
    c.jobs = spec.jobs;
    spec.density = c;
  }
  if (j.contains("claims")) {
    const Json& s = j["claims"];
    check_keys(s, "claims", {"gadgets", "n", "supports", "eps", "c", "seed"});
    ClaimConfig c;
    read(s, "gadgets", c.gadgets, "claims");
    read(s, "n", c.n, "claims");
    read(s, "supports", c.supports, "claims");
    read_rationals(s, "eps", c.eps, "claims");
    read_rational(s, "c", c.c, "claims");
    read(s, "seed", c.seed, "claims");
    c.jobs = spec.jobs;
    spec.claims = c;
  }
  if (j.contains("lemmas")) {
    const Json& s = j["lemmas"];
    check_keys(s, "lemmas", {"gadgets", "n", "supports", "eta", "c", "gamma", "eps", "h", "seed"});
    LemmaConfig c;
    read(s, "gadgets", c.gadgets, "lemmas");
    read(s, "n", c.n, "lemmas");
    read(s, "supports", c.supports, "lemmas");
    read_rational(s, "eta", c.eta, "lemmas");
    read_rationals(s, "c", c.c, "lemmas");
    read_rationals(s, "gamma", c.gamma, "lemmas");
    read_rationals(s, "eps", c.eps, "lemmas");
    read_rational(s, "h", c.h, "lemmas");
    read(s, "seed", c.seed, "lemmas");
    c.jobs = spec.jobs;
    spec.lemmas = c;
  }
  if (j.contains("simulation")) {
    const Json& s = j["simulation"];
    check_keys(s, "simulation", {"problems", "gadget", "eta", "c", "h", "modes", "truncation", "branch_budget"});
    SimulationConfig c;
    read(s, "problems", c.problems, "simulation");
    for (auto& p : c.problems) {
      std::filesystem::path path(p);
      if (path.is_relative()) p = (std::filesystem::path(base_dir) / path).lexically_normal().string();
    }
    read(s, "gadget", c.gadget, "simulation");
    read_rational(s, "eta", c.eta, "simulation");
    read_rational(s, "c", c.c, "simulation");
    read_rational(s, "h", c.h, "simulation");
    if (s.contains("modes")) {
      std::vector<std::string> modes;
      read(s, "modes", modes, "simulation");
      c.deterministic = c.randomized = false;
      for (const auto& m : modes) {
        if (m == "det") c.deterministic = true;
        else if (m == "rand") c.randomized = true;
        else throw ParseError("simulation.modes: unknown mode '" + m + "'");
      }
    }
    if (s.contains("truncation")) {
      std::string t;
      read(s, "truncation", t, "simulation");
      if (t == "block") c.truncation = TruncationReading::BlockExponent;
      else if (t == "constant") c.truncation = TruncationReading::ConstantExponent;
      else throw ParseError("simulation.truncation: expected 'block' or 'constant'");
    }
    read(s, "branch_budget", c.branch_budget, "simulation");
    c.jobs = spec.jobs;
    spec.simulation = c;
  }
  if (j.contains("planted")) {
    const Json& a = j["planted"];
    if (!a.is_array()) throw ParseError("planted: expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string where = "planted[" + std::to_string(i) + "]";
      check_keys(a[i], where, {"lemma", "bound", "assume_hypothesis"});
      PlantedFault f;
      read(a[i], "lemma", f.lemma, where);
      if (f.lemma != "multiplicative_uniformity" && f.lemma != "uniform_marginals" && f.lemma != "main_lemma") {
        throw ParseError(where + ".lemma: unknown lemma '" + f.lemma + "'");
      }
      read_rational(a[i], "bound", f.bound, where);
      read(a[i], "assume_hypothesis", f.assume_hypothesis, where);
      spec.planted.push_back(f);
    }
  }
  return spec;
}

long CorpusReport::failures() const {
  long total = 0;
  for (const auto& s : sections) total += s.fail;
  return total;
}

Json CorpusReport::to_json() const {
  Json j;
  j["name"] = name;
  j["failures"] = failures();
  Json secs = Json::array();
  for (const auto& s : sections) secs.push_back(s.to_json());
  j["sections"] = secs;
  return j;
}

std::string CorpusReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(28) << "section" << std::right << std::setw(9) << "pass" << std::setw(9)
      << "vacuous" << std::setw(7) << "FAIL" << std::setw(9) << "refused" << "\n";
  for (const auto& s : sections) {
    out << std::left << std::setw(28) << s.name << std::right << std::setw(9) << s.pass << std::setw(9)
        << s.vacuous << std::setw(7) << s.fail << std::setw(9) << s.refused;
    if (s.all_vacuous()) out << "  ALL-VACUOUS";
    out << "\n";
  }
  out << "failures: " << failures() << "\n";
  return out.str();
}

CorpusReport run_corpus(const CorpusSpec& spec) {
  CorpusReport rep;
  rep.name = spec.name;
  auto add = [&](std::vector<SectionReport> v) {
    for (auto& s : v) rep.sections.push_back(std::move(s));
  };
  if (spec.fourier) add({section_fourier(*spec.fourier)});
  if (spec.vazirani) add({section_vazirani(*spec.vazirani)});
  if (spec.xor_lemma) add({section_xor_lemma(*spec.xor_lemma)});
  if (spec.extractor) add({section_extractor_sampling(*spec.extractor)});
  if (spec.kraft) add({section_kraft(*spec.kraft)});
  if (spec.density) add({section_density(*spec.density)});
  if (spec.claims) add(section_claims(*spec.claims));
  if (spec.lemmas || !spec.planted.empty()) {
    LemmaConfig c = spec.lemmas ? *spec.lemmas : LemmaConfig{};
    c.jobs = spec.jobs;
    add(section_lemmas(c, spec.planted));
  }
  if (spec.simulation) add(section_simulation(*spec.simulation));
  return rep;
}

}  // namespace qclift
