#include "qclift/simulate.hpp"

#include <algorithm>
#include <map>

#include <gmpxx.h>

#include "qclift/error.hpp"

namespace qclift {

LiftingParams LiftingParams::derive(SimMode mode, const Rational& eta, const Rational& c, const Rational& h, int b,
                                    int n) {
  if (eta <= 0 || eta > 1) throw Error("eta must lie in (0, 1]");
  if (c <= 0 || h <= 0) throw Error("c and h must be positive");
  if (b < 1 || n < 1) throw Error("b and n must be positive");
  LiftingParams p;
  p.mode = mode;
  p.eta = eta;
  p.c = c;
  p.h = h;
  p.b = b;
  p.n = n;
  const Rational base = h / (c * eta);
  p.eps = mode == SimMode::Deterministic ? LogReal(base) : LogReal::log2_of(c) * base;
  p.delta = LogReal(Rational(1) - eta / 4) + p.eps / Rational(2);
  p.tau = Rational(2) * p.delta - p.eps;
  if (mode == SimMode::Deterministic) {
    p.gamma = LogReal(Rational(1, b));
  } else {
    p.gamma = LogReal(eta / 8 + ratio(4, b)) + LogReal::log2_of(c) * (Rational(3) / c);
  }
  return p;
}

void LiftingParams::override_values(std::optional<LogReal> e, std::optional<LogReal> d, std::optional<LogReal> t,
                                    std::optional<LogReal> g) {
  if (e) eps = *e;
  if (d) delta = *d;
  if (t) tau = *t;
  if (g) gamma = *g;
  if (e || d || t || g) nonstandard = true;
}

LogReal LiftingParams::truncation_exponent() const {
  // log2((1/8) 2^(-x) / (2nb)) with x = (eta/8) b, or eta/8 under the other reading.
  Rational x = truncation == TruncationReading::BlockExponent ? Rational(eta / 8 * b) : Rational(eta / 8);
  return LogReal(Rational(-3) - x) - LogReal::log2_of(Rational(2 * n * b));
}

std::vector<RegimeCheck> regime_checks(const LiftingParams& p, const Rational& disc) {
  std::vector<RegimeCheck> out;
  auto add = [&](std::string name, bool holds, std::string detail) {
    out.push_back(RegimeCheck{std::move(name), holds, std::move(detail)});
  };
  add("disc(g) <= 2^(-eta b)", le_pow2(disc, -LogReal(p.eta * p.b)), "disc = " + to_string(disc));
  if (p.n >= 2) {
    LogReal slack = LogReal(Rational(p.b)) - LogReal::log2_of(Rational(p.n)) * p.c;
    add("b >= c log n", slack.sign() >= 0, "b - c log n = " + slack.to_string());
  } else {
    add("b >= c log n", true, "n = 1");
  }
  add("eps >= 4/b", p.eps >= LogReal(ratio(4, p.b)), "eps = " + p.eps.to_string());
  bool ranges = p.gamma.sign() > 0 && p.eps.sign() > 0 && p.tau.sign() > 0 && p.gamma <= LogReal(1) &&
                p.eps <= LogReal(1) && p.tau <= LogReal(2);
  add("0 < gamma, eps <= 1 and 0 < tau <= 2", ranges,
      "gamma = " + p.gamma.to_string() + ", tau = " + p.tau.to_string());
  // Main lemma with h' = h: (tau - 2 + eta + gamma) * eps >= h/c, eps > 0.
  LogReal slack = p.tau - LogReal(Rational(2) - p.eta) + p.gamma;
  std::optional<int> s = sign_of_product_minus(slack, p.eps, p.h / p.c);
  add("tau >= 2 + h/(c eps) - eta - gamma", s && *s >= 0 && slack.sign() > 0,
      s ? "tau - 2 + eta + gamma = " + slack.to_string() : "undecided (several logarithm bases)");
  if (p.mode == SimMode::Randomized) {
    LogReal rhs = LogReal(Rational(2) + Rational(10) / p.c - p.eta) + p.gamma;
    add("tau >= 2 + 10/c - eta + gamma", p.tau >= rhs, "rhs = " + rhs.to_string());
  }
  return out;
}

Rational DeficiencySnapshot::power() const {
  return pow2(2L * b * set_size(free)) * maxprob_x * maxprob_y;
}

LogReal DeficiencySnapshot::bits() const { return LogReal::log2_of(power()); }

std::string to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Done: return "done";
    case SimStatus::ErrorHaltK: return "error_halt(K)";
    case SimStatus::ErrorHaltTruncation: return "error_halt(truncation)";
    case SimStatus::InvariantViolation: return "invariant_violation";
  }
  return "unknown";
}

int LedgerReport::unexplained() const {
  int count = recompute_mismatches;
  for (const auto& c : clauses) count += c.mismatch() ? 1 : 0;
  return count;
}

namespace {

/// Uniform distribution on `set` (codes over Lambda^n), marginal on F.
DistributionTable marginal(const BlockSpace& space, const std::vector<Code>& set, CoordSet F) {
  BlockSpace sub = space.sub(F);
  std::vector<Rational> mass(sub.size(), Rational(0));
  const Rational unit(1, static_cast<long>(set.size()));
  for (Code v : set) mass[space.project(v, F)] += unit;
  return DistributionTable(sub, std::move(mass));
}

Rational maxprob_on(const BlockSpace& space, const std::vector<Code>& set, CoordSet F) {
  std::map<Code, long> counts;
  long best = 0;
  for (Code v : set) best = std::max(best, ++counts[space.project(v, F)]);
  return ratio(best, static_cast<long>(set.size()));
}

/// z restricted to the global coordinates I, first member most significant.
std::uint32_t z_on(const BitVector& z, CoordSet I) {
  std::uint32_t out = 0;
  for (int i : set_members(I)) out = (out << 1) | z.bits[i];
  return out;
}

/// Maps a set local to the members of F back to global coordinates.
CoordSet to_global(CoordSet F, CoordSet local) {
  auto members = set_members(F);
  CoordSet out = 0;
  for (int k : set_members(local)) out |= CoordSet{1} << members[k];
  return out;
}

struct State {
  Restriction rho;
  std::vector<Code> xset;
  std::vector<Code> yset;
  int node = 0;
  std::string transcript;
  Rational k_product{1};
  int queries = 0;
  std::vector<CoordSet> round_queries;
  std::vector<RoundRecord> rounds;
};

/// Random choices: either one seeded draw or every branch.
class Chooser {
 public:
  virtual ~Chooser() = default;
  /// Returns (index, probability of this branch relative to the caller).
  virtual std::vector<std::pair<std::size_t, Rational>> choose(const std::vector<Rational>& probs) = 0;
};

class SampleChooser : public Chooser {
 public:
  explicit SampleChooser(std::uint64_t seed) : rng_(gmp_randinit_mt) { rng_.seed(static_cast<unsigned long>(seed)); }

  std::size_t draw(const std::vector<Rational>& probs) {
    Integer denom = 1;
    for (const auto& p : probs) denom = lcm(denom, p.get_den());
    Integer u = rng_.get_z_range(denom);
    Integer acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i].get_num() * (denom / probs[i].get_den());
      if (u < acc) return i;
    }
    throw InvariantError("sampling weights do not sum to one");
  }

  std::vector<std::pair<std::size_t, Rational>> choose(const std::vector<Rational>& probs) override {
    return {{draw(probs), Rational(1)}};
  }

 private:
  gmp_randclass rng_;
};

class EnumerateChooser : public Chooser {
 public:
  std::vector<std::pair<std::size_t, Rational>> choose(const std::vector<Rational>& probs) override {
    std::vector<std::pair<std::size_t, Rational>> out;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] > 0) out.emplace_back(i, probs[i]);
    }
    return out;
  }
};

class Engine {
 public:
  Engine(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params)
      : p_(p), g_(g), gt_(g.transpose()), z_(z), prm_(params), space_{p.n(), p.b()} {
    p_.validate();
    if (g.b() != p.b()) throw Error("gadget block length differs from the protocol's b");
    if (z.size() != p.n()) throw Error("z must have length n");
    if (params.n != p.n() || params.b != p.b()) throw Error("parameters disagree with the protocol's n or b");
    if (space_.blocks * space_.b > 12) throw BudgetError("simulation limited to b*n <= 12");
    cx_ = complexity(p_);
    trace_.params = prm_;
    trace_.z = z_.to_string();
    trace_.C = cx_.C;
    trace_.r = cx_.r;
    Rational disc = 1;
    try {
      disc = discrepancy(g_).value;
      trace_.regime = regime_checks(prm_, disc);
    } catch (const BudgetError& e) {
      trace_.regime = regime_checks(prm_, Rational(1));
      trace_.regime.front().detail = std::string("discrepancy not computed: ") + e.what();
      trace_.regime.front().holds = false;
    }
  }

  State initial() const {
    State s;
    s.rho = Restriction(p_.n());
    s.node = p_.root();
    for (Code v = 0; v < space_.size(); ++v) {
      s.xset.push_back(v);
      s.yset.push_back(v);
    }
    return s;
  }

  using Sink = std::function<void(SimResult&&, const Rational&)>;

  void run(State st, const Rational& weight, Chooser& chooser, const Sink& sink) {
    while (!p_.node(st.node).leaf) {
      if (!round(st, weight, chooser, sink)) return;
    }
    finish(std::move(st), SimStatus::Done, "", weight, sink);
  }

  std::uint64_t leaves = 0;

 private:
  DeficiencySnapshot snapshot(const State& st) const {
    DeficiencySnapshot d;
    d.b = space_.b;
    d.free = st.rho.free();
    d.maxprob_x = maxprob_on(space_, st.xset, d.free);
    d.maxprob_y = maxprob_on(space_, st.yset, d.free);
    d.xset = st.xset;
    d.yset = st.yset;
    return d;
  }

  void finish(State st, SimStatus status, std::string reason, const Rational& weight, const Sink& sink) {
    ++leaves;
    if (leaves > prm_.branch_budget) {
      throw BudgetError("enumeration exceeded " + std::to_string(prm_.branch_budget) + " branches");
    }
    SimResult r;
    r.status = status;
    r.reason = std::move(reason);
    r.transcript = st.transcript;
    if (status == SimStatus::Done) r.output = p_.node(st.node).output;
    r.rho = st.rho;
    r.total_queries = st.queries;
    r.round_queries = st.round_queries;
    r.depth = static_cast<int>(st.rounds.size());
    r.xset = std::move(st.xset);
    r.yset = std::move(st.yset);
    r.trace = trace_;
    r.trace.rounds = std::move(st.rounds);
    sink(std::move(r), weight);
  }

  /// One simulation round.  Returns false when the round ended the run
  /// (halts are passed to the sink) or branched (each branch continues on
  /// its own).
  bool round(State& st, const Rational& weight, Chooser& chooser, const Sink& sink) {
    const bool randomized = prm_.mode == SimMode::Randomized;
    RoundRecord rec;
    rec.round = static_cast<int>(st.rounds.size()) + 1;
    rec.speaker = p_.node(st.node).speaker;
    const bool alice = rec.speaker == Speaker::Alice;
    const Gadget& ge = alice ? g_ : gt_;
    const CoordSet F = st.rho.free();
    rec.free_at_start = F;
    rec.checkpoints.push_back(snapshot(st));

    std::vector<Code>& mine = alice ? st.xset : st.yset;
    std::vector<Code>& theirs = alice ? st.yset : st.xset;

    const DistributionTable theirs_f = marginal(space_, theirs, F);
    const DistributionTable mine_f = marginal(space_, mine, F);
    rec.speaker_dense_at_start = is_dense(mine_f, prm_.delta - prm_.eps).dense;
    rec.silent_dense_at_start = is_dense(theirs_f, prm_.delta).dense;
    if (!rec.speaker_dense_at_start) rec.flags.push_back("round start: speaker's free part not (delta - eps)-dense");
    if (!rec.silent_dense_at_start) rec.flags.push_back("round start: silent party's free part not delta-dense");

    // Step 1: discard values dangerous for the silent party's free part.
    DensityBracket bracket = max_density(theirs_f);
    rec.silent_vacuous = bracket.vacuous;
    rec.delta_silent = bracket.vacuous ? Rational(1) : bracket.lower;
    const DangerParams danger{LogReal(rec.delta_silent), prm_.eps};
    std::map<Code, bool> verdict;
    std::vector<Code> kept;
    for (Code v : mine) {
      Code vf = space_.project(v, F);
      auto it = verdict.find(vf);
      if (it == verdict.end()) it = verdict.emplace(vf, is_dangerous(vf, theirs_f, ge, danger)).first;
      if (!it->second) kept.push_back(v);
    }
    rec.discarded_mass = ratio(static_cast<long>(mine.size() - kept.size()), static_cast<long>(mine.size()));
    if (rec.discarded_mass > Rational(1, 2)) rec.flags.push_back("step 1: discarded mass above 1/2");
    mine = std::move(kept);
    if (mine.empty()) {
      st.rounds.push_back(std::move(rec));
      finish(std::move(st), SimStatus::InvariantViolation, "step 1: every speaker value is dangerous", weight, sink);
      return false;
    }
    rec.checkpoints.push_back(snapshot(st));

    // Step 2: the message.
    MessageDistribution md = message_distribution(p_, st.node, DistributionTable::uniform_on(space_, mine));
    std::vector<std::string> words;
    std::vector<Rational> probs;
    for (const auto& [w, m] : md.messages.masses()) {
      words.push_back(w);
      probs.push_back(m);
    }
    std::vector<std::pair<std::size_t, Rational>> picks;
    if (randomized) {
      picks = chooser.choose(probs);
    } else {
      std::string w = kraft_heavy_message(md.messages);
      picks.emplace_back(static_cast<std::size_t>(std::find(words.begin(), words.end(), w) - words.begin()),
                         Rational(1));
    }
    if (picks.size() == 1) {
      after_message(st, rec, words[picks[0].first], probs[picks[0].first], md, weight * picks[0].second, chooser,
                    sink);
      return false;
    }
    for (const auto& [index, branch_p] : picks) {
      State copy = st;
      RoundRecord rcopy = rec;
      after_message(copy, rcopy, words[index], probs[index], md, weight * branch_p, chooser, sink);
    }
    return false;
  }

  void after_message(State& st, RoundRecord& rec, const std::string& w, const Rational& p_w,
                     const MessageDistribution& md, const Rational& weight, Chooser& chooser, const Sink& sink) {
    const bool alice = rec.speaker == Speaker::Alice;
    std::vector<Code>& mine = alice ? st.xset : st.yset;
    std::vector<Code> kept;
    for (Code v : mine) {
      if (message_of(p_, st.node, v).first == w) kept.push_back(v);
    }
    mine = std::move(kept);
    rec.message = w;
    rec.p_message = p_w;
    st.transcript += w;
    st.node = md.end_node.at(w);
    if (prm_.mode == SimMode::Randomized) {
      st.k_product *= p_w;
      rec.k_product = st.k_product;
      // K > C + b  <=>  prod p_M < 2^-(C+b).
      if (st.k_product < pow2(-static_cast<long>(cx_.C + space_.b))) {
        rec.checkpoints.push_back(snapshot(st));
        st.rounds.push_back(std::move(rec));
        finish(std::move(st), SimStatus::ErrorHaltK, "step 3: K > C + b", weight, sink);
        return;
      }
    } else {
      rec.k_product = 1;
    }
    rec.checkpoints.push_back(snapshot(st));

    const CoordSet F = st.rho.free();
    const DistributionTable mine_f = marginal(space_, mine, F);
    if (prm_.mode == SimMode::Deterministic) {
      DensityFix fix = density_restoring_fix(mine_f, prm_.delta);
      rec.partition_class = 1;
      rec.partition_size = 1;
      rec.p_class = fix.mass;
      rec.p_geq = 1;
      apply_class(st, rec, to_global(F, fix.I), fix.x_I, weight, chooser, sink);
      return;
    }
    DensityPartition part = density_restoring_partition(mine_f, prm_.delta);
    std::vector<Rational> probs;
    for (const auto& pj : part.parts) probs.push_back(pj.p_part);
    auto picks = chooser.choose(probs);
    for (const auto& [index, branch_p] : picks) {
      State copy = picks.size() == 1 ? std::move(st) : st;
      RoundRecord rcopy = picks.size() == 1 ? std::move(rec) : rec;
      const DensityPart& pj = part.parts[index];
      std::vector<Code>& cmine = alice ? copy.xset : copy.yset;
      std::vector<Code> in_class;
      for (Code v : cmine) {
        if (std::binary_search(pj.members.begin(), pj.members.end(), space_.project(v, F))) in_class.push_back(v);
      }
      cmine = std::move(in_class);
      rcopy.partition_class = static_cast<int>(index) + 1;
      rcopy.partition_size = static_cast<int>(part.parts.size());
      rcopy.p_class = pj.p_part;
      rcopy.p_geq = pj.p_geq;
      // Step 5: truncate classes that carry too little of the remaining mass.
      if (lt_pow2(pj.p_geq, prm_.truncation_exponent())) {
        rcopy.checkpoints.push_back(snapshot(copy));
        copy.rounds.push_back(std::move(rcopy));
        finish(std::move(copy), SimStatus::ErrorHaltTruncation, "step 5: p_geq below the truncation threshold",
               weight * branch_p, sink);
        continue;
      }
      apply_class(copy, rcopy, to_global(F, pj.I), pj.x_I, weight * branch_p, chooser, sink);
    }
  }

  /// Fix X_I = x_I (already applied to the speaker's set), query z_I and
  /// condition the silent party.
  void apply_class(State& st, RoundRecord& rec, CoordSet I, Code x_I, const Rational& weight, Chooser& chooser,
                   const Sink& sink) {
    const bool alice = rec.speaker == Speaker::Alice;
    const Gadget& ge = alice ? g_ : gt_;
    std::vector<Code>& mine = alice ? st.xset : st.yset;
    std::vector<Code>& theirs = alice ? st.yset : st.xset;
    if (prm_.mode == SimMode::Deterministic) {
      std::vector<Code> kept;
      for (Code v : mine) {
        if (space_.project(v, I) == x_I) kept.push_back(v);
      }
      mine = std::move(kept);
    }
    rec.checkpoints.push_back(snapshot(st));

    rec.query = I;
    rec.x_query = x_I;
    rec.z_query = z_on(z_, I);
    for (int i : set_members(I)) st.rho.fix(i, z_.bits[i]);
    st.queries += set_size(I);
    st.round_queries.push_back(I);
    rec.checkpoints.push_back(snapshot(st));

    const Code x_full = space_.merge(I, x_I, 0);
    std::vector<Code> kept;
    for (Code v : theirs) {
      if (outputs_on(ge, space_, x_full, v, I) == rec.z_query) kept.push_back(v);
    }
    rec.y_condition_prob = ratio(static_cast<long>(kept.size()), static_cast<long>(theirs.size()));
    theirs = std::move(kept);
    if (theirs.empty()) {
      st.rounds.push_back(std::move(rec));
      finish(std::move(st), SimStatus::InvariantViolation,
             "step 5: no silent-party value is consistent with the queried bits", weight, sink);
      return;
    }
    rec.checkpoints.push_back(snapshot(st));
    st.rounds.push_back(std::move(rec));
    run(std::move(st), weight, chooser, sink);
  }

  const ProtocolTree& p_;
  const Gadget& g_;
  Gadget gt_;
  BitVector z_;
  LiftingParams prm_;
  BlockSpace space_;
  Complexity cx_;
  SimTrace trace_;
};

SimResult run_single(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params,
                     Chooser& chooser) {
  Engine engine(p, g, z, params);
  std::optional<SimResult> out;
  engine.run(engine.initial(), Rational(1), chooser, [&](SimResult&& r, const Rational&) {
    if (out) throw InvariantError("single run produced several branches");
    out = std::move(r);
  });
  if (!out) throw InvariantError("simulation produced no result");
  return std::move(*out);
}

}  // namespace

SimResult lift_deterministic(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params) {
  if (params.mode != SimMode::Deterministic) throw Error("lift_deterministic needs deterministic parameters");
  EnumerateChooser unused;
  return run_single(p, g, z, params, unused);
}

std::optional<std::pair<Code, Code>> certify_transcript(const SimResult& result, const ProtocolTree& p,
                                                        const Gadget& g, const BitVector& z) {
  const BlockSpace space{p.n(), p.b()};
  const std::uint32_t target = z.code();
  std::vector<Code> xs = result.xset;
  std::vector<Code> ys = result.yset;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  for (Code x : xs) {
    for (Code y : ys) {
      if (outputs_on(g, space, x, y, space.all()) != target) continue;
      if (run_protocol(p, x, y).transcript.bits == result.transcript) return std::make_pair(x, y);
    }
  }
  return std::nullopt;
}

SimResult lift_randomized(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params,
                          std::uint64_t seed) {
  if (params.mode != SimMode::Randomized) throw Error("lift_randomized needs randomized parameters");
  SampleChooser chooser(seed);
  return run_single(p, g, z, params, chooser);
}

SimResult lift_randomized_protocol(const RandomizedProtocol& rp, const Gadget& g, const BitVector& z,
                                   const LiftingParams& params, std::uint64_t seed) {
  rp.validate();
  if (params.mode != SimMode::Randomized) throw Error("lift_randomized_protocol needs randomized parameters");
  SampleChooser chooser(seed);
  std::vector<Rational> weights;
  for (const auto& c : rp.components) weights.push_back(c.weight);
  std::size_t k = chooser.draw(weights);
  return run_single(rp.components[k].protocol, g, z, params, chooser);
}

EnumeratedDistribution enumerate_output_distribution(const ProtocolTree& p, const Gadget& g, const BitVector& z,
                                                     const LiftingParams& params, const BranchVisitor& visit) {
  if (params.mode != SimMode::Randomized) throw Error("enumeration needs randomized parameters");
  Engine engine(p, g, z, params);
  EnumerateChooser chooser;
  EnumeratedDistribution out;
  engine.run(engine.initial(), Rational(1), chooser, [&](SimResult&& r, const Rational& w) {
    switch (r.status) {
      case SimStatus::Done: out.outcomes.add(r.transcript, w); break;
      case SimStatus::ErrorHaltK: out.error_k += w; break;
      case SimStatus::ErrorHaltTruncation: out.error_truncation += w; break;
      case SimStatus::InvariantViolation: out.error_violation += w; break;
    }
    if (r.status != SimStatus::Done) out.outcomes.add(kErrorLabel, w);
    if (visit) visit(r, w);
  });
  out.branches = engine.leaves;
  out.outcomes.validate();
  return out;
}

EnumeratedDistribution enumerate_output_distribution(const RandomizedProtocol& rp, const Gadget& g,
                                                     const BitVector& z, const LiftingParams& params,
                                                     const BranchVisitor& visit) {
  rp.validate();
  EnumeratedDistribution out;
  for (const auto& c : rp.components) {
    if (c.weight == 0) continue;
    BranchVisitor scaled;
    if (visit) scaled = [&](const SimResult& r, const Rational& w) { visit(r, w * c.weight); };
    EnumeratedDistribution part = enumerate_output_distribution(c.protocol, g, z, params, scaled);
    out.outcomes.merge(part.outcomes.scaled(c.weight));
    out.error_k += part.error_k * c.weight;
    out.error_truncation += part.error_truncation * c.weight;
    out.error_violation += part.error_violation * c.weight;
    out.branches += part.branches;
  }
  out.outcomes.validate();
  return out;
}

OutcomeDistribution reference_distribution(const ProtocolTree& p, const Gadget& g, const BitVector& z) {
  p.validate();
  const BlockSpace space{p.n(), p.b()};
  if (2 * space.blocks * space.b > 24) throw BudgetError("reference distribution limited to 2bn <= 24");
  const std::uint32_t target = z.code();
  std::map<std::string, long> counts;
  long total = 0;
  for (Code x = 0; x < space.size(); ++x) {
    for (Code y = 0; y < space.size(); ++y) {
      if (outputs_on(g, space, x, y, space.all()) != target) continue;
      ++counts[run_protocol(p, x, y).transcript.bits];
      ++total;
    }
  }
  if (total == 0) throw Error("z has no preimage");
  OutcomeDistribution d;
  for (const auto& [t, k] : counts) d.add(t, ratio(static_cast<long>(k), static_cast<long>(total)));
  return d;
}

LedgerReport ledger_assertions(const SimResult& result, const Gadget& g) {
  (void)g;
  LedgerReport rep;
  const LiftingParams& prm = result.trace.params;
  const bool randomized = prm.mode == SimMode::Randomized;
  const int b = prm.b;
  const BlockSpace space{prm.n, b};
  const bool in_regime = std::all_of(result.trace.regime.begin(), result.trace.regime.end(),
                                     [](const RegimeCheck& c) { return c.holds; });
  LogReal total_increase(0);
  bool all_decrease_clauses = true;

  auto add = [&](int round, std::string clause, bool pre, bool holds, std::string detail) {
    rep.clauses.push_back(LedgerClause{round, std::move(clause), pre, holds, std::move(detail)});
  };

  for (const RoundRecord& rec : result.trace.rounds) {
    std::vector<Rational> Q;
    for (const auto& cp : rec.checkpoints) {
      Rational mx = maxprob_on(space, cp.xset, cp.free);
      Rational my = maxprob_on(space, cp.yset, cp.free);
      if (mx != cp.maxprob_x || my != cp.maxprob_y) ++rep.recompute_mismatches;
      DeficiencySnapshot fresh = cp;
      fresh.maxprob_x = mx;
      fresh.maxprob_y = my;
      Rational q = fresh.power();
      add(rec.round, "deficiency >= 0", true, q >= 1, "2^deficiency = " + to_string(q));
      Q.push_back(q);
    }
    const int r = rec.round;
    const int I = set_size(rec.query);
    const Rational kept = Rational(1) - rec.discarded_mass;
    const bool discard_small = rec.discarded_mass <= Rational(1, 2);

    add(r, "round start: speaker (delta - eps)-dense and silent party delta-dense", in_regime,
        rec.speaker_dense_at_start && rec.silent_dense_at_start,
        in_regime ? "" : "parameters outside the theorem's regime; recorded only");

    if (Q.size() >= 2) {
      add(r, "step 1: increase <= log(1/Pr[kept])", true, Q[1] * kept <= Q[0],
          "discarded mass " + to_string(rec.discarded_mass));
      add(r, "step 1: increase <= 1 bit", discard_small, Q[1] <= 2 * Q[0],
          "discarded mass " + to_string(rec.discarded_mass));
    }
    if (Q.size() >= 3) {
      if (!randomized) {
        const long m = static_cast<long>(rec.message.size());
        add(r, "step 2: increase <= |M|", true, Q[2] <= pow2(m) * Q[1], "|M| = " + std::to_string(m));
        add(r, "steps 1-2: increase <= |M| + 1", discard_small, Q[2] <= pow2(m + 1) * Q[0],
            "|M| = " + std::to_string(m));
      } else {
        add(r, "step 2: increase <= log(1/p_M)", true, Q[2] * rec.p_message <= Q[1],
            "p_M = " + to_string(rec.p_message));
        add(r, "steps 1-2: increase <= log(1/p_M) + 1", discard_small, Q[2] * rec.p_message <= 2 * Q[0],
            "p_M = " + to_string(rec.p_message));
      }
      total_increase += LogReal::log2_of(Q[2] / Q[0]);
    }
    if (Q.size() < 6) continue;  // the round halted before querying

    // x_I is not leaking when the silent party keeps at least 2^(-|I|-1) of its mass.
    const bool not_leaking = rec.y_condition_prob * pow2(I + 1) >= 1;
    const Rational ratio = Q[5] / Q[2];
    const std::string ratio_detail = "2^deficiency after/before = " + to_string(ratio) + ", |I| = " +
                                     std::to_string(I);
    auto decrease_clause = [&](const std::string& name, const LogReal& kappa, bool extra_pre) {
      // log2(Q2/Q5) >= kappa * b * |I|  <=>  Q5/Q2 <= 2^(-kappa b |I|).
      bool pre = not_leaking && extra_pre;
      bool holds = le_pow2(ratio, -(kappa * Rational(b * I)));
      if (pre && !holds) all_decrease_clauses = false;
      if (!pre) all_decrease_clauses = false;
      add(r, name, pre, holds, ratio_detail);
    };
    if (!randomized) {
      LogReal kappa = LogReal(1) - prm.delta - LogReal(qclift::ratio(2, b));
      decrease_clause("steps 3-5: decrease >= (1 - delta - 2/b) b |I|", kappa, true);
      // The sharper per-round form: b|I| - delta b|I| - (|I| + 1).
      LogReal exact_bound = (LogReal(1) - prm.delta) * Rational(b * I) - LogReal(Rational(I + 1));
      add(r, "steps 3-5: decrease >= b|I| - delta b|I| - |I| - 1", not_leaking, le_pow2(ratio, -exact_bound),
          ratio_detail);
    } else {
      // Sufficient condition for the rounded bound given the exact form:
      // log2(1/p_geq) + |I| + 1 <= (eta/8 + 7/c) b |I|; with I empty, p_geq = 1.
      LogReal need = LogReal(Rational(I + 1)) - LogReal::log2_of(rec.p_geq);
      LogReal have = LogReal((prm.eta / 8 + Rational(7) / prm.c) * b * I);
      bool regime_ok = I == 0 ? rec.p_geq == 1 : have >= need;
      bool truncation_ok = !lt_pow2(rec.p_geq, prm.truncation_exponent());
      for (int reading = 0; reading < 2; ++reading) {
        LogReal delta = reading == 0 ? prm.delta : LogReal(Rational(1) - prm.eta / 8) + prm.eps / Rational(2);
        LogReal kappa = LogReal(1) - delta - LogReal(prm.eta / 8 + Rational(7) / prm.c);
        decrease_clause(std::string("steps 3-7: decrease >= (1 - delta - eta/8 - 7/c) b |I|") +
                            (reading == 0 ? "" : " [delta = 1 - eta/8 + eps/2]"),
                        kappa, regime_ok && truncation_ok);
      }
      // Exact form: b|I| - delta b|I| - log(1/p_geq) - |I| - 1.
      LogReal exact_bound = (LogReal(1) - prm.delta) * Rational(b * I) + LogReal::log2_of(rec.p_geq) -
                            LogReal(Rational(I + 1));
      add(r, "steps 3-7: decrease >= b|I| - delta b|I| - log(1/p_geq) - |I| - 1", not_leaking,
          le_pow2(ratio, -exact_bound), ratio_detail + ", p_geq = " + to_string(rec.p_geq));
    }
  }

  // Query bookkeeping: queries * kappa * b <= total increase when every
  // decrease clause applied and kappa > 0.
  LogReal kappa = !randomized ? LogReal(1) - prm.delta - LogReal(qclift::ratio(2, b))
                              : LogReal(1) - prm.delta - LogReal(prm.eta / 8 + Rational(7) / prm.c);
  bool pre = all_decrease_clauses && kappa.sign() > 0 && result.completed();
  add(0, "total queries <= total increase / (kappa b)", pre,
      kappa.sign() <= 0 || total_increase >= kappa * Rational(b * result.total_queries),
      "queries = " + std::to_string(result.total_queries) + ", kappa = " + kappa.to_string());
  return rep;
}

}  // namespace qclift
