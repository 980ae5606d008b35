#pragma once

// Round-by-round simulation of a protocol on G = g^n by a parallel decision
// tree: the deterministic five-step round and the randomized seven-step
// round, with an exact deficiency ledger and error-halt accounting.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qclift/protocol.hpp"
#include "qclift/structure.hpp"

namespace qclift {

enum class SimMode { Deterministic, Randomized };

/// Which exponent the randomized truncation threshold uses:
/// (1/8) 2^(-(eta/8) b) / (2nb), or (1/8) 2^(-eta/8) / (2nb).
enum class TruncationReading { BlockExponent, ConstantExponent };

struct LiftingParams {
  SimMode mode = SimMode::Deterministic;
  Rational eta{1, 2};
  Rational c{64};
  Rational h{1};
  int b = 1;
  int n = 1;
  LogReal eps;
  LogReal delta;
  LogReal tau;
  LogReal gamma;
  /// Set when eps/delta/tau/gamma were overridden rather than derived.
  bool nonstandard = false;
  TruncationReading truncation = TruncationReading::BlockExponent;
  std::uint64_t branch_budget = 1000000;

  /// Derives eps, delta = 1 - eta/4 + eps/2, tau = 2 delta - eps, and gamma
  /// (1/b deterministic; eta/8 + 3 log c / c + 4/b randomized).
  static LiftingParams derive(SimMode mode, const Rational& eta, const Rational& c, const Rational& h, int b, int n);
  /// Replaces the derived values and marks the parameters nonstandard.
  void override_values(std::optional<LogReal> eps, std::optional<LogReal> delta, std::optional<LogReal> tau,
                       std::optional<LogReal> gamma);
  /// Truncation threshold t; a class is truncated when p_geq < t.
  LogReal truncation_exponent() const;  // log2 of t
};

/// One named inequality of the theorem's regime and whether it holds here.
struct RegimeCheck {
  std::string name;
  bool holds = false;
  std::string detail;
};

/// Inequalities the guarantees depend on, including every one in which h appears.
std::vector<RegimeCheck> regime_checks(const LiftingParams& p, const Rational& disc);

/// Exact deficiency snapshot: 2^deficiency = 2^(2b|F|) * maxprob(X_F) * maxprob(Y_F).
struct DeficiencySnapshot {
  int b = 1;
  CoordSet free = 0;
  Rational maxprob_x;
  Rational maxprob_y;
  std::vector<Code> xset;
  std::vector<Code> yset;

  Rational power() const;  // 2^deficiency, exactly
  LogReal bits() const;
};

struct RoundRecord {
  int round = 0;
  Speaker speaker = Speaker::Alice;
  CoordSet free_at_start = 0;

  // Step 1.
  Rational delta_silent;  // lower bracket of the silent party's max density
  bool silent_vacuous = false;
  Rational discarded_mass;
  // Step 2.
  std::string message;
  Rational p_message;
  Rational k_product;  // running product of sampled message probabilities
  // Step 3 / 4 (randomized: partition class, 1-based).
  int partition_class = 0;
  int partition_size = 0;
  Rational p_class;
  Rational p_geq;
  CoordSet query = 0;  // global coordinates
  Code x_query = 0;    // speaker's value on the queried blocks
  std::uint32_t z_query = 0;
  // Step 5 / 7.
  Rational y_condition_prob;

  /// Snapshots: round start, after discard, after message, after fixing,
  /// after querying, after conditioning the silent party.
  std::vector<DeficiencySnapshot> checkpoints;
  bool speaker_dense_at_start = false;  // (delta - eps)-dense
  bool silent_dense_at_start = false;   // delta-dense
  std::vector<std::string> flags;
};

enum class SimStatus { Done, ErrorHaltK, ErrorHaltTruncation, InvariantViolation };
std::string to_string(SimStatus s);

struct SimTrace {
  LiftingParams params;
  std::string z;
  int C = 0;
  int r = 0;
  std::vector<RegimeCheck> regime;
  std::vector<RoundRecord> rounds;
};

struct SimResult {
  SimStatus status = SimStatus::Done;
  std::string reason;
  std::string transcript;
  std::string output;
  Restriction rho;
  int total_queries = 0;
  std::vector<CoordSet> round_queries;
  int depth = 0;
  std::vector<Code> xset;
  std::vector<Code> yset;
  SimTrace trace;

  bool completed() const { return status == SimStatus::Done; }
};

SimResult lift_deterministic(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params);

/// First (x, y) in canonical order within the final rectangle with
/// g^n(x, y) = z whose run reproduces the transcript.
std::optional<std::pair<Code, Code>> certify_transcript(const SimResult& result, const ProtocolTree& p,
                                                        const Gadget& g, const BitVector& z);

/// Sampled randomized run; all sampling draws from a GMP Mersenne-Twister seeded with `seed`.
SimResult lift_randomized(const ProtocolTree& p, const Gadget& g, const BitVector& z, const LiftingParams& params,
                          std::uint64_t seed);

/// Samples the deterministic component first, then runs it.
SimResult lift_randomized_protocol(const RandomizedProtocol& rp, const Gadget& g, const BitVector& z,
                                   const LiftingParams& params, std::uint64_t seed);

inline constexpr const char* kErrorLabel = "ERROR";

struct EnumeratedDistribution {
  /// Transcripts plus kErrorLabel.
  OutcomeDistribution outcomes;
  Rational error_k;            // step-3 halts (K > C + b)
  Rational error_truncation;   // truncated classes
  Rational error_violation;    // emptied rectangles
  std::uint64_t branches = 0;  // leaves of the enumeration
  Rational error_total() const { return error_k + error_truncation + error_violation; }
};

/// Called once per enumeration leaf with its exact probability.
using BranchVisitor = std::function<void(const SimResult&, const Rational&)>;

/// Exact output distribution of the randomized simulation by exhaustive
/// branching over messages and partition classes.  Throws BudgetError when
/// more than params.branch_budget leaves would be produced.
EnumeratedDistribution enumerate_output_distribution(const ProtocolTree& p, const Gadget& g, const BitVector& z,
                                                     const LiftingParams& params,
                                                     const BranchVisitor& visit = nullptr);
/// Weighted mixture of the component enumerations.
EnumeratedDistribution enumerate_output_distribution(const RandomizedProtocol& rp, const Gadget& g,
                                                     const BitVector& z, const LiftingParams& params,
                                                     const BranchVisitor& visit = nullptr);

/// Transcript distribution of P on (X, Y) uniform over G^-1(z).
OutcomeDistribution reference_distribution(const ProtocolTree& p, const Gadget& g, const BitVector& z);

struct LedgerClause {
  int round = 0;
  std::string clause;
  bool precondition = true;
  bool holds = true;
  std::string detail;
  bool mismatch() const { return precondition && !holds; }
};

struct LedgerReport {
  std::vector<LedgerClause> clauses;
  /// Recorded checkpoint values that disagree with recomputation from the stored supports.
  int recompute_mismatches = 0;
  int unexplained() const;
};

/// Recomputes every deficiency delta from the stored supports and checks
/// the per-step clauses whose preconditions the trace records.
LedgerReport ledger_assertions(const SimResult& result, const Gadget& g);

}  // namespace qclift
