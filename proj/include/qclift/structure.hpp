#pragma once

// Restrictions, density, (rho, tau)-structure, density-restoring fixing and
// partition, and the leaking / sparsifying / skewing / biasing classification.
//
// Distributions here live over Lambda^F for some coordinate set F (usually
// the free coordinates); coordinate sets are local to that domain.

#include <optional>
#include <string>
#include <vector>

#include "qclift/distribution.hpp"
#include "qclift/gadget.hpp"

namespace qclift {

class Restriction {
 public:
  Restriction() = default;
  explicit Restriction(int n) : cells_(static_cast<std::size_t>(n), '*') {}
  /// Parses a string over {0,1,*}.
  static Restriction parse(const std::string& cells);

  int n() const { return static_cast<int>(cells_.size()); }
  const std::string& str() const { return cells_; }
  char at(int i) const { return cells_[i]; }
  CoordSet free() const;
  CoordSet fixed() const;
  void fix(int i, int bit);
  /// Fixed bits in coordinate order as a code over {0,1}^|fix|.
  std::uint32_t fixed_bits() const;
  bool consistent(const BitVector& z) const;
  bool operator==(const Restriction&) const = default;

 private:
  std::string cells_;
};

/// Limits for exhaustive scans over coordinate sets and values.
struct ScanBudget {
  int max_coords = 3;
  int max_b = 2;
};
void check_scan_budget(const BlockSpace& space, const ScanBudget& budget);

struct DensityWitness {
  bool dense = true;
  CoordSet violating_set = 0;
  /// Heaviest value of X_I (lexicographically first) and its mass.
  Code value = 0;
  Rational mass;
};

/// Checks H(X_I) >= delta * b * |I| for every nonempty I, canonical order.
DensityWitness is_dense(const DistributionTable& X, const LogReal& delta);

struct DensityBracket {
  /// sup{delta : X is delta-dense}, exactly: min over I of log2(1/maxprob(X_I)) / (b |I|).
  LogReal exact;
  Rational lower;
  Rational upper;
  /// True when the domain has no coordinates, so every delta works.
  bool vacuous = false;
};

constexpr long kDefaultDensityResolutionBits = 20;

/// Dyadic bracket [lower, upper] around the maximal density, of width
/// 2^-resolution_bits, with is_dense(X, lower) true and is_dense(X, upper)
/// false unless the bracket is degenerate at the exact value.
DensityBracket max_density(const DistributionTable& X, long resolution_bits = kDefaultDensityResolutionBits);

struct StructureCertificate {
  Restriction rho;
  LogReal delta_x;
  LogReal delta_y;
  LogReal tau;
};

struct StructureCheck {
  std::optional<StructureCertificate> certificate;
  /// "fixed-block consistency", "density sum" or "zero density".
  std::string refusal;
};

/// X, Y over Lambda^n.  Uses the exact maximal densities of the free marginals.
StructureCheck is_structured(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                             const LogReal& tau, const Gadget& g);
/// Re-verifies a certificate from scratch.
bool verify_certificate(const DistributionTable& X, const DistributionTable& Y, const StructureCertificate& cert,
                        const Gadget& g);

struct DensityFix {
  CoordSet I = 0;
  Code x_I = 0;
  /// Pr[X_I = x_I] (1 when I is empty).
  Rational mass;
  /// X conditioned on X_I = x_I, over the same domain as X.
  DistributionTable conditioned;
  /// X_{F-I} | X_I = x_I, over Lambda^(F-I).
  DistributionTable remainder;
};

/// Maximum-cardinality violating set (lexicographically first) and its
/// heaviest value (lexicographically first).  Asserts the remainder is dense.
DensityFix density_restoring_fix(const DistributionTable& X, const LogReal& delta);

struct DensityPart {
  std::vector<Code> members;  // part of the support, ascending
  CoordSet I = 0;
  Code x_I = 0;
  Rational p_geq;   // Pr[X in this part or a later one]
  Rational p_part;  // Pr[X in this part]
};

struct DensityPartition {
  std::vector<DensityPart> parts;
};

/// Greedy fix-and-carve on the residual support; asserts the three
/// guarantees (fixed block, dense remainder, entropy bound) for every part.
DensityPartition density_restoring_partition(const DistributionTable& X, const LogReal& delta);

struct PartitionCheck {
  bool fixed_block = true;
  bool dense_remainder = true;
  bool entropy_bound = true;
  bool covers_support = true;
  bool p_geq_decreasing = true;
  std::string detail;
  bool ok() const { return fixed_block && dense_remainder && entropy_bound && covers_support && p_geq_decreasing; }
};

/// Independent recomputation of every guarantee for a given partition.
PartitionCheck check_partition(const DistributionTable& X, const LogReal& delta, const DensityPartition& p);

// Dangerous-value classification.  x is a value over Lambda^F and Y a
// distribution over Lambda^F.

struct LeakWitness {
  CoordSet I = 0;
  std::uint32_t z = 0;  // over {0,1}^|I|, first member most significant
  Rational prob;
};

struct SparsifyWitness {
  CoordSet I = 0;
  std::uint32_t z = 0;
  CoordSet J = 0;  // local to F, disjoint from I
  Code y_J = 0;
  Rational cond_prob;  // Pr[Y_J = y_J | g^I(x_I, Y_I) = z]
};

struct SkewWitness {
  CoordSet I = 0;
  CoordSet J = 0;
  Code y_J = 0;
  std::uint32_t z = 0;  // most likely output of g^I given Y_J = y_J
  Rational cond_maxprob;
  Rational y_prob;
};

struct BiasWitness {
  CoordSet S = 0;
  CoordSet J = 0;
  Code y_J = 0;
  Rational bias;
  Rational y_prob;
};

struct DangerParams {
  LogReal delta_y;
  LogReal eps;
};

/// Distribution of g^I(x_I, Y_I) over {0,1}^|I|, optionally given Y_J = y_J.
std::vector<Rational> output_distribution(const Gadget& g, Code x, const DistributionTable& Y, CoordSet I);

std::optional<LeakWitness> is_leaking(Code x, const DistributionTable& Y, const Gadget& g);
std::optional<SparsifyWitness> is_sparsifying(Code x, const DistributionTable& Y, const Gadget& g,
                                              const DangerParams& p);
std::optional<SkewWitness> is_skewing(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p);
/// Requires a rational eps (c * eps * |J| multiplies log n).
std::optional<BiasWitness> is_biasing(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p,
                                      const Rational& c, int n);

bool is_dangerous(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p);

/// Exact X-mass of dangerous values.
Rational dangerous_probability(const DistributionTable& X, const DistributionTable& Y, const Gadget& g,
                               const DangerParams& p);

/// Witness re-verification, used by property tests and the corpus runner.
bool recheck(const LeakWitness& w, Code x, const DistributionTable& Y, const Gadget& g);
bool recheck(const SparsifyWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p);
bool recheck(const SkewWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p);
bool recheck(const BiasWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p,
             const Rational& c, int n);

}  // namespace qclift
