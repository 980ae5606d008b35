#pragma once

// Exact probability distributions, min-entropy tests, statistical distance,
// Fourier coefficients and the two Vazirani-lemma checkers.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclift/blocks.hpp"
#include "qclift/exact.hpp"

namespace qclift {

/// Probability mass function over a block domain Lambda^k, stored densely
/// in canonical (lexicographic) order.  Masses are nonnegative and sum to
/// exactly one; every constructor validates this.
class DistributionTable {
 public:
  DistributionTable(BlockSpace space, std::vector<Rational> mass);

  static DistributionTable uniform(BlockSpace space);
  static DistributionTable uniform_on(BlockSpace space, const std::vector<Code>& support);
  static DistributionTable point(BlockSpace space, Code element);

  const BlockSpace& space() const { return space_; }
  const std::vector<Rational>& masses() const { return mass_; }
  const Rational& operator[](Code x) const { return mass_[x]; }
  std::uint64_t size() const { return mass_.size(); }

  std::vector<Code> support() const;
  Rational max_prob() const;
  /// Lexicographically first element of maximum mass.
  Code argmax() const;
  Rational probability(const std::function<bool(Code)>& event) const;

 private:
  BlockSpace space_;
  std::vector<Rational> mass_;
};

/// Renormalized restriction to an event.  Throws on a zero-mass event.
DistributionTable condition(const DistributionTable& d, const std::function<bool(Code)>& event);
/// Marginal on the coordinates in `coords`, as a distribution over Lambda^|coords|.
DistributionTable project(const DistributionTable& d, CoordSet coords);
/// Half the L1 distance; throws when the domains differ.
Rational statistical_distance(const DistributionTable& a, const DistributionTable& b);

/// |Pr[V=0] - Pr[V=1]| for a distribution over {0,1} (one block, b = 1).
Rational bias(const DistributionTable& d);
/// Bias of the parity of the bits at positions `bits` (bit 0 is the first,
/// most significant, bit of the code).
Rational parity_bias(const DistributionTable& d, std::uint32_t bits);

/// H_inf(d) >= q, i.e. every mass is at most 2^(-q).
bool min_entropy_at_least(const DistributionTable& d, const LogReal& q);

/// Fourier coefficient of the mass function mu over {0,1}^m (m = b*blocks):
///   mu_hat(S) = 2^-m * sum_z mu(z) * chi_S(z).
/// With this convention |mu_hat(S)| = 2^-m * parity_bias(S) and mu_hat({}) = 2^-m.
Rational fourier_coefficient(const DistributionTable& d, std::uint32_t bits);
/// All 2^m coefficients, indexed by bit mask.
std::vector<Rational> fourier_transform(const DistributionTable& d);
/// mu(z) = sum_S mu_hat(S) chi_S(z), reconstructing every mass.
std::vector<Rational> fourier_inverse(const std::vector<Rational>& coefficients, int m);

struct VaziraniReport {
  bool hypothesis = false;
  bool conclusion = false;
  /// Nonempty S maximizing bias(S) * (2m)^|S|.
  std::uint32_t worst_set = 0;
  Rational worst_set_bias;
  /// Point whose mass deviates most from 2^-m.
  Code worst_point = 0;
  Rational worst_point_deviation;
};

/// Hypothesis: bias(xor_S Z) <= eps * (2m)^-|S| for all nonempty S.
/// Conclusion: every mass lies in [(1-eps) 2^-m, (1+eps) 2^-m].
VaziraniReport vazirani_uniformity_check(const DistributionTable& d, const Rational& eps);

struct VaziraniMinEntropyReport {
  bool hypothesis = false;
  bool conclusion = false;
};

/// Hypothesis: bias(xor_S Z) <= (2m)^-|S| for every |S| >= t.
/// Conclusion: H_inf(Z) >= m - t log m - 1, tested as maxprob * 2^(m-1) <= m^t.
VaziraniMinEntropyReport vazirani_minentropy_check(const DistributionTable& d, int t);

/// Distribution over arbitrary string labels (messages, transcripts,
/// outcomes).  Labels absent from the map have mass zero.
class OutcomeDistribution {
 public:
  void add(const std::string& label, const Rational& mass);
  const std::map<std::string, Rational>& masses() const { return mass_; }
  Rational mass(const std::string& label) const;
  Rational total() const;
  bool empty() const { return mass_.empty(); }
  /// Throws unless the masses sum to exactly one.
  void validate() const;
  OutcomeDistribution scaled(const Rational& factor) const;
  void merge(const OutcomeDistribution& other);

 private:
  std::map<std::string, Rational> mass_;
};

/// Half the L1 distance, over the union of both label sets.
Rational statistical_distance(const OutcomeDistribution& a, const OutcomeDistribution& b);

}  // namespace qclift
