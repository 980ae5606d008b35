#pragma once

// Gadgets g : Lambda x Lambda -> {0,1}, their XOR powers, exact
// discrepancy by rectangle enumeration, and the extractor/sampling checks.

#include <cstdint>
#include <string>
#include <vector>

#include "qclift/blocks.hpp"
#include "qclift/distribution.hpp"
#include "qclift/exact.hpp"

namespace qclift {

class Gadget {
 public:
  Gadget() = default;
  /// table[x * 2^b + y] = g(x, y).
  Gadget(int b, std::vector<std::uint8_t> table);

  /// and1, or1, xor1, ip<b>, const0:<b>, const1:<b>, rand:<b>:<seed>.
  static Gadget builtin(const std::string& name);
  static Gadget inner_product(int b);
  static Gadget constant(int b, int value);
  /// Each cell an independent fair bit from mt19937_64 seeded with `seed`.
  static Gadget random(int b, std::uint64_t seed);

  int b() const { return b_; }
  std::uint32_t side() const { return std::uint32_t{1} << b_; }
  const std::vector<std::uint8_t>& table() const { return table_; }
  int eval(Code x, Code y) const { return table_[(static_cast<std::size_t>(x) << b_) | y]; }
  int eval(const BitVector& x, const BitVector& y) const;
  /// g^T(y, x) = g(x, y); used when Bob plays Alice's role.
  Gadget transpose() const;
  bool operator==(const Gadget&) const = default;

 private:
  int b_ = 0;
  std::vector<std::uint8_t> table_;
};

/// g^I (vector mode, output bit i is g(x_i, y_i), first coordinate most
/// significant) or g^{xor I} (parity mode) over Lambda^m x Lambda^m.
struct MultiGadget {
  enum class Mode { Vector, Parity };
  Gadget base;
  int m = 1;
  Mode mode = Mode::Parity;

  BlockSpace space() const { return BlockSpace{m, base.b()}; }
  std::uint32_t eval(Code x, Code y) const;
};

MultiGadget xor_power(const Gadget& g, int m);
/// g^n in vector mode.
MultiGadget vector_power(const Gadget& g, int n);

/// Parity of g^I(x_I, y_I) for the coordinate set `coords` of Lambda^n codes.
int parity_on(const Gadget& g, const BlockSpace& space, Code x, Code y, CoordSet coords);
/// g^I(x_I, y_I) as a code over {0,1}^|I|, first member most significant.
std::uint32_t outputs_on(const Gadget& g, const BlockSpace& space, Code x, Code y, CoordSet coords);

/// Rows and columns are subsets of the side domain (element codes).
struct Rectangle {
  std::vector<Code> rows;
  std::vector<Code> cols;
};

/// +-1 matrix M(x, y) = (-1)^f(x, y) over a square side domain.
struct SignMatrix {
  std::uint32_t side = 0;
  std::vector<std::int8_t> entries;  // row-major

  static SignMatrix of(const Gadget& g);
  static SignMatrix of(const MultiGadget& g);
  int at(Code x, Code y) const { return entries[static_cast<std::size_t>(x) * side + y]; }
};

Rational rectangle_discrepancy(const Gadget& g, const Rectangle& r);
Rational rectangle_discrepancy(const MultiGadget& g, const Rectangle& r);

struct DiscrepancyResult {
  Rational value;
  Rectangle argmax;
};

constexpr std::uint32_t kDefaultRectangleSide = 16;

/// Exact maximum over all rectangles, with the first maximizer in canonical
/// order (rows set first, then columns set; subsets ordered by size, then
/// lexicographically).  Refuses side domains above `max_side`.
DiscrepancyResult discrepancy(const SignMatrix& m, std::uint32_t max_side = kDefaultRectangleSide,
                              int jobs = 1);
DiscrepancyResult discrepancy(const Gadget& g, std::uint32_t max_side = kDefaultRectangleSide,
                              int jobs = 1);
DiscrepancyResult discrepancy(const MultiGadget& g, std::uint32_t max_side = kDefaultRectangleSide,
                              int jobs = 1);

struct XorLemmaReport {
  int m = 1;
  Rational disc;
  Rational lower;
  Rational value;
  Rational upper;  // min(1, (64 disc)^m)
  bool sandwich_holds = false;
};

XorLemmaReport check_xor_lemma(const Gadget& g, int m, std::uint32_t max_side = kDefaultRectangleSide,
                               int jobs = 1);

/// Outcome of a conditional statement checked on one instance.
enum class Verdict { Pass, Vacuous, Fail };
std::string to_string(Verdict v);
Verdict verdict_of(bool hypothesis, bool conclusion);

struct ExtractorReport {
  bool hypothesis = false;
  bool disc_ok = false;
  bool entropy_ok = false;
  Rational bias;
  DyadicThreshold bound;  // |Lambda|^(-lambda) or |Lambda|^(-lambda |S|)
  bool conclusion = false;
};

struct SamplingReport {
  bool hypothesis = false;
  bool disc_ok = false;
  bool entropy_ok = false;
  Rational bad_mass;
  DyadicThreshold bound;  // |Lambda|^(-gamma) or |Lambda|^(-gamma |S|)
  bool conclusion = false;
};

/// Extractor lemma for X, Y over Lambda (one block); `disc` is disc(g).
ExtractorReport extractor_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                const DistributionTable& Y, const Rational& eta, const Rational& lambda);
/// Sampling lemma for X, Y over Lambda.
SamplingReport sampling_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                              const DistributionTable& Y, const Rational& gamma, const Rational& lambda,
                              const Rational& eta);
/// XOR corollaries: X, Y over Lambda^S, function g^{xor S}; the entropy
/// thresholds carry the extra 6 (extractor) or 7 (sampling) bits per coordinate.
ExtractorReport xor_extractor_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                    const DistributionTable& Y, const Rational& eta,
                                    const Rational& lambda);
SamplingReport xor_sampling_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                  const DistributionTable& Y, const Rational& gamma,
                                  const Rational& lambda, const Rational& eta);

/// bias(g^{xor m}(x, Y)) for fixed x over Lambda^m.
Rational row_bias(const Gadget& g, Code x, const DistributionTable& Y);
/// bias(g^{xor m}(X, Y)) for independent X, Y.
Rational product_bias(const Gadget& g, const DistributionTable& X, const DistributionTable& Y);

}  // namespace qclift
