#include "qclift/gadget.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include "qclift/error.hpp"

namespace qclift {

namespace {

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    long value = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return static_cast<int>(value);
  } catch (const std::exception&) {
    throw ParseError("malformed " + what + " '" + text + "'");
  }
}

void check_b(int b) {
  if (b < 1) throw Error("gadget block length must be positive");
  if (b > 12) throw BudgetError("gadget block length above 12");
}

}  // namespace

Gadget::Gadget(int b, std::vector<std::uint8_t> table) : b_(b), table_(std::move(table)) {
  check_b(b);
  if (table_.size() != (std::size_t{1} << (2 * b))) throw Error("gadget table must have 2^(2b) entries");
  for (auto v : table_) {
    if (v > 1) throw Error("gadget table entries must be bits");
  }
}

Gadget Gadget::inner_product(int b) {
  check_b(b);
  std::vector<std::uint8_t> t(std::size_t{1} << (2 * b));
  for (Code x = 0; x < (1U << b); ++x) {
    for (Code y = 0; y < (1U << b); ++y) t[(x << b) | y] = __builtin_parity(x & y);
  }
  return Gadget(b, std::move(t));
}

Gadget Gadget::constant(int b, int value) {
  check_b(b);
  return Gadget(b, std::vector<std::uint8_t>(std::size_t{1} << (2 * b), static_cast<std::uint8_t>(value != 0)));
}

Gadget Gadget::random(int b, std::uint64_t seed) {
  check_b(b);
  std::mt19937_64 gen(seed);
  std::vector<std::uint8_t> t(std::size_t{1} << (2 * b));
  for (auto& cell : t) cell = static_cast<std::uint8_t>(gen() >> 63);
  return Gadget(b, std::move(t));
}

Gadget Gadget::builtin(const std::string& name) {
  if (name == "and1") return Gadget(1, {0, 0, 0, 1});
  if (name == "or1") return Gadget(1, {0, 1, 1, 1});
  if (name == "xor1") return Gadget(1, {0, 1, 1, 0});
  if (name.rfind("ip", 0) == 0 && name.size() > 2) return inner_product(parse_int(name.substr(2), "gadget size"));
  if (name.rfind("const0:", 0) == 0) return constant(parse_int(name.substr(7), "gadget size"), 0);
  if (name.rfind("const1:", 0) == 0) return constant(parse_int(name.substr(7), "gadget size"), 1);
  if (name.rfind("rand:", 0) == 0) {
    auto colon = name.find(':', 5);
    if (colon == std::string::npos) throw ParseError("random gadget name must be rand:<b>:<seed>");
    int b = parse_int(name.substr(5, colon - 5), "gadget size");
    std::string seed_text = name.substr(colon + 1);
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(seed_text, &used);
      if (used != seed_text.size()) throw std::invalid_argument(seed_text);
    } catch (const std::exception&) {
      throw ParseError("malformed seed '" + seed_text + "'");
    }
    return random(b, seed);
  }
  throw ParseError("unknown builtin gadget '" + name + "'");
}

int Gadget::eval(const BitVector& x, const BitVector& y) const {
  if (x.size() != b_ || y.size() != b_) throw Error("gadget input length mismatch");
  return eval(x.code(), y.code());
}

Gadget Gadget::transpose() const {
  std::vector<std::uint8_t> t(table_.size());
  for (Code x = 0; x < side(); ++x) {
    for (Code y = 0; y < side(); ++y) t[(y << b_) | x] = eval(x, y);
  }
  return Gadget(b_, std::move(t));
}

std::uint32_t MultiGadget::eval(Code x, Code y) const {
  BlockSpace s = space();
  std::uint32_t out = 0;
  for (int i = 0; i < m; ++i) {
    int bit = base.eval(s.block(x, i), s.block(y, i));
    out = mode == Mode::Parity ? (out ^ bit) : ((out << 1) | bit);
  }
  return out;
}

MultiGadget xor_power(const Gadget& g, int m) {
  if (m < 1) throw Error("XOR power needs m >= 1");
  return MultiGadget{g, m, MultiGadget::Mode::Parity};
}

MultiGadget vector_power(const Gadget& g, int n) {
  if (n < 1) throw Error("vector power needs n >= 1");
  return MultiGadget{g, n, MultiGadget::Mode::Vector};
}

int parity_on(const Gadget& g, const BlockSpace& space, Code x, Code y, CoordSet coords) {
  int out = 0;
  for (int i = 0; i < space.blocks; ++i) {
    if (coords & (CoordSet{1} << i)) out ^= g.eval(space.block(x, i), space.block(y, i));
  }
  return out;
}

std::uint32_t outputs_on(const Gadget& g, const BlockSpace& space, Code x, Code y, CoordSet coords) {
  std::uint32_t out = 0;
  for (int i = 0; i < space.blocks; ++i) {
    if (coords & (CoordSet{1} << i)) out = (out << 1) | g.eval(space.block(x, i), space.block(y, i));
  }
  return out;
}

SignMatrix SignMatrix::of(const Gadget& g) {
  SignMatrix m;
  m.side = g.side();
  m.entries.resize(static_cast<std::size_t>(m.side) * m.side);
  for (Code x = 0; x < m.side; ++x) {
    for (Code y = 0; y < m.side; ++y) m.entries[x * m.side + y] = g.eval(x, y) ? -1 : 1;
  }
  return m;
}

SignMatrix SignMatrix::of(const MultiGadget& g) {
  if (g.mode != MultiGadget::Mode::Parity) throw Error("sign matrix needs a boolean-valued gadget");
  std::uint64_t side = g.space().size();
  if (side > (1U << 12)) throw BudgetError("sign matrix side above 4096");
  SignMatrix m;
  m.side = static_cast<std::uint32_t>(side);
  m.entries.resize(side * side);
  for (Code x = 0; x < m.side; ++x) {
    for (Code y = 0; y < m.side; ++y) m.entries[x * m.side + y] = g.eval(x, y) ? -1 : 1;
  }
  return m;
}

namespace {

Rational rectangle_sum(const SignMatrix& m, const Rectangle& r) {
  long total = 0;
  for (Code x : r.rows) {
    if (x >= m.side) throw Error("rectangle row outside the domain");
    for (Code y : r.cols) {
      if (y >= m.side) throw Error("rectangle column outside the domain");
      total += m.at(x, y);
    }
  }
  return ratio(std::labs(total), static_cast<long>(m.side) * m.side);
}

std::vector<Code> mask_elements(std::uint32_t mask) {
  std::vector<Code> out;
  for (int i : set_members(mask)) out.push_back(static_cast<Code>(i));
  return out;
}

}  // namespace

Rational rectangle_discrepancy(const Gadget& g, const Rectangle& r) {
  return rectangle_sum(SignMatrix::of(g), r);
}

Rational rectangle_discrepancy(const MultiGadget& g, const Rectangle& r) {
  return rectangle_sum(SignMatrix::of(g), r);
}

DiscrepancyResult discrepancy(const SignMatrix& m, std::uint32_t max_side, int jobs) {
  if (m.side > max_side || m.side > 20) {
    throw BudgetError("discrepancy side domain has " + std::to_string(m.side) +
                      " elements; limit is " + std::to_string(std::min<std::uint32_t>(max_side, 20)));
  }
  const std::uint32_t side = m.side;
  const std::size_t count = std::size_t{1} << side;
  // For each row set A: the best column set is all positive-sum columns or all
  // negative-sum columns; among equal values the canonically smaller wins.
  std::vector<long> best(count);
  std::vector<std::uint32_t> best_cols(count);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<long> sums(side);
    for (std::size_t a = begin; a < end; ++a) {
      std::fill(sums.begin(), sums.end(), 0);
      for (std::uint32_t x = 0; x < side; ++x) {
        if (!(a & (std::size_t{1} << x))) continue;
        for (std::uint32_t y = 0; y < side; ++y) sums[y] += m.at(x, y);
      }
      long pos = 0;
      long neg = 0;
      std::uint32_t pos_set = 0;
      std::uint32_t neg_set = 0;
      for (std::uint32_t y = 0; y < side; ++y) {
        if (sums[y] > 0) {
          pos += sums[y];
          pos_set |= 1U << y;
        } else if (sums[y] < 0) {
          neg -= sums[y];
          neg_set |= 1U << y;
        }
      }
      if (pos > neg || (pos == neg && canonical_less(pos_set, neg_set))) {
        best[a] = pos;
        best_cols[a] = pos_set;
      } else {
        best[a] = neg;
        best_cols[a] = neg_set;
      }
    }
  };
  jobs = std::max(1, jobs);
  if (jobs == 1 || count < 1024) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (count + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      std::size_t begin = j * chunk;
      std::size_t end = std::min(count, begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  std::uint32_t arg = 0;
  for (std::uint32_t a : canonical_subsets(static_cast<int>(side))) {
    if (best[a] > best[arg]) arg = a;
  }
  DiscrepancyResult result;
  result.value = Rational(best[arg], static_cast<unsigned long>(side) * side);
  result.value.canonicalize();
  result.argmax.rows = mask_elements(arg);
  result.argmax.cols = mask_elements(best_cols[arg]);
  return result;
}

DiscrepancyResult discrepancy(const Gadget& g, std::uint32_t max_side, int jobs) {
  if (g.side() > max_side) {
    throw BudgetError("discrepancy side domain has " + std::to_string(g.side()) + " elements; limit is " +
                      std::to_string(max_side));
  }
  return discrepancy(SignMatrix::of(g), max_side, jobs);
}

DiscrepancyResult discrepancy(const MultiGadget& g, std::uint32_t max_side, int jobs) {
  if (g.space().size() > max_side) {
    throw BudgetError("discrepancy side domain has " + std::to_string(g.space().size()) +
                      " elements; limit is " + std::to_string(max_side));
  }
  return discrepancy(SignMatrix::of(g), max_side, jobs);
}

XorLemmaReport check_xor_lemma(const Gadget& g, int m, std::uint32_t max_side, int jobs) {
  XorLemmaReport r;
  r.m = m;
  r.disc = discrepancy(g, max_side, jobs).value;
  r.value = m == 1 ? r.disc : discrepancy(xor_power(g, m), max_side, jobs).value;
  r.lower = pow(r.disc, m);
  r.upper = std::min(Rational(1), pow(64 * r.disc, m));
  r.sandwich_holds = r.lower <= r.value && r.value <= r.upper;
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Vacuous:
      return "vacuous";
    case Verdict::Fail:
      return "FAIL";
  }
  return "?";
}

Verdict verdict_of(bool hypothesis, bool conclusion) {
  if (!hypothesis) return Verdict::Vacuous;
  return conclusion ? Verdict::Pass : Verdict::Fail;
}

Rational row_bias(const Gadget& g, Code x, const DistributionTable& Y) {
  const BlockSpace& s = Y.space();
  if (s.b != g.b()) throw Error("distribution block length does not match the gadget");
  Rational total = 0;
  for (Code y = 0; y < Y.size(); ++y) {
    if (Y[y] == 0) continue;
    if (parity_on(g, s, x, y, s.all())) {
      total -= Y[y];
    } else {
      total += Y[y];
    }
  }
  return abs(total);
}

Rational product_bias(const Gadget& g, const DistributionTable& X, const DistributionTable& Y) {
  if (!(X.space() == Y.space())) throw Error("X and Y must share a domain");
  const BlockSpace& s = Y.space();
  Rational total = 0;
  for (Code x = 0; x < X.size(); ++x) {
    if (X[x] == 0) continue;
    Rational inner = 0;
    for (Code y = 0; y < Y.size(); ++y) {
      if (Y[y] == 0) continue;
      if (parity_on(g, s, x, y, s.all())) {
        inner -= Y[y];
      } else {
        inner += Y[y];
      }
    }
    total += X[x] * inner;
  }
  return abs(total);
}

namespace {

// maxprob(X) * maxprob(Y) <= 2^(-bits)  <=>  H(X) + H(Y) >= bits
bool entropy_sum_at_least(const DistributionTable& X, const DistributionTable& Y, const Rational& bits) {
  return le_pow2(X.max_prob() * Y.max_prob(), LogReal(-bits));
}

void check_pair(const Gadget& g, const DistributionTable& X, const DistributionTable& Y, bool single) {
  if (!(X.space() == Y.space())) throw Error("X and Y must share a domain");
  if (X.space().b != g.b()) throw Error("distribution block length does not match the gadget");
  if (single && X.space().blocks != 1) throw Error("lemma form takes X, Y over Lambda");
}

ExtractorReport extractor_impl(const Gadget& g, const Rational& disc, const DistributionTable& X,
                               const DistributionTable& Y, const Rational& eta, const Rational& lambda,
                               int extra_bits) {
  const int b = g.b();
  const int s = X.space().blocks;
  ExtractorReport r;
  r.disc_ok = le_pow2(disc, LogReal(-eta * b));
  r.entropy_ok = entropy_sum_at_least(X, Y, (2 - eta + lambda) * s * b + extra_bits * s);
  r.hypothesis = r.disc_ok && r.entropy_ok;
  r.bias = product_bias(g, X, Y);
  r.bound = DyadicThreshold{LogReal(lambda * b * s)};
  r.conclusion = compare_prob_to_threshold(r.bias, r.bound) != std::strong_ordering::greater;
  return r;
}

SamplingReport sampling_impl(const Gadget& g, const Rational& disc, const DistributionTable& X,
                             const DistributionTable& Y, const Rational& gamma, const Rational& lambda,
                             const Rational& eta, int extra_per_block, int extra_total) {
  const int b = g.b();
  const int s = X.space().blocks;
  SamplingReport r;
  r.disc_ok = le_pow2(disc, LogReal(-eta * b));
  r.entropy_ok = entropy_sum_at_least(X, Y, (2 - eta + gamma + lambda) * s * b + extra_per_block * s + extra_total);
  r.hypothesis = r.disc_ok && r.entropy_ok;
  DyadicThreshold bias_bound{LogReal(lambda * b * s)};
  r.bad_mass = 0;
  for (Code x = 0; x < X.size(); ++x) {
    if (X[x] == 0) continue;
    if (compare_prob_to_threshold(row_bias(g, x, Y), bias_bound) == std::strong_ordering::greater) {
      r.bad_mass += X[x];
    }
  }
  r.bound = DyadicThreshold{LogReal(gamma * b * s)};
  r.conclusion = compare_prob_to_threshold(r.bad_mass, r.bound) == std::strong_ordering::less;
  return r;
}

}  // namespace

ExtractorReport extractor_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                const DistributionTable& Y, const Rational& eta, const Rational& lambda) {
  check_pair(g, X, Y, true);
  return extractor_impl(g, disc, X, Y, eta, lambda, 0);
}

SamplingReport sampling_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                              const DistributionTable& Y, const Rational& gamma, const Rational& lambda,
                              const Rational& eta) {
  check_pair(g, X, Y, true);
  return sampling_impl(g, disc, X, Y, gamma, lambda, eta, 0, 1);
}

ExtractorReport xor_extractor_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                    const DistributionTable& Y, const Rational& eta,
                                    const Rational& lambda) {
  check_pair(g, X, Y, false);
  return extractor_impl(g, disc, X, Y, eta, lambda, 6);
}

SamplingReport xor_sampling_check(const Gadget& g, const Rational& disc, const DistributionTable& X,
                                  const DistributionTable& Y, const Rational& gamma,
                                  const Rational& lambda, const Rational& eta) {
  check_pair(g, X, Y, false);
  return sampling_impl(g, disc, X, Y, gamma, lambda, eta, 7, 0);
}

}  // namespace qclift
