#include "qclift/distribution.hpp"

#include <algorithm>

#include "qclift/error.hpp"

namespace qclift {

namespace {

int parity(std::uint32_t v) { return __builtin_parity(v); }

// Bit mask over code bits for bit positions given as "position 0 = first bit".
std::uint32_t code_mask(std::uint32_t bits, int m) {
  std::uint32_t out = 0;
  for (int i = 0; i < m; ++i) {
    if (bits & (1U << i)) out |= 1U << (m - 1 - i);
  }
  return out;
}

}  // namespace

DistributionTable::DistributionTable(BlockSpace space, std::vector<Rational> mass)
    : space_(space), mass_(std::move(mass)) {
  if (space_.b * space_.blocks > 24) throw BudgetError("distribution domain exceeds 2^24 elements");
  if (mass_.size() != space_.size()) throw Error("distribution mass vector does not match its domain");
  Rational total = 0;
  for (const auto& p : mass_) {
    if (p < 0) throw Error("negative probability mass");
    total += p;
  }
  if (total != 1) throw Error("probability masses sum to " + total.get_str() + ", not 1");
}

DistributionTable DistributionTable::uniform(BlockSpace space) {
  return DistributionTable(space, std::vector<Rational>(space.size(), Rational(1, space.size())));
}

DistributionTable DistributionTable::uniform_on(BlockSpace space, const std::vector<Code>& support) {
  if (support.empty()) throw Error("uniform distribution over an empty set");
  std::vector<Rational> mass(space.size());
  for (Code x : support) {
    if (x >= space.size()) throw Error("support element outside the domain");
    if (mass[x] != 0) throw Error("duplicate support element");
    mass[x] = Rational(1, support.size());
  }
  return DistributionTable(space, std::move(mass));
}

DistributionTable DistributionTable::point(BlockSpace space, Code element) {
  return uniform_on(space, {element});
}

std::vector<Code> DistributionTable::support() const {
  std::vector<Code> out;
  for (Code x = 0; x < mass_.size(); ++x) {
    if (mass_[x] > 0) out.push_back(x);
  }
  return out;
}

Rational DistributionTable::max_prob() const { return mass_[argmax()]; }

Code DistributionTable::argmax() const {
  Code best = 0;
  for (Code x = 1; x < mass_.size(); ++x) {
    if (mass_[x] > mass_[best]) best = x;
  }
  return best;
}

Rational DistributionTable::probability(const std::function<bool(Code)>& event) const {
  Rational total = 0;
  for (Code x = 0; x < mass_.size(); ++x) {
    if (mass_[x] > 0 && event(x)) total += mass_[x];
  }
  return total;
}

DistributionTable condition(const DistributionTable& d, const std::function<bool(Code)>& event) {
  Rational total = d.probability(event);
  if (total == 0) throw Error("conditioning on null event");
  std::vector<Rational> mass(d.size());
  for (Code x = 0; x < d.size(); ++x) {
    if (d[x] > 0 && event(x)) mass[x] = d[x] / total;
  }
  return DistributionTable(d.space(), std::move(mass));
}

DistributionTable project(const DistributionTable& d, CoordSet coords) {
  const BlockSpace& space = d.space();
  if ((coords & ~space.all()) != 0) throw Error("projection onto coordinates outside the domain");
  BlockSpace target = space.sub(coords);
  std::vector<Rational> mass(target.size());
  for (Code x = 0; x < d.size(); ++x) {
    if (d[x] > 0) mass[space.project(x, coords)] += d[x];
  }
  return DistributionTable(target, std::move(mass));
}

Rational statistical_distance(const DistributionTable& a, const DistributionTable& b) {
  if (!(a.space() == b.space())) throw Error("statistical distance between different domains");
  Rational total = 0;
  for (Code x = 0; x < a.size(); ++x) total += abs(a[x] - b[x]);
  return total / 2;
}

Rational bias(const DistributionTable& d) {
  if (d.size() != 2) throw Error("bias requires a distribution over {0,1}");
  return abs(d[0] - d[1]);
}

Rational parity_bias(const DistributionTable& d, std::uint32_t bits) {
  int m = d.space().b * d.space().blocks;
  std::uint32_t mask = code_mask(bits, m);
  Rational total = 0;
  for (Code x = 0; x < d.size(); ++x) {
    if (d[x] == 0) continue;
    if (parity(x & mask)) {
      total -= d[x];
    } else {
      total += d[x];
    }
  }
  return abs(total);
}

bool min_entropy_at_least(const DistributionTable& d, const LogReal& q) {
  return le_pow2(d.max_prob(), -q);
}

Rational fourier_coefficient(const DistributionTable& d, std::uint32_t bits) {
  int m = d.space().b * d.space().blocks;
  std::uint32_t mask = code_mask(bits, m);
  Rational total = 0;
  for (Code x = 0; x < d.size(); ++x) {
    if (d[x] == 0) continue;
    if (parity(x & mask)) {
      total -= d[x];
    } else {
      total += d[x];
    }
  }
  return total / Rational(d.size());
}

std::vector<Rational> fourier_transform(const DistributionTable& d) {
  // Fast Walsh-Hadamard transform on code-ordered masses, then reindex.
  int m = d.space().b * d.space().blocks;
  std::vector<Rational> a = d.masses();
  for (std::size_t h = 1; h < a.size(); h <<= 1) {
    for (std::size_t i = 0; i < a.size(); i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        Rational u = a[j];
        a[j] = u + a[j + h];
        a[j + h] = u - a[j + h];
      }
    }
  }
  std::vector<Rational> out(a.size());
  Rational scale(1, a.size());
  for (std::uint32_t s = 0; s < a.size(); ++s) out[s] = a[code_mask(s, m)] * scale;
  return out;
}

std::vector<Rational> fourier_inverse(const std::vector<Rational>& coefficients, int m) {
  if (coefficients.size() != (std::size_t{1} << m)) throw Error("coefficient vector has wrong length");
  std::vector<Rational> mass(coefficients.size());
  for (Code z = 0; z < mass.size(); ++z) {
    Rational total = 0;
    for (std::uint32_t s = 0; s < coefficients.size(); ++s) {
      if (parity(z & code_mask(s, m))) {
        total -= coefficients[s];
      } else {
        total += coefficients[s];
      }
    }
    mass[z] = total;
  }
  return mass;
}

VaziraniReport vazirani_uniformity_check(const DistributionTable& d, const Rational& eps) {
  int m = d.space().b * d.space().blocks;
  if (m < 1) throw Error("Vazirani check needs m >= 1");
  VaziraniReport report;
  report.hypothesis = true;
  Rational worst_scaled = -1;
  for (std::uint32_t s : canonical_subsets(m)) {
    if (s == 0) continue;
    Rational scale = pow(Rational(2 * m), set_size(s));
    Rational b = parity_bias(d, s);
    if (b * scale > eps) report.hypothesis = false;
    if (b * scale > worst_scaled) {
      worst_scaled = b * scale;
      report.worst_set = s;
      report.worst_set_bias = b;
    }
  }
  Rational center(1, d.size());
  report.conclusion = true;
  report.worst_point_deviation = -1;
  for (Code z = 0; z < d.size(); ++z) {
    Rational dev = abs(d[z] - center);
    if (dev > eps * center) report.conclusion = false;
    if (dev > report.worst_point_deviation) {
      report.worst_point_deviation = dev;
      report.worst_point = z;
    }
  }
  return report;
}

VaziraniMinEntropyReport vazirani_minentropy_check(const DistributionTable& d, int t) {
  int m = d.space().b * d.space().blocks;
  if (m < 1) throw Error("Vazirani check needs m >= 1");
  if (t < 1) throw Error("Vazirani check needs t >= 1");
  VaziraniMinEntropyReport report;
  report.hypothesis = true;
  for (std::uint32_t s : canonical_subsets(m)) {
    if (set_size(s) < t) continue;
    if (parity_bias(d, s) * pow(Rational(2 * m), set_size(s)) > 1) {
      report.hypothesis = false;
      break;
    }
  }
  // maxprob <= 2^(-(m - t log m - 1))  <=>  maxprob * 2^(m-1) <= m^t
  report.conclusion = d.max_prob() * pow2(m - 1) <= pow(Rational(m), t);
  return report;
}

void OutcomeDistribution::add(const std::string& label, const Rational& mass) {
  if (mass < 0) throw Error("negative probability mass");
  if (mass == 0) return;
  mass_[label] += mass;
}

Rational OutcomeDistribution::mass(const std::string& label) const {
  auto it = mass_.find(label);
  return it == mass_.end() ? Rational(0) : it->second;
}

Rational OutcomeDistribution::total() const {
  Rational total = 0;
  for (const auto& [label, p] : mass_) total += p;
  return total;
}

void OutcomeDistribution::validate() const {
  Rational t = total();
  if (t != 1) throw Error("outcome masses sum to " + t.get_str() + ", not 1");
}

OutcomeDistribution OutcomeDistribution::scaled(const Rational& factor) const {
  OutcomeDistribution out;
  for (const auto& [label, p] : mass_) out.add(label, p * factor);
  return out;
}

void OutcomeDistribution::merge(const OutcomeDistribution& other) {
  for (const auto& [label, p] : other.mass_) add(label, p);
}

Rational statistical_distance(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  Rational total = 0;
  for (const auto& [label, p] : a.masses()) total += abs(p - b.mass(label));
  for (const auto& [label, p] : b.masses()) {
    if (a.masses().find(label) == a.masses().end()) total += p;
  }
  return total / 2;
}

}  // namespace qclift
