#include "qclift/structure.hpp"

#include <algorithm>
#include <cmath>

#include "qclift/error.hpp"

namespace qclift {

Restriction Restriction::parse(const std::string& cells) {
  for (char ch : cells) {
    if (ch != '0' && ch != '1' && ch != '*') throw ParseError("restriction contains '" + std::string(1, ch) + "'");
  }
  Restriction r;
  r.cells_ = cells;
  return r;
}

CoordSet Restriction::free() const {
  CoordSet s = 0;
  for (int i = 0; i < n(); ++i) {
    if (cells_[i] == '*') s |= CoordSet{1} << i;
  }
  return s;
}

CoordSet Restriction::fixed() const { return free() ^ ((n() == 0) ? 0 : ((CoordSet{1} << n()) - 1)); }

void Restriction::fix(int i, int bit) { cells_.at(static_cast<std::size_t>(i)) = bit ? '1' : '0'; }

std::uint32_t Restriction::fixed_bits() const {
  std::uint32_t out = 0;
  for (char ch : cells_) {
    if (ch != '*') out = (out << 1) | static_cast<std::uint32_t>(ch - '0');
  }
  return out;
}

bool Restriction::consistent(const BitVector& z) const {
  if (z.size() != n()) return false;
  for (int i = 0; i < n(); ++i) {
    if (cells_[i] != '*' && z.bits[i] != cells_[i] - '0') return false;
  }
  return true;
}

void check_scan_budget(const BlockSpace& space, const ScanBudget& budget) {
  if (space.blocks > budget.max_coords || space.b > budget.max_b) {
    throw BudgetError("exhaustive scan over " + std::to_string(space.blocks) + " coordinates with b=" +
                      std::to_string(space.b) + " exceeds the limit of " + std::to_string(budget.max_coords) +
                      " coordinates and b=" + std::to_string(budget.max_b));
  }
}

namespace {

// Exponent e such that the density threshold for I is 2^-e: e = delta * b * |I|.
LogReal density_bits(const LogReal& delta, int b, int size) { return delta * Rational(b * size); }

}  // namespace

DensityWitness is_dense(const DistributionTable& X, const LogReal& delta) {
  const BlockSpace& s = X.space();
  DensityWitness w;
  for (CoordSet I : canonical_subsets(s.blocks)) {
    if (I == 0) continue;
    DistributionTable marginal = project(X, I);
    Rational mp = marginal.max_prob();
    if (compare_prob_to_threshold(mp, DyadicThreshold{density_bits(delta, s.b, set_size(I))}) ==
        std::strong_ordering::greater) {
      w.dense = false;
      w.violating_set = I;
      w.value = marginal.argmax();
      w.mass = mp;
      return w;
    }
  }
  return w;
}

DensityBracket max_density(const DistributionTable& X, long resolution_bits) {
  const BlockSpace& s = X.space();
  DensityBracket r;
  if (s.blocks == 0) {
    r.vacuous = true;
    r.exact = LogReal(1);
    r.lower = r.upper = 1;
    return r;
  }
  bool first = true;
  for (CoordSet I : canonical_subsets(s.blocks)) {
    if (I == 0) continue;
    LogReal value = -LogReal::log2_of(project(X, I).max_prob()) / Rational(s.b * set_size(I));
    if (first || value < r.exact) r.exact = value;
    first = false;
  }
  if (r.exact.is_rational() && Rational(r.exact.constant() * pow2(resolution_bits)).get_den() == 1) {
    r.lower = r.upper = r.exact.constant();
    return r;
  }
  Rational step = pow2(-resolution_bits);
  double scaled = std::floor(r.exact.approx() * std::ldexp(1.0, static_cast<int>(resolution_bits)));
  r.lower = Rational(static_cast<long>(scaled)) * step;
  while (LogReal(r.lower) > r.exact) r.lower -= step;
  while (LogReal(r.lower + step) <= r.exact) r.lower += step;
  r.upper = r.lower + step;
  return r;
}

namespace {

bool fixed_consistent(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                      const Gadget& g) {
  CoordSet fix = rho.fixed();
  std::uint32_t want = rho.fixed_bits();
  auto xs = X.support();
  auto ys = Y.support();
  for (Code x : xs) {
    for (Code y : ys) {
      if (outputs_on(g, X.space(), x, y, fix) != want) return false;
    }
  }
  return true;
}

}  // namespace

StructureCheck is_structured(const DistributionTable& X, const DistributionTable& Y, const Restriction& rho,
                             const LogReal& tau, const Gadget& g) {
  if (!(X.space() == Y.space()) || X.space().blocks != rho.n() || X.space().b != g.b()) {
    throw Error("structure check dimension mismatch");
  }
  StructureCheck out;
  if (!fixed_consistent(X, Y, rho, g)) {
    out.refusal = "fixed-block consistency";
    return out;
  }
  CoordSet free = rho.free();
  DensityBracket bx = max_density(project(X, free));
  DensityBracket by = max_density(project(Y, free));
  LogReal dx = bx.exact;
  LogReal dy = by.exact;
  if (bx.vacuous) {
    LogReal half = tau / Rational(2);
    dx = dy = half.sign() > 0 ? half : LogReal(1);
  }
  if (dx.sign() <= 0 || dy.sign() <= 0) {
    out.refusal = "zero density";
    return out;
  }
  if (dx + dy < tau) {
    out.refusal = "density sum";
    return out;
  }
  out.certificate = StructureCertificate{rho, dx, dy, tau};
  return out;
}

bool verify_certificate(const DistributionTable& X, const DistributionTable& Y, const StructureCertificate& cert,
                        const Gadget& g) {
  if (!fixed_consistent(X, Y, cert.rho, g)) return false;
  if (cert.delta_x.sign() <= 0 || cert.delta_y.sign() <= 0) return false;
  if (cert.delta_x + cert.delta_y < cert.tau) return false;
  CoordSet free = cert.rho.free();
  return is_dense(project(X, free), cert.delta_x).dense && is_dense(project(Y, free), cert.delta_y).dense;
}

DensityFix density_restoring_fix(const DistributionTable& X, const LogReal& delta) {
  const BlockSpace& s = X.space();
  CoordSet best = 0;
  Code best_value = 0;
  Rational best_mass = 1;
  // Canonical order visits larger sets later; keep the first of each size.
  for (CoordSet I : canonical_subsets(s.blocks)) {
    if (I == 0 || set_size(I) <= set_size(best)) continue;
    DistributionTable marginal = project(X, I);
    Rational mp = marginal.max_prob();
    if (compare_prob_to_threshold(mp, DyadicThreshold{density_bits(delta, s.b, set_size(I))}) ==
        std::strong_ordering::greater) {
      best = I;
      best_value = marginal.argmax();
      best_mass = mp;
    }
  }
  DistributionTable conditioned =
      best == 0 ? X : condition(X, [&](Code x) { return s.project(x, best) == best_value; });
  CoordSet rest = s.all() & ~best;
  DistributionTable remainder = project(conditioned, rest);
  if (!is_dense(remainder, delta).dense) {
    throw InvariantError("density-restoring fix left a non-dense remainder");
  }
  return DensityFix{best, best_value, best_mass, std::move(conditioned), std::move(remainder)};
}

DensityPartition density_restoring_partition(const DistributionTable& X, const LogReal& delta) {
  const BlockSpace& s = X.space();
  DensityPartition out;
  std::vector<bool> remaining(X.size(), false);
  Rational left = 0;
  for (Code x = 0; x < X.size(); ++x) {
    if (X[x] > 0) {
      remaining[x] = true;
      left += X[x];
    }
  }
  while (left > 0) {
    DistributionTable residual = condition(X, [&](Code x) { return remaining[x]; });
    DensityFix fix = density_restoring_fix(residual, delta);
    DensityPart part;
    part.I = fix.I;
    part.x_I = fix.x_I;
    part.p_geq = left;
    part.p_part = 0;
    for (Code x = 0; x < X.size(); ++x) {
      if (remaining[x] && s.project(x, fix.I) == fix.x_I) {
        part.members.push_back(x);
        part.p_part += X[x];
        remaining[x] = false;
      }
    }
    left -= part.p_part;
    out.parts.push_back(std::move(part));
  }
  PartitionCheck check = check_partition(X, delta, out);
  if (!check.ok()) throw InvariantError("density-restoring partition guarantee failed: " + check.detail);
  return out;
}

PartitionCheck check_partition(const DistributionTable& X, const LogReal& delta, const DensityPartition& p) {
  const BlockSpace& s = X.space();
  PartitionCheck r;
  std::vector<int> owner(X.size(), -1);
  Rational maxprob_x = X.max_prob();
  Rational prev_geq = 2;
  Rational tail = 1;
  for (std::size_t j = 0; j < p.parts.size(); ++j) {
    const DensityPart& part = p.parts[j];
    if (j == 0 && part.p_geq != 1) {
      r.p_geq_decreasing = false;
      r.detail = "p_geq of the first part is not 1";
    }
    if (!(part.p_geq < prev_geq)) {
      r.p_geq_decreasing = false;
      r.detail = "p_geq not strictly decreasing at part " + std::to_string(j);
    }
    if (part.p_geq != tail) {
      r.p_geq_decreasing = false;
      r.detail = "p_geq does not match the remaining mass at part " + std::to_string(j);
    }
    prev_geq = part.p_geq;
    Rational mass = 0;
    for (Code x : part.members) {
      if (x >= X.size() || X[x] == 0 || owner[x] != -1) {
        r.covers_support = false;
        r.detail = "part " + std::to_string(j) + " overlaps or leaves the support";
        continue;
      }
      owner[x] = static_cast<int>(j);
      mass += X[x];
      if (s.project(x, part.I) != part.x_I) {
        r.fixed_block = false;
        r.detail = "part " + std::to_string(j) + " does not fix its block";
      }
    }
    tail -= mass;
    if (mass == 0) {
      r.covers_support = false;
      r.detail = "part " + std::to_string(j) + " is empty";
      continue;
    }
    std::vector<bool> in(X.size(), false);
    for (Code x : part.members) in[x] = true;
    DistributionTable cond = condition(X, [&](Code x) { return in[x]; });
    DistributionTable rest = project(cond, s.all() & ~part.I);
    if (!is_dense(rest, delta).dense) {
      r.dense_remainder = false;
      r.detail = "part " + std::to_string(j) + " remainder not dense";
    }
    // H(X_rest | part) >= H(X) - delta b |I_j| - log(1/p_geq)
    //   <=>  maxprob(X_rest | part) * p_geq <= maxprob(X) * 2^(delta b |I_j|)
    if (!le_pow2(rest.max_prob() * part.p_geq / maxprob_x, density_bits(delta, s.b, set_size(part.I)))) {
      r.entropy_bound = false;
      r.detail = "part " + std::to_string(j) + " violates the entropy bound";
    }
  }
  for (Code x = 0; x < X.size(); ++x) {
    if (X[x] > 0 && owner[x] == -1) {
      r.covers_support = false;
      r.detail = "support element " + std::to_string(x) + " not covered";
    }
  }
  return r;
}

std::vector<Rational> output_distribution(const Gadget& g, Code x, const DistributionTable& Y, CoordSet I) {
  std::vector<Rational> out(std::size_t{1} << set_size(I));
  for (Code y = 0; y < Y.size(); ++y) {
    if (Y[y] > 0) out[outputs_on(g, Y.space(), x, y, I)] += Y[y];
  }
  return out;
}

std::optional<LeakWitness> is_leaking(Code x, const DistributionTable& Y, const Gadget& g) {
  const BlockSpace& s = Y.space();
  for (CoordSet I : canonical_subsets(s.blocks)) {
    if (I == 0) continue;
    auto dist = output_distribution(g, x, Y, I);
    Rational threshold = pow2(-set_size(I) - 1);
    for (std::uint32_t z = 0; z < dist.size(); ++z) {
      if (dist[z] < threshold) return LeakWitness{I, z, dist[z]};
    }
  }
  return std::nullopt;
}

std::optional<SparsifyWitness> is_sparsifying(Code x, const DistributionTable& Y, const Gadget& g,
                                              const DangerParams& p) {
  const BlockSpace& s = Y.space();
  LogReal level = p.delta_y - p.eps;
  for (CoordSet I : canonical_subsets(s.blocks)) {
    CoordSet rest = s.all() & ~I;
    if (rest == 0) continue;
    auto dist = output_distribution(g, x, Y, I);
    for (std::uint32_t z = 0; z < dist.size(); ++z) {
      if (dist[z] == 0) continue;
      DistributionTable cond = condition(Y, [&](Code y) { return outputs_on(g, s, x, y, I) == z; });
      DistributionTable marginal = project(cond, rest);
      DensityWitness w = is_dense(marginal, level);
      if (!w.dense) {
        // Translate J from the (F - I)-local coordinates back to F.
        auto rest_members = set_members(rest);
        CoordSet J = 0;
        for (int local : set_members(w.violating_set)) J |= CoordSet{1} << rest_members[local];
        return SparsifyWitness{I, z, J, w.value, w.mass};
      }
    }
  }
  return std::nullopt;
}

namespace {

// Joint masses Pr[Y_J = y_J and g^I(x_I, Y_I) = z], indexed [y_J][z].
std::vector<std::vector<Rational>> joint_outputs(const Gadget& g, Code x, const DistributionTable& Y, CoordSet I,
                                                 CoordSet J) {
  const BlockSpace& s = Y.space();
  std::vector<std::vector<Rational>> joint(std::size_t{1} << (s.b * set_size(J)),
                                           std::vector<Rational>(std::size_t{1} << set_size(I)));
  for (Code y = 0; y < Y.size(); ++y) {
    if (Y[y] > 0) joint[s.project(y, J)][outputs_on(g, s, x, y, I)] += Y[y];
  }
  return joint;
}

// Signed parity sums sum_{y : y_J} Y(y) (-1)^{g^{xor S}(x_S, y_S)}, and Pr[Y_J = y_J].
void parity_sums(const Gadget& g, Code x, const DistributionTable& Y, CoordSet S, CoordSet J,
                 std::vector<Rational>& signed_sum, std::vector<Rational>& marginal) {
  const BlockSpace& s = Y.space();
  signed_sum.assign(std::size_t{1} << (s.b * set_size(J)), Rational(0));
  marginal.assign(signed_sum.size(), Rational(0));
  for (Code y = 0; y < Y.size(); ++y) {
    if (Y[y] == 0) continue;
    Code yj = s.project(y, J);
    marginal[yj] += Y[y];
    if (parity_on(g, s, x, y, S)) {
      signed_sum[yj] -= Y[y];
    } else {
      signed_sum[yj] += Y[y];
    }
  }
}

// maxprob(g^I | Y_J = y_J) * Pr[Y_J = y_J] > 2^(-|I| + eps b |J| - 1 - delta b |J|)
bool skew_inequality(const Rational& joint_max, int size_i, int size_j, int b, const DangerParams& p) {
  LogReal bits = LogReal(Rational(size_i + 1)) + (p.delta_y - p.eps) * Rational(b * size_j);
  return compare_prob_to_threshold(joint_max, DyadicThreshold{bits}) == std::strong_ordering::greater;
}

// n^|S| * Pr[Y_J = y_J] * 2^(delta b |J|) >= n^(c eps |J|) * 4, in log form.
bool size_bound(int size_s, int size_j, const Rational& y_prob, int b, const DangerParams& p,
                const Rational& c_eps, int n) {
  LogReal lhs = LogReal::log2_of(Rational(n)) * (Rational(size_s) - c_eps * size_j) + LogReal::log2_of(y_prob) +
                p.delta_y * Rational(b * size_j) - LogReal(2);
  return lhs.sign() >= 0;
}

Rational bias_threshold(int size_s, int n) { return pow(Rational(1, 2 * n), size_s) / 2; }

}  // namespace

std::optional<SkewWitness> is_skewing(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p) {
  const BlockSpace& s = Y.space();
  for (CoordSet I : canonical_subsets(s.blocks)) {
    if (I == 0) continue;
    for (CoordSet J : canonical_subsets_of(s.all() & ~I, false)) {
      auto joint = joint_outputs(g, x, Y, I, J);
      for (Code yj = 0; yj < joint.size(); ++yj) {
        Rational y_prob = 0;
        std::uint32_t arg = 0;
        for (std::uint32_t z = 0; z < joint[yj].size(); ++z) {
          y_prob += joint[yj][z];
          if (joint[yj][z] > joint[yj][arg]) arg = z;
        }
        if (y_prob == 0) continue;
        if (skew_inequality(joint[yj][arg], set_size(I), set_size(J), s.b, p)) {
          return SkewWitness{I, J, yj, arg, joint[yj][arg] / y_prob, y_prob};
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<BiasWitness> is_biasing(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p,
                                      const Rational& c, int n) {
  if (n < 2) throw Error("biasing classification needs n >= 2");
  if (!p.eps.is_rational()) throw Error("biasing classification needs a rational eps");
  const BlockSpace& s = Y.space();
  Rational c_eps = c * p.eps.constant();
  std::vector<Rational> signed_sum;
  std::vector<Rational> marginal;
  for (CoordSet S : canonical_subsets(s.blocks)) {
    if (S == 0) continue;
    Rational threshold = bias_threshold(set_size(S), n);
    for (CoordSet J : canonical_subsets_of(s.all() & ~S, true)) {
      parity_sums(g, x, Y, S, J, signed_sum, marginal);
      for (Code yj = 0; yj < marginal.size(); ++yj) {
        if (marginal[yj] == 0) continue;
        if (!size_bound(set_size(S), set_size(J), marginal[yj], s.b, p, c_eps, n)) continue;
        Rational b = abs(signed_sum[yj]) / marginal[yj];
        if (b > threshold) return BiasWitness{S, J, yj, b, marginal[yj]};
      }
    }
  }
  return std::nullopt;
}

bool is_dangerous(Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p) {
  return is_leaking(x, Y, g).has_value() || is_sparsifying(x, Y, g, p).has_value();
}

Rational dangerous_probability(const DistributionTable& X, const DistributionTable& Y, const Gadget& g,
                               const DangerParams& p) {
  if (!(X.space() == Y.space())) throw Error("X and Y must share a domain");
  Rational total = 0;
  for (Code x = 0; x < X.size(); ++x) {
    if (X[x] > 0 && is_dangerous(x, Y, g, p)) total += X[x];
  }
  return total;
}

bool recheck(const LeakWitness& w, Code x, const DistributionTable& Y, const Gadget& g) {
  Rational prob = Y.probability([&](Code y) { return outputs_on(g, Y.space(), x, y, w.I) == w.z; });
  return w.I != 0 && prob == w.prob && prob < pow2(-set_size(w.I) - 1);
}

bool recheck(const SparsifyWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p) {
  const BlockSpace& s = Y.space();
  if (w.J == 0 || (w.I & w.J) != 0) return false;
  auto event = [&](Code y) { return outputs_on(g, s, x, y, w.I) == w.z; };
  Rational pe = Y.probability(event);
  if (pe == 0) return false;
  Rational both = Y.probability([&](Code y) { return event(y) && s.project(y, w.J) == w.y_J; });
  Rational cond = both / pe;
  LogReal bits = (p.delta_y - p.eps) * Rational(s.b * set_size(w.J));
  return cond == w.cond_prob &&
         compare_prob_to_threshold(cond, DyadicThreshold{bits}) == std::strong_ordering::greater;
}

bool recheck(const SkewWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p) {
  const BlockSpace& s = Y.space();
  if (w.I == 0 || w.J == 0 || (w.I & w.J) != 0) return false;
  Rational y_prob = Y.probability([&](Code y) { return s.project(y, w.J) == w.y_J; });
  Rational joint = Y.probability(
      [&](Code y) { return s.project(y, w.J) == w.y_J && outputs_on(g, s, x, y, w.I) == w.z; });
  return y_prob == w.y_prob && y_prob > 0 && joint / y_prob == w.cond_maxprob &&
         skew_inequality(joint, set_size(w.I), set_size(w.J), s.b, p);
}

bool recheck(const BiasWitness& w, Code x, const DistributionTable& Y, const Gadget& g, const DangerParams& p,
             const Rational& c, int n) {
  const BlockSpace& s = Y.space();
  if (w.S == 0 || (w.S & w.J) != 0) return false;
  Rational y_prob = 0;
  Rational sum = 0;
  for (Code y = 0; y < Y.size(); ++y) {
    if (Y[y] == 0 || s.project(y, w.J) != w.y_J) continue;
    y_prob += Y[y];
    sum += parity_on(g, s, x, y, w.S) ? -Y[y] : Y[y];
  }
  if (y_prob == 0 || y_prob != w.y_prob) return false;
  Rational b = abs(sum) / y_prob;
  return b == w.bias && b > bias_threshold(set_size(w.S), n) &&
         size_bound(set_size(w.S), set_size(w.J), y_prob, s.b, p, c * p.eps.constant(), n);
}

}  // namespace qclift
