#pragma once

// Independent brute-force oracles.  Nothing here calls the library's
// algorithms; only its value types are reused.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qclift/dtree.hpp"
#include "qclift/gadget.hpp"

namespace oracle {

using qclift::Code;
using qclift::Rational;

inline int bit_of(Code z, int m, int i) { return (z >> (m - 1 - i)) & 1; }

inline Code block_of(Code x, int n, int b, int i) { return (x >> (b * (n - 1 - i))) & ((1U << b) - 1); }

// max over nonempty A x B of |sum (-1)^g| / 4^b.
inline Rational discrepancy(const qclift::Gadget& g) {
  int side = 1 << g.b();
  long best = 0;
  for (long A = 1; A < (1L << side); ++A) {
    for (long B = 1; B < (1L << side); ++B) {
      long total = 0;
      for (int x = 0; x < side; ++x) {
        if (!(A >> x & 1)) continue;
        for (int y = 0; y < side; ++y) {
          if (B >> y & 1) total += g.eval(x, y) ? -1 : 1;
        }
      }
      best = std::max(best, std::labs(total));
    }
  }
  Rational r(best, static_cast<long>(side) * side);
  r.canonicalize();
  return r;
}

// 2^-m sum_z mu(z) (-1)^(sum_{i in S} z_i), S given by member positions.
inline Rational fourier(const std::vector<Rational>& mu, int m, std::uint32_t S) {
  Rational total = 0;
  for (Code z = 0; z < mu.size(); ++z) {
    int par = 0;
    for (int i = 0; i < m; ++i) {
      if (S >> i & 1) par ^= bit_of(z, m, i);
    }
    total += par ? Rational(-mu[z]) : mu[z];
  }
  return total / Rational(static_cast<long>(mu.size()));
}

// p <= 2^(-q) for rational q >= 0, by p^den * 2^num <= 1.
inline bool le_pow2_neg(const Rational& p, const Rational& q) {
  if (p <= 0) return true;
  unsigned long den = q.get_den().get_ui();
  Rational lhs = 1;
  for (unsigned long k = 0; k < den; ++k) lhs *= p;
  mpz_class num = q.get_num();
  Rational scale = 1;
  for (mpz_class k = 0; k < num; ++k) scale *= 2;
  return lhs * scale <= 1;
}

// Pr[X_I = v] > 2^(-delta b |I|) for some nonempty I and v.
inline bool dense(const std::vector<Rational>& mu, int n, int b, const Rational& delta) {
  for (std::uint32_t I = 1; I < (1U << n); ++I) {
    std::map<std::vector<Code>, Rational> marg;
    for (Code x = 0; x < mu.size(); ++x) {
      std::vector<Code> key;
      for (int i = 0; i < n; ++i) {
        if (I >> i & 1) key.push_back(block_of(x, n, b, i));
      }
      marg[key] += mu[x];
    }
    int size = __builtin_popcount(I);
    for (const auto& [k, p] : marg) {
      if (!le_pow2_neg(p, Rational(delta * b * size))) return false;
    }
  }
  return true;
}

// Exists nonempty I and z with Pr_Y[g^I(x, Y) = z] < 2^(-|I|-1).
inline bool leaking(Code x, const std::vector<Rational>& Y, const qclift::Gadget& g, int n) {
  int b = g.b();
  for (std::uint32_t I = 1; I < (1U << n); ++I) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i) {
      if (I >> i & 1) members.push_back(i);
    }
    std::vector<Rational> p(1U << members.size(), Rational(0));
    for (Code y = 0; y < Y.size(); ++y) {
      Code z = 0;
      for (int i : members) z = (z << 1) | g.eval(block_of(x, n, b, i), block_of(y, n, b, i));
      p[z] += Y[y];
    }
    Rational thr = Rational(1, 1UL << (members.size() + 1));
    for (const auto& v : p) {
      if (v < thr) return true;
    }
  }
  return false;
}

// Minimax query depth over partial assignments ('*', '0', '1').
inline int ddt(const qclift::SearchProblem& s) {
  int n = s.n();
  std::map<std::string, int> memo;
  std::function<int(const std::string&)> go = [&](const std::string& rho) -> int {
    auto it = memo.find(rho);
    if (it != memo.end()) return it->second;
    std::vector<Code> zs;
    for (Code z = 0; z < (1U << n); ++z) {
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        if (rho[i] != '*' && bit_of(z, n, i) != rho[i] - '0') ok = false;
      }
      if (ok) zs.push_back(z);
    }
    for (std::size_t o = 0; o < s.outputs().size(); ++o) {
      bool all = true;
      for (Code z : zs) all = all && s.is_valid(z, s.outputs()[o]);
      if (all) return memo[rho] = 0;
    }
    int best = n + 1;
    for (int i = 0; i < n; ++i) {
      if (rho[i] != '*') continue;
      std::string r0 = rho, r1 = rho;
      r0[i] = '0';
      r1[i] = '1';
      best = std::min(best, 1 + std::max(go(r0), go(r1)));
    }
    return memo[rho] = best;
  };
  return go(std::string(static_cast<std::size_t>(n), '*'));
}

}  // namespace oracle
