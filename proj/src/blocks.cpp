#include "qclift/blocks.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "qclift/error.hpp"

namespace qclift {

std::vector<int> set_members(CoordSet s) {
  std::vector<int> out;
  for (int i = 0; s != 0; ++i, s >>= 1) {
    if (s & 1U) out.push_back(i);
  }
  return out;
}

CoordSet set_from(const std::vector<int>& members) {
  CoordSet s = 0;
  for (int i : members) s |= CoordSet{1} << i;
  return s;
}

std::string format_set(CoordSet s) {
  std::string out = "{";
  bool first = true;
  for (int i : set_members(s)) {
    if (!first) out += ",";
    out += std::to_string(i);
    first = false;
  }
  return out + "}";
}

bool canonical_less(CoordSet a, CoordSet b) {
  int sa = set_size(a);
  int sb = set_size(b);
  if (sa != sb) return sa < sb;
  return set_members(a) < set_members(b);
}

const std::vector<CoordSet>& canonical_subsets(int k) {
  static std::mutex mutex;
  static std::map<int, std::vector<CoordSet>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  if (k < 0 || k > 20) throw BudgetError("subset enumeration over more than 20 coordinates");
  std::vector<CoordSet> all(std::size_t{1} << k);
  for (CoordSet s = 0; s < all.size(); ++s) all[s] = s;
  std::sort(all.begin(), all.end(), canonical_less);
  return cache.emplace(k, std::move(all)).first->second;
}

std::vector<CoordSet> canonical_subsets_of(CoordSet universe, bool include_empty) {
  std::vector<CoordSet> out;
  for (CoordSet s = universe;; s = (s - 1) & universe) {
    if (s != 0 || include_empty) out.push_back(s);
    if (s == 0) break;
  }
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

Code BlockSpace::project(Code x, CoordSet s) const {
  Code out = 0;
  for (int i = 0; i < blocks; ++i) {
    if (s & (CoordSet{1} << i)) out = (out << b) | block(x, i);
  }
  return out;
}

Code BlockSpace::merge(CoordSet s, Code part_in, Code part_out) const {
  int in_left = set_size(s);
  int out_left = blocks - in_left;
  Code x = 0;
  for (int i = 0; i < blocks; ++i) {
    Code value;
    if (s & (CoordSet{1} << i)) {
      --in_left;
      value = (part_in >> (b * in_left)) & block_mask();
    } else {
      --out_left;
      value = (part_out >> (b * out_left)) & block_mask();
    }
    x = (x << b) | value;
  }
  return x;
}

std::string BlockSpace::bits(Code x) const {
  std::string out;
  for (int i = b * blocks - 1; i >= 0; --i) out += ((x >> i) & 1U) ? '1' : '0';
  return out;
}

std::string BlockSpace::format(Code x) const {
  std::string out;
  for (int i = 0; i < blocks; ++i) {
    if (i > 0) out += '|';
    Code v = block(x, i);
    for (int j = b - 1; j >= 0; --j) out += ((v >> j) & 1U) ? '1' : '0';
  }
  return out;
}

BitVector BitVector::from_string(const std::string& text) {
  BitVector v;
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw ParseError("bitstring contains '" + std::string(1, ch) + "'");
    v.bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return v;
}

BitVector BitVector::from_code(Code code, int length) {
  BitVector v;
  for (int i = length - 1; i >= 0; --i) v.bits.push_back(static_cast<std::uint8_t>((code >> i) & 1U));
  return v;
}

Code BitVector::code() const {
  Code c = 0;
  for (auto bit : bits) c = (c << 1) | bit;
  return c;
}

std::string BitVector::to_string() const {
  std::string out;
  for (auto bit : bits) out += static_cast<char>('0' + bit);
  return out;
}

}  // namespace qclift
