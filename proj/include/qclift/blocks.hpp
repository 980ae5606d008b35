#pragma once

// Block-structured domains Lambda^k with Lambda = {0,1}^b.
//
// An element of Lambda^k is encoded as an integer whose base-2^b digits are
// the blocks, first block most significant.  Numeric order on codes is
// therefore lexicographic order on the underlying bitstrings.  Coordinates
// are 0-based.  Coordinate sets are bitmasks (bit i <=> coordinate i).

#include <cstdint>
#include <string>
#include <vector>

namespace qclift {

using Code = std::uint32_t;
using CoordSet = std::uint32_t;

inline int set_size(CoordSet s) { return __builtin_popcount(s); }
std::vector<int> set_members(CoordSet s);
CoordSet set_from(const std::vector<int>& members);
std::string format_set(CoordSet s);

/// All subsets of {0..k-1}, ordered by size and then lexicographically on
/// their sorted member lists.  The empty set comes first when included.
const std::vector<CoordSet>& canonical_subsets(int k);
std::vector<CoordSet> canonical_subsets_of(CoordSet universe, bool include_empty);

/// True iff a precedes b in canonical subset order.
bool canonical_less(CoordSet a, CoordSet b);

struct BlockSpace {
  int blocks = 0;
  int b = 1;

  std::uint64_t size() const { return std::uint64_t{1} << (b * blocks); }
  Code block_mask() const { return (Code{1} << b) - 1; }
  CoordSet all() const { return blocks == 0 ? 0 : ((CoordSet{1} << blocks) - 1); }

  Code block(Code x, int i) const { return (x >> (b * (blocks - 1 - i))) & block_mask(); }
  Code with_block(Code x, int i, Code value) const {
    int shift = b * (blocks - 1 - i);
    return (x & ~(block_mask() << shift)) | (value << shift);
  }
  /// Restriction of x to the coordinates in s, as an element of Lambda^|s|.
  Code project(Code x, CoordSet s) const;
  /// Inverse of a split: places part_in on s and part_out on the complement.
  Code merge(CoordSet s, Code part_in, Code part_out) const;
  BlockSpace sub(CoordSet s) const { return BlockSpace{set_size(s), b}; }

  /// "01|10" style rendering; blocks separated by '|'.
  std::string format(Code x) const;
  std::string bits(Code x) const;
  bool operator==(const BlockSpace&) const = default;
};

/// A fixed-length bit sequence; the {0,1}^m special case of Lambda^m with b=1.
struct BitVector {
  std::vector<std::uint8_t> bits;

  static BitVector from_string(const std::string& text);
  static BitVector from_code(Code code, int length);
  int size() const { return static_cast<int>(bits.size()); }
  Code code() const;
  std::string to_string() const;
  bool operator==(const BitVector&) const = default;
};

}  // namespace qclift
