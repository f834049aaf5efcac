// Three-level address set (9/9/14 split of a 32-bit address).
//
// The root directory is indexed by address bits 31..23, each second-level
// page table by bits 22..14, and each leaf bitmap by bits 13..0. Directory
// entries hold 32-bit node indices, so every node (root, page table, leaf)
// is exactly 2 KiB of payload. Nodes live in a per-bitmap pool and are only
// allocated on first use; an absent subtree means nothing below it was
// ever inserted.
#ifndef RECPLAY_BITMAP_H_
#define RECPLAY_BITMAP_H_

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recplay/model.h"

namespace recplay {

class MultilevelBitmap {
 public:
  static constexpr unsigned kRootBits = 9;
  static constexpr unsigned kMidBits = 9;
  static constexpr unsigned kLeafBits = 14;
  static constexpr std::size_t kFanout = std::size_t{1} << kRootBits;  // 512
  static constexpr std::size_t kLeafSize = std::size_t{1} << kLeafBits;  // 16384 bits
  static constexpr std::size_t kNodeBytes = 2048;

  static constexpr std::uint32_t root_index(Address a) { return a >> (kMidBits + kLeafBits); }
  static constexpr std::uint32_t mid_index(Address a) { return (a >> kLeafBits) & (kFanout - 1); }
  static constexpr std::uint32_t leaf_bit(Address a) { return a & (kLeafSize - 1); }
  static constexpr Address compose(std::uint32_t root, std::uint32_t mid, std::uint32_t bit) {
    return (root << (kMidBits + kLeafBits)) | (mid << kLeafBits) | bit;
  }

  MultilevelBitmap();

  void insert(Address a);
  bool contains(Address a) const;
  bool empty() const { return leaves_ == 0; }
  std::size_t count() const;
  // Drops every page table and leaf; the root stays allocated.
  void clear();

  std::size_t mid_table_count() const { return mids_; }
  std::size_t leaf_count() const { return leaves_; }
  std::size_t node_count() const { return 1 + mids_ + leaves_; }
  std::size_t payload_bytes() const { return node_count() * kNodeBytes; }

  std::vector<Address> addresses() const;  // ascending
  // Sorted hex addresses, one per line.
  std::string dump() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    const Node& root = nodes_[0];
    for (std::uint32_t r = 0; r < kFanout; ++r) {
      if (root[r] == 0) continue;
      const Node& mid = nodes_[root[r]];
      for (std::uint32_t m = 0; m < kFanout; ++m) {
        if (mid[m] == 0) continue;
        const Node& leaf = nodes_[mid[m]];
        for (std::uint32_t w = 0; w < kWords; ++w) {
          for (std::uint32_t bits = leaf[w]; bits != 0; bits &= bits - 1)
            fn(compose(r, m, w * 32 + static_cast<std::uint32_t>(std::countr_zero(bits))));
        }
      }
    }
  }

 private:
  static constexpr std::size_t kWords = kLeafSize / 32;  // 512
  using Node = std::array<std::uint32_t, kFanout>;
  static_assert(sizeof(Node) == kNodeBytes);
  static_assert(kWords == kFanout);

  // Null when the subtree is absent.
  const Node* mid(std::uint32_t r) const;
  const Node* leaf(const Node* mid, std::uint32_t m) const;

  std::uint32_t allocate();

  std::vector<Node> nodes_;  // nodes_[0] is the root
  std::size_t mids_ = 0;
  std::size_t leaves_ = 0;

  friend std::optional<Address> intersects(const MultilevelBitmap&, const MultilevelBitmap&);
  friend std::vector<Address> race_test(const MultilevelBitmap&, const MultilevelBitmap&,
                                        const MultilevelBitmap&, const MultilevelBitmap&);
};

// Smallest address present in both sets.
std::optional<Address> intersects(const MultilevelBitmap& x, const MultilevelBitmap& y);

// ((Li ∪ Si) ∩ Sj) ∪ ((Lj ∪ Sj) ∩ Si), ascending. Empty means the two
// segments cannot race.
std::vector<Address> race_test(const MultilevelBitmap& loads_i, const MultilevelBitmap& stores_i,
                               const MultilevelBitmap& loads_j, const MultilevelBitmap& stores_j);

}  // namespace recplay

#endif  // RECPLAY_BITMAP_H_
