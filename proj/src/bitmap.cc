#include "recplay/bitmap.h"

#include <cstdio>

namespace recplay {

MultilevelBitmap::MultilevelBitmap() { nodes_.emplace_back().fill(0); }

std::uint32_t MultilevelBitmap::allocate() {
  nodes_.emplace_back().fill(0);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

void MultilevelBitmap::insert(Address a) {
  const std::uint32_t r = root_index(a);
  if (nodes_[0][r] == 0) {
    const std::uint32_t id = allocate();
    nodes_[0][r] = id;
    ++mids_;
  }
  const std::uint32_t mid_id = nodes_[0][r];
  const std::uint32_t m = mid_index(a);
  if (nodes_[mid_id][m] == 0) {
    const std::uint32_t id = allocate();  // may reallocate nodes_
    nodes_[mid_id][m] = id;
    ++leaves_;
  }
  const std::uint32_t bit = leaf_bit(a);
  nodes_[nodes_[mid_id][m]][bit / 32] |= 1u << (bit % 32);
}

const MultilevelBitmap::Node* MultilevelBitmap::mid(std::uint32_t r) const {
  const std::uint32_t id = nodes_[0][r];
  return id == 0 ? nullptr : &nodes_[id];
}

const MultilevelBitmap::Node* MultilevelBitmap::leaf(const Node* mid, std::uint32_t m) const {
  if (mid == nullptr) return nullptr;
  const std::uint32_t id = (*mid)[m];
  return id == 0 ? nullptr : &nodes_[id];
}

bool MultilevelBitmap::contains(Address a) const {
  const Node* l = leaf(mid(root_index(a)), mid_index(a));
  if (l == nullptr) return false;
  const std::uint32_t bit = leaf_bit(a);
  return ((*l)[bit / 32] >> (bit % 32)) & 1u;
}

std::size_t MultilevelBitmap::count() const {
  std::size_t n = 0;
  for_each([&](Address) { ++n; });
  return n;
}

void MultilevelBitmap::clear() {
  nodes_.resize(1);
  nodes_[0].fill(0);
  mids_ = leaves_ = 0;
}

std::vector<Address> MultilevelBitmap::addresses() const {
  std::vector<Address> out;
  for_each([&](Address a) { out.push_back(a); });
  return out;
}

std::string MultilevelBitmap::dump() const {
  std::string out;
  char buf[16];
  for_each([&](Address a) {
    std::snprintf(buf, sizeof buf, "0x%08x\n", a);
    out += buf;
  });
  return out;
}

std::optional<Address> intersects(const MultilevelBitmap& x, const MultilevelBitmap& y) {
  using BM = MultilevelBitmap;
  for (std::uint32_t r = 0; r < BM::kFanout; ++r) {
    const BM::Node* xm = x.mid(r);
    const BM::Node* ym = y.mid(r);
    if (xm == nullptr || ym == nullptr) continue;
    for (std::uint32_t m = 0; m < BM::kFanout; ++m) {
      const BM::Node* xl = x.leaf(xm, m);
      const BM::Node* yl = y.leaf(ym, m);
      if (xl == nullptr || yl == nullptr) continue;
      for (std::uint32_t w = 0; w < BM::kWords; ++w) {
        if (std::uint32_t common = (*xl)[w] & (*yl)[w]; common != 0)
          return BM::compose(r, m, w * 32 + static_cast<std::uint32_t>(std::countr_zero(common)));
      }
    }
  }
  return std::nullopt;
}

std::vector<Address> race_test(const MultilevelBitmap& loads_i, const MultilevelBitmap& stores_i,
                               const MultilevelBitmap& loads_j, const MultilevelBitmap& stores_j) {
  using BM = MultilevelBitmap;
  using Node = BM::Node;
  std::vector<Address> out;
  auto word = [](const Node* leaf, std::uint32_t w) -> std::uint32_t { return leaf ? (*leaf)[w] : 0u; };
  for (std::uint32_t r = 0; r < BM::kFanout; ++r) {
    const Node* si = stores_i.mid(r);
    const Node* sj = stores_j.mid(r);
    if (si == nullptr && sj == nullptr) continue;  // no store on either side
    const Node* li = loads_i.mid(r);
    const Node* lj = loads_j.mid(r);
    for (std::uint32_t m = 0; m < BM::kFanout; ++m) {
      const Node* lsi = stores_i.leaf(si, m);
      const Node* lsj = stores_j.leaf(sj, m);
      if (lsi == nullptr && lsj == nullptr) continue;
      const Node* lli = loads_i.leaf(li, m);
      const Node* llj = loads_j.leaf(lj, m);
      const bool left = lsj != nullptr && (lli != nullptr || lsi != nullptr);
      const bool right = lsi != nullptr && (llj != nullptr || lsj != nullptr);
      if (!left && !right) continue;
      for (std::uint32_t w = 0; w < BM::kWords; ++w) {
        const std::uint32_t s_i = word(lsi, w), s_j = word(lsj, w);
        std::uint32_t hit = ((word(lli, w) | s_i) & s_j) | ((word(llj, w) | s_j) & s_i);
        for (; hit != 0; hit &= hit - 1)
          out.push_back(BM::compose(r, m, w * 32 + static_cast<std::uint32_t>(std::countr_zero(hit))));
      }
    }
  }
  return out;
}

}  // namespace recplay
