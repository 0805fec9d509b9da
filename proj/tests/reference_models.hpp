/*
 * reference_models.hpp
 *
 * Test-only reference implementations used as independent oracles: a plain
 * direct-mapped cache, an 8-way LRU set-associative cache, a FIFO packet
 * cache, and brute-force enumerators for the swept configuration families.
 * These deliberately share no code with the simulator.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <vector>

namespace refmodel {

// Direct-mapped cache over line numbers.
class DirectMapped {
public:
  explicit DirectMapped(unsigned lines) : lines_(lines), slot_(lines, kEmpty) {}

  bool access(uint64_t line_number) {
    unsigned set = line_number % lines_;
    uint64_t tag = line_number / lines_;
    bool hit = slot_[set] == (int64_t)tag;
    slot_[set] = (int64_t)tag;
    return hit;
  }

private:
  static constexpr int64_t kEmpty = -1;
  unsigned lines_;
  std::vector<int64_t> slot_;
};

// Set-associative cache with true-LRU replacement, over line numbers.
class SetAssocLRU {
public:
  SetAssocLRU(unsigned sets, unsigned ways) : sets_(sets), ways_(ways),
                                              lru_(sets) {}

  bool access(uint64_t line_number) {
    unsigned set = line_number % sets_;
    uint64_t tag = line_number / sets_;
    auto& order = lru_[set];  // front = most recent
    auto it = std::find(order.begin(), order.end(), tag);
    bool hit = it != order.end();
    if (hit) order.erase(it);
    order.push_front(tag);
    if (order.size() > ways_) order.pop_back();
    return hit;
  }

private:
  unsigned sets_, ways_;
  std::vector<std::deque<uint64_t>> lru_;
};

// FIFO packet cache capped at a total instruction budget; whole packets are
// inserted and evicted.
class FifoPacketCache {
public:
  explicit FifoPacketCache(unsigned capacity) : capacity_(capacity) {}

  bool fetch(uint32_t pc, unsigned len) {
    for (const auto& p : fifo_)
      if (p.first == pc) return true;
    while (used_ + len > capacity_ && !fifo_.empty()) {
      used_ -= fifo_.front().second;
      fifo_.pop_front();
    }
    if (len <= capacity_) {
      fifo_.emplace_back(pc, len);
      used_ += len;
    }
    return false;
  }

private:
  unsigned capacity_;
  unsigned used_ = 0;
  std::deque<std::pair<uint32_t, unsigned>> fifo_;
};

// ---------------------------------------------------------------------------
// Brute-force configuration enumerators. These enumerate raw (base, size)
// placements in an 8-bank tile and reduce them to canonical shape keys, so
// they exercise a completely different path from the library's enumerations.
// ---------------------------------------------------------------------------

struct Range {
  unsigned base, size;
  bool operator==(const Range&) const = default;
  auto operator<=>(const Range&) const = default;
};

inline std::vector<Range> allRanges(unsigned tile_banks = 8) {
  std::vector<Range> out;
  for (unsigned s = 1; s <= tile_banks; s *= 2)
    for (unsigned b = 0; b + s <= tile_banks; b += s) out.push_back({b, s});
  return out;
}

inline bool disjoint(Range a, Range b) {
  return a.base + a.size <= b.base || b.base + b.size <= a.base;
}

// Single program: unified sizes plus split (inst, data) placements, deduped
// by shape.
inline std::set<std::tuple<bool, unsigned, unsigned>> bruteForceSingle(
    unsigned budget) {
  std::set<std::tuple<bool, unsigned, unsigned>> shapes;
  auto ranges = allRanges();
  for (auto u : ranges)
    if (u.size <= budget) shapes.insert({true, u.size, u.size});
  for (auto i : ranges)
    for (auto d : ranges)
      if (disjoint(i, d) && i.size + d.size <= budget)
        shapes.insert({false, i.size, d.size});
  return shapes;
}

// Two programs: every placement of (A.inst, A.data, B.inst, B.data) where a
// program's two regions may coincide (unified) and same-kind regions of the
// two programs may coincide (shared); everything else must be disjoint and
// at most 8 distinct banks are used.
struct PairShape {
  bool a_unified, b_unified;
  bool shared_unified, shared_inst, shared_data;
  unsigned ai, ad, bi, bd;
  auto operator<=>(const PairShape&) const = default;
};

inline std::set<PairShape> bruteForcePair() {
  std::set<PairShape> shapes;
  auto ranges = allRanges();
  for (auto ai : ranges)
    for (auto ad : ranges)
      for (auto bi : ranges)
        for (auto bd : ranges) {
          bool a_uni = ai == ad;
          bool b_uni = bi == bd;
          bool sh_uni = a_uni && b_uni && ai == bi;
          bool sh_i = ai == bi;
          bool sh_d = ad == bd;
          // Regions must be identical (legal sharing) or disjoint.
          auto ok = [&](Range x, Range y, bool may_share) {
            return (may_share && x == y) || disjoint(x, y);
          };
          if (!ok(ai, ad, a_uni)) continue;
          if (!ok(bi, bd, b_uni)) continue;
          if (!ok(ai, bi, true)) continue;
          if (!ok(ad, bd, true)) continue;
          // Cross-kind sharing is not part of the family.
          if (!a_uni && !b_uni) {
            if (!ok(ai, bd, false)) continue;
            if (!ok(ad, bi, false)) continue;
          } else if (a_uni != b_uni) {
            // A unified region shares only with the other unified region.
            if (a_uni && (ai == bi || ai == bd)) continue;
            if (b_uni && (bi == ai || bi == ad)) continue;
            if (!ok(ai, bi, false) || !ok(ai, bd, false) ||
                !ok(ad, bi, false) || !ok(ad, bd, false))
              continue;
          } else if (a_uni && b_uni && !sh_uni) {
            if (!disjoint(ai, bi)) continue;
          }
          // Bank budget over distinct regions.
          std::set<Range> distinct{ai, ad, bi, bd};
          unsigned used = 0;
          for (auto r : distinct) used += r.size;
          if (used > 8) continue;
          shapes.insert(PairShape{a_uni, b_uni, sh_uni, sh_i && !a_uni,
                                  sh_d && !a_uni, ai.size, ad.size, bi.size,
                                  bd.size});
        }
  return shapes;
}

}  // namespace refmodel
