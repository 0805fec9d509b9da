/*
 * mem.hpp
 *
 * Memory banks: 2kB of storage usable as a direct-mapped cache or a
 * scratchpad, line-interleaved group addressing, whole-line operations and
 * packet-scoped reservation for atomic sequences. Timing is driven by the
 * engine; this module owns state transitions and per-operation bank-busy
 * costs.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "banksim/common.hpp"
#include "banksim/config.hpp"

namespace banksim {

struct BankGeometry {
  unsigned line_bytes = 32;
  unsigned word_bytes = 4;
  unsigned lines_per_bank = 64;

  unsigned wordsPerLine() const { return line_bytes / word_bytes; }
  unsigned bankBytes() const { return line_bytes * lines_per_bank; }

  static BankGeometry of(const SystemConfig& cfg) {
    return BankGeometry{cfg.line_bytes, cfg.word_bytes, cfg.linesPerBank()};
  }
};

struct BankAddress {
  unsigned bank = 0;    // bank index within the tile
  unsigned set = 0;     // line slot within the bank
  unsigned offset = 0;  // byte offset within the line
  uint32_t tag = 0;     // remaining high bits

  bool operator==(const BankAddress&) const = default;
};

// Line-interleaved mapping: consecutive lines visit the group's banks in
// round-robin order.
inline BankAddress map_address(Addr addr, const MemoryGroupConfig& group,
                               const BankGeometry& geom) {
  uint32_t line = addr / geom.line_bytes;
  BankAddress ba;
  ba.offset = addr % geom.line_bytes;
  ba.bank = group.base_bank + line % group.size;
  ba.set = (line / group.size) % geom.lines_per_bank;
  ba.tag = line / group.size / geom.lines_per_bank;
  return ba;
}

inline Addr unmap_address(const BankAddress& ba, const MemoryGroupConfig& group,
                          const BankGeometry& geom) {
  uint32_t line = (ba.tag * geom.lines_per_bank + ba.set) * group.size +
                  (ba.bank - group.base_bank);
  return line * geom.line_bytes + ba.offset;
}

enum class MemOpKind {
  load_word,
  store_word,
  load_line,
  store_line,
  prefetch_line,
  flush_line,
  invalidate_line,
  fetch_line
};

inline bool isLineOp(MemOpKind k) {
  return k != MemOpKind::load_word && k != MemOpKind::store_word;
}

struct MemOp {
  MemOpKind kind = MemOpKind::load_word;
  Addr addr = 0;
  Word value = 0;
  std::vector<Word> payload;  // store_line data
  uint64_t packet_id = 0;     // nonzero while part of an atomic packet
  bool end_of_packet = false;
};

struct BankStats {
  uint64_t accesses = 0;
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t scratchpad_accesses = 0;
  uint64_t installs = 0;
  uint64_t writeback_lines = 0;
  uint64_t writeback_words = 0;
  uint64_t explicit_discards = 0;  // invalidations that dropped dirty data
};

// One memory bank. Storage is mode-agnostic: the same lines serve as cache
// lines (tag checked) or scratchpad rows (set/offset addressed directly).
class MemoryBank {
public:
  explicit MemoryBank(const BankGeometry& geom = BankGeometry{})
      : geom_(geom),
        meta_(geom.lines_per_bank),
        data_(geom.lines_per_bank * geom.wordsPerLine(), 0) {}

  const BankGeometry& geometry() const { return geom_; }
  BankStats& stats() { return stats_; }
  const BankStats& stats() const { return stats_; }

  bool valid(unsigned set) const { return meta_[set].valid; }
  bool dirty(unsigned set) const { return meta_[set].dirty; }
  uint32_t tag(unsigned set) const { return meta_[set].tag; }

  bool present(unsigned set, uint32_t tag) const {
    return meta_[set].valid && meta_[set].tag == tag;
  }

  Word readWord(unsigned set, unsigned word_offset) const {
    return data_[set * geom_.wordsPerLine() + word_offset];
  }
  void writeWord(unsigned set, unsigned word_offset, Word w, bool mark_dirty) {
    data_[set * geom_.wordsPerLine() + word_offset] = w;
    if (mark_dirty) meta_[set].dirty = true;
  }

  std::vector<Word> readLine(unsigned set) const {
    auto b = data_.begin() + set * geom_.wordsPerLine();
    return std::vector<Word>(b, b + geom_.wordsPerLine());
  }

  struct Victim {
    bool any = false;    // a valid line occupied the slot
    bool dirty = false;
    uint32_t tag = 0;
    std::vector<Word> data;
  };

  // Remove whatever occupies `set` to make room for a new line. The caller
  // writes back the victim if dirty.
  Victim evict(unsigned set) {
    Victim v;
    if (meta_[set].valid) {
      v.any = true;
      v.dirty = meta_[set].dirty;
      v.tag = meta_[set].tag;
      if (v.dirty) {
        v.data = readLine(set);
        stats_.writeback_lines++;
        stats_.writeback_words += geom_.wordsPerLine();
      }
    }
    meta_[set] = LineMeta{};
    return v;
  }

  void installLine(unsigned set, uint32_t tag, std::span<const Word> words,
                   bool dirty) {
    meta_[set].valid = true;
    meta_[set].dirty = dirty;
    meta_[set].tag = tag;
    auto dst = data_.begin() + set * geom_.wordsPerLine();
    for (unsigned i = 0; i < geom_.wordsPerLine(); ++i)
      dst[i] = i < words.size() ? words[i] : 0;
    stats_.installs++;
  }

  void invalidate(unsigned set) {
    if (meta_[set].valid && meta_[set].dirty) stats_.explicit_discards++;
    meta_[set] = LineMeta{};
  }

  // Clear dirty state, handing the line data to the caller for writeback.
  std::optional<std::vector<Word>> cleanLine(unsigned set) {
    if (!meta_[set].valid || !meta_[set].dirty) return std::nullopt;
    meta_[set].dirty = false;
    stats_.writeback_lines++;
    stats_.writeback_words += geom_.wordsPerLine();
    return readLine(set);
  }

  unsigned dirtyLineCount() const {
    unsigned n = 0;
    for (const auto& m : meta_)
      if (m.valid && m.dirty) ++n;
    return n;
  }

  // --- packet-scoped reservation -------------------------------------------

  bool reservedByOther(uint64_t packet_id) const {
    return reserved_by_ && *reserved_by_ != packet_id;
  }

  std::optional<uint64_t> reservedBy() const { return reserved_by_; }
  void reserve(uint64_t packet_id) { reserved_by_ = packet_id; }
  void release() { reserved_by_.reset(); }

private:
  struct LineMeta {
    uint32_t tag = 0;
    bool valid = false;
    bool dirty = false;
  };

  BankGeometry geom_;
  std::vector<LineMeta> meta_;
  std::vector<Word> data_;
  std::optional<uint64_t> reserved_by_;
  BankStats stats_;
};

// ---------------------------------------------------------------------------
// Functional (untimed) access: serves one operation, installing missing lines
// from a caller-supplied fill source. Used by reference checks and by trace
// generators to predict behaviour; the engine runs the same transitions with
// real refill timing.
// ---------------------------------------------------------------------------

struct FunctionalResult {
  bool hit = true;
  Word value = 0;
};

// Fill pattern for lines with no backing data: a word's value is its address.
inline std::vector<Word> default_fill(Addr line_addr, unsigned words) {
  std::vector<Word> w(words);
  for (unsigned i = 0; i < words; ++i) w[i] = line_addr + i * 4;
  return w;
}

inline FunctionalResult functional_access(MemoryBank& bank, Addr addr,
                                          const MemoryGroupConfig& group,
                                          MemOpKind kind, Word value = 0) {
  const auto& geom = bank.geometry();
  BankAddress ba = map_address(addr, group, geom);
  Addr line_addr = addr & ~(geom.line_bytes - 1);
  FunctionalResult r;
  bank.stats().accesses++;

  if (group.mode == BankMode::scratchpad) {
    bank.stats().scratchpad_accesses++;
    if (kind == MemOpKind::store_word)
      bank.writeWord(ba.set, ba.offset / geom.word_bytes, value, false);
    else if (kind == MemOpKind::load_word)
      r.value = bank.readWord(ba.set, ba.offset / geom.word_bytes);
    return r;
  }

  bool hit = bank.present(ba.set, ba.tag);
  switch (kind) {
    case MemOpKind::load_word:
    case MemOpKind::store_word:
    case MemOpKind::load_line:
    case MemOpKind::fetch_line:
    case MemOpKind::prefetch_line:
      r.hit = hit;
      hit ? (void)bank.stats().hits++ : (void)bank.stats().misses++;
      if (!hit) {
        bank.evict(ba.set);
        auto fill = default_fill(line_addr, geom.wordsPerLine());
        bank.installLine(ba.set, ba.tag, fill, false);
      }
      if (kind == MemOpKind::load_word)
        r.value = bank.readWord(ba.set, ba.offset / geom.word_bytes);
      if (kind == MemOpKind::store_word)
        bank.writeWord(ba.set, ba.offset / geom.word_bytes, value, true);
      break;
    case MemOpKind::store_line: {
      bank.evict(ba.set);
      std::vector<Word> fill(geom.wordsPerLine(), value);
      bank.installLine(ba.set, ba.tag, fill, true);
      break;
    }
    case MemOpKind::flush_line:
      bank.cleanLine(ba.set);
      break;
    case MemOpKind::invalidate_line:
      if (bank.present(ba.set, ba.tag)) bank.invalidate(ba.set);
      break;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Group flush: write back every dirty line held by the group's banks and
// invalidate the group's contents (the interleaving changes with the group
// shape, so resident tags would be reinterpreted).
//
// Cost: one cycle per flushed word plus one cycle per flushed line. Dirty
// tracking is line-granular, so a dirty line always writes back a full line.
// ---------------------------------------------------------------------------

struct FlushedLine {
  Addr addr = 0;  // line-aligned address reconstructed through the group map
  std::vector<Word> words;
};

struct FlushResult {
  Cycle cycles = 0;
  std::vector<FlushedLine> writebacks;
};

inline FlushResult flush_group(std::span<MemoryBank*> banks,
                               const MemoryGroupConfig& group,
                               const BankGeometry& geom,
                               bool invalidate = true) {
  FlushResult r;
  if (group.mode == BankMode::scratchpad) {
    // Scratchpads hold no dirty cache state; contents are discarded.
    return r;
  }
  for (unsigned b = 0; b < group.size; ++b) {
    MemoryBank& bank = *banks[b];
    for (unsigned set = 0; set < geom.lines_per_bank; ++set) {
      if (bank.valid(set) && bank.dirty(set)) {
        BankAddress ba{group.base_bank + b, set, 0, bank.tag(set)};
        FlushedLine fl;
        fl.addr = unmap_address(ba, group, geom);
        fl.words = *bank.cleanLine(set);
        r.cycles += geom.wordsPerLine() + 1;  // words flushed + line cycle
        r.writebacks.push_back(std::move(fl));
      }
      if (invalidate) bank.invalidate(set);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Atomic packets (module-level semantics): a bank reserved by a packet serves
// only that packet's operations until the end-of-packet marker; everything
// else waits. The engine enforces the same rule with real queueing; this
// helper applies a whole packet functionally and is the reference for
// serializability checks.
// ---------------------------------------------------------------------------

inline std::vector<FunctionalResult> atomic_packet(
    MemoryBank& bank, std::span<const MemOp> ops,
    const MemoryGroupConfig& group) {
  if (ops.empty()) return {};
  uint64_t id = ops.front().packet_id;
  for (const auto& op : ops)
    if (op.packet_id != id)
      throw SimError("operations of an atomic packet must share a packet id");
  if (bank.reservedByOther(id))
    throw SimError("bank is reserved by another packet");
  bank.reserve(id);
  std::vector<FunctionalResult> results;
  for (const auto& op : ops)
    results.push_back(functional_access(bank, op.addr, group, op.kind, op.value));
  if (ops.back().end_of_packet) bank.release();
  return results;
}

}  // namespace banksim
