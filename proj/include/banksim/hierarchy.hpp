/*
 * hierarchy.hpp
 *
 * Levels below the L1 banks: the per-tile directory consulted on a miss
 * (index-bit selection and top-bit substitution), L2 tiles whose eight banks
 * form one 8-way set-associative cache, and the flat-latency memory
 * controller.
 */

#pragma once

#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "banksim/common.hpp"
#include "banksim/config.hpp"
#include "banksim/noc.hpp"

namespace banksim {

struct DirectoryTarget {
  bool to_memory = true;
  TileCoord l2_tile;
  Addr substituted = 0;
};

// Pure function of (address, config): selects the responsible L2 tile or the
// memory controller and rewrites the address's top index bits.
inline DirectoryTarget directory_lookup(Addr addr, const DirectoryConfig& cfg) {
  unsigned idx = (addr >> cfg.index_bit_position) & (cfg.entry_count - 1);
  const DirectoryEntry& e = cfg.entries[idx];
  DirectoryTarget t;
  t.to_memory = e.to_memory;
  t.l2_tile = e.l2_tile;
  unsigned bits = cfg.indexBits();
  if (bits == 0) {
    t.substituted = addr;
  } else {
    unsigned shift = kAddressBits - bits;
    Addr low_mask = shift ? ((Addr)1 << shift) - 1 : 0;
    t.substituted = (addr & low_mask) | ((Addr)e.substitute_bits << shift);
  }
  return t;
}

inline DirectoryConfig choose_index_bits(const DirectoryConfig& cfg,
                                         unsigned position) {
  if (position + ilog2(cfg.entry_count) > kAddressBits)
    throw ConfigError(0, "directory index bits exceed address width");
  DirectoryConfig out = cfg;
  out.index_bit_position = position;
  return out;
}

// ---------------------------------------------------------------------------
// L2 tile: 8 banks probed in parallel as one 8-way set-associative cache.
// ---------------------------------------------------------------------------

struct L2Stats {
  uint64_t accesses = 0;
  uint64_t hits = 0;
  uint64_t misses = 0;
  uint64_t writeback_lines = 0;
  uint64_t installs = 0;
};

class L2Cache {
public:
  L2Cache(unsigned sets, unsigned ways, unsigned words_per_line,
          unsigned word_bytes = 4)
      : sets_(sets), ways_(ways), wpl_(words_per_line), wbytes_(word_bytes),
        lines_(sets * ways), age_(sets * ways) {
    // Ages within a set stay a permutation of 0..ways-1.
    for (unsigned s = 0; s < sets_; ++s)
      for (unsigned w = 0; w < ways_; ++w) age_[s * ways_ + w] = w;
  }

  unsigned sets() const { return sets_; }
  unsigned ways() const { return ways_; }
  L2Stats& stats() { return stats_; }
  const L2Stats& stats() const { return stats_; }

  struct Probe {
    bool hit = false;
    unsigned way = 0;
  };

  Probe probe(Addr line_addr) const {
    auto [set, tag] = split(line_addr);
    for (unsigned w = 0; w < ways_; ++w) {
      const Line& l = lines_[set * ways_ + w];
      if (l.valid && l.tag == tag) return {true, w};
    }
    return {false, 0};
  }

  void touch(Addr line_addr, unsigned way) {
    auto [set, tag] = split(line_addr);
    (void)tag;
    unsigned mine = age_[set * ways_ + way];
    for (unsigned w = 0; w < ways_; ++w)
      if (age_[set * ways_ + w] < mine) ++age_[set * ways_ + w];
    age_[set * ways_ + way] = 0;
  }

  struct Victim {
    bool any = false;
    bool dirty = false;
    Addr line_addr = 0;
    std::vector<Word> words;
    unsigned way = 0;
  };

  // Choose the replacement way for a new line: an invalid way if one exists,
  // otherwise the least recently used.
  Victim allocate(Addr line_addr) {
    auto [set, tag] = split(line_addr);
    (void)tag;
    unsigned victim_way = ways_;
    for (unsigned w = 0; w < ways_; ++w)
      if (!lines_[set * ways_ + w].valid) {
        victim_way = w;
        break;
      }
    if (victim_way == ways_) {
      for (unsigned w = 0; w < ways_; ++w)
        if (age_[set * ways_ + w] == ways_ - 1) victim_way = w;
      if (victim_way == ways_) victim_way = 0;  // ages disturbed; any way
    }
    Line& l = lines_[set * ways_ + victim_way];
    Victim v;
    v.way = victim_way;
    if (l.valid) {
      v.any = true;
      v.dirty = l.dirty;
      v.line_addr = join(set, l.tag);
      if (l.dirty) {
        v.words = l.words;
        stats_.writeback_lines++;
      }
    }
    l.valid = false;
    return v;
  }

  void install(Addr line_addr, std::span<const Word> words, bool dirty,
               unsigned way) {
    auto [set, tag] = split(line_addr);
    Line& l = lines_[set * ways_ + way];
    l.valid = true;
    l.dirty = dirty;
    l.tag = tag;
    l.words.assign(words.begin(), words.end());
    l.words.resize(wpl_, 0);
    stats_.installs++;
    touch(line_addr, way);
  }

  std::vector<Word> readLine(Addr line_addr, unsigned way) const {
    auto [set, tag] = split(line_addr);
    (void)tag;
    return lines_[set * ways_ + way].words;
  }

  void writeWord(Addr addr, unsigned way, Word w) {
    auto [set, tag] = split(addr / wpl_bytes());
    (void)tag;
    Line& l = lines_[set * ways_ + way];
    l.words[(addr % wpl_bytes()) / wbytes_] = w;
    l.dirty = true;
  }

  Word readWord(Addr addr, unsigned way) const {
    auto [set, tag] = split(addr / wpl_bytes());
    (void)tag;
    return lines_[set * ways_ + way].words[(addr % wpl_bytes()) / wbytes_];
  }

  void markDirty(Addr line_addr, unsigned way) {
    auto [set, tag] = split(line_addr);
    (void)tag;
    lines_[set * ways_ + way].dirty = true;
  }

  unsigned validCount(Addr line_addr) const {
    auto [set, tag] = split(line_addr);
    (void)tag;
    unsigned n = 0;
    for (unsigned w = 0; w < ways_; ++w)
      if (lines_[set * ways_ + w].valid) ++n;
    return n;
  }

private:
  struct Line {
    Addr tag = 0;
    bool valid = false;
    bool dirty = false;
    std::vector<Word> words;
  };

  unsigned wpl_bytes() const { return wpl_ * wbytes_; }

  std::pair<unsigned, Addr> split(Addr line_addr) const {
    return {(unsigned)(line_addr % sets_), line_addr / sets_};
  }
  Addr join(unsigned set, Addr tag) const { return tag * sets_ + set; }

  unsigned sets_, ways_, wpl_, wbytes_;
  std::vector<Line> lines_;
  std::vector<unsigned> age_;
  L2Stats stats_;
};

// ---------------------------------------------------------------------------
// Memory controller: flat latency, one request accepted per cycle, responses
// emitted exactly `latency` cycles after acceptance. Writebacks are absorbed
// fire-and-forget. Lines with no backing data read as the fill pattern.
// ---------------------------------------------------------------------------

class MemoryController {
public:
  MemoryController(unsigned latency, unsigned line_bytes, unsigned words_per_line)
      : latency_(latency), line_bytes_(line_bytes), wpl_(words_per_line) {}

  void push(PacketMeta req, Cycle arrival) {
    queue_.push_back({std::move(req), arrival});
  }

  // Accept at most one request whose packet fully arrived before this cycle.
  // Returns a response packet due for injection at `now + latency`, if the
  // request wants one.
  struct Emission {
    Cycle due;
    PacketMeta resp;
  };
  void accept(Cycle now) {
    if (queue_.empty() || queue_.front().second >= now) return;
    PacketMeta req = std::move(queue_.front().first);
    queue_.pop_front();
    ++accepted_;

    Addr line_addr = req.addr & ~(Addr)(line_bytes_ - 1);
    if (req.kind == MsgKind::writeback) {
      auto& line = lineFor(line_addr);
      if (req.op == MemOpKind::store_word) {
        line[(req.addr % line_bytes_) / (line_bytes_ / wpl_)] =
            req.words.empty() ? 0 : req.words.back();
      } else {
        // Line writebacks carry a header flit followed by the data words.
        size_t off = req.words.size() >= wpl_ ? req.words.size() - wpl_ : 0;
        for (unsigned i = 0; off + i < req.words.size() && i < wpl_; ++i)
          line[i] = req.words[off + i];
      }
      ++writebacks_;
      return;  // acknowledgment-free
    }

    PacketMeta resp;
    resp.kind = MsgKind::mem_response;
    resp.dst_tile = req.reply_tile;
    resp.dst_port = req.reply_port;
    resp.dst_buffer = req.reply_buffer;
    resp.op = req.op;
    resp.addr = req.addr;
    resp.program = req.program;
    resp.load_seq = req.load_seq;
    const auto& line = lineFor(line_addr);
    if (req.op == MemOpKind::load_word) {
      resp.words = {line[(req.addr % line_bytes_) / 4]};
    } else {
      resp.words = line;
      if (req.req_words && req.req_words < wpl_) {
        unsigned first = (req.addr % line_bytes_) / 4;
        std::vector<Word> part(resp.words.begin() + first,
                               resp.words.begin() +
                                   std::min<size_t>(first + req.req_words,
                                                    resp.words.size()));
        resp.words = std::move(part);
      }
    }
    emissions_.push_back(Emission{now + latency_, std::move(resp)});
  }

  // Responses due at `now` (the engine injects them into the response
  // network; the injection queue itself paces flits at one per cycle).
  std::vector<PacketMeta> due(Cycle now) {
    std::vector<PacketMeta> out;
    while (!emissions_.empty() && emissions_.front().due <= now) {
      out.push_back(std::move(emissions_.front().resp));
      emissions_.pop_front();
    }
    return out;
  }

  bool idle() const { return queue_.empty() && emissions_.empty(); }
  uint64_t acceptedCount() const { return accepted_; }
  uint64_t writebackCount() const { return writebacks_; }

  std::vector<Word>& lineFor(Addr line_addr) {
    auto it = store_.find(line_addr);
    if (it == store_.end())
      it = store_.emplace(line_addr, default_fill(line_addr, wpl_)).first;
    return it->second;
  }

private:
  unsigned latency_, line_bytes_, wpl_;
  std::deque<std::pair<PacketMeta, Cycle>> queue_;
  std::deque<Emission> emissions_;
  std::unordered_map<Addr, std::vector<Word>> store_;
  uint64_t accepted_ = 0, writebacks_ = 0;
};

}  // namespace banksim
