/*
 * workload.hpp
 *
 * Trace event model, trace file parsing/serialization, the per-core L0
 * packet cache, and the synthetic workload generators (loop nests, pointer
 * chases, streaming, and pipeline stages) that stand in for compiled
 * benchmarks.
 */

#pragma once

#include <deque>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "banksim/common.hpp"
#include "banksim/config.hpp"
#include "banksim/mem.hpp"

namespace banksim {

enum class EventKind {
  fetch,
  load,
  store,
  use,
  lineop,
  compute,
  reconfig,
  send,
  recv,
  atomic_begin,
  atomic_end
};

struct TraceEvent {
  EventKind kind = EventKind::compute;
  Addr addr = 0;        // fetch pc, memory address
  Word value = 0;       // store data, send payload
  unsigned length = 0;  // fetch: packet length in instructions
  unsigned cycles = 0;  // compute: cycle count
  MemOpKind op = MemOpKind::load_word;  // lineop kind
  unsigned channel = kCmtDataSlot;      // memory/send channel (CMT slot)
  unsigned buffer = kDefaultDataBuffer; // recv input buffer
  unsigned slot = 0;                    // reconfig slot
  ChannelMapEntry entry;                // reconfig target
  uint64_t atomic_id = 0;

  // Instruction-count weight within a packet. Fetches and atomic-begin are
  // markers; COMPUTE(n) stands for n independent single-cycle instructions.
  unsigned weight() const {
    switch (kind) {
      case EventKind::fetch:
      case EventKind::atomic_begin:
        return 0;
      case EventKind::compute:
        return cycles;
      default:
        return 1;
    }
  }
};

struct Trace {
  std::vector<TraceEvent> events;
};

// ---------------------------------------------------------------------------
// Level-0 packet cache: FIFO of whole instruction packets, capped at a total
// instruction budget.
// ---------------------------------------------------------------------------

class L0Cache {
public:
  explicit L0Cache(unsigned capacity = 64) : capacity_(capacity) {}

  bool contains(Addr pc) const {
    for (const auto& p : fifo_)
      if (p.pc == pc) return true;
    return false;
  }

  // Insert a packet, evicting oldest packets until it fits. Oversized
  // packets bypass the cache entirely.
  void insert(Addr pc, unsigned len) {
    if (len > capacity_) return;
    while (used_ + len > capacity_ && !fifo_.empty()) {
      used_ -= fifo_.front().len;
      fifo_.pop_front();
    }
    fifo_.push_back({pc, len});
    used_ += len;
  }

  unsigned used() const { return used_; }

private:
  struct Entry {
    Addr pc;
    unsigned len;
  };
  unsigned capacity_;
  unsigned used_ = 0;
  std::deque<Entry> fifo_;
};

// ---------------------------------------------------------------------------
// Trace text format (one event per line, '#' comments):
//   F <pc> <len>
//   L <addr> [ch]
//   S <addr> <word> [ch]
//   U
//   X <fetch|flush|inv|prefetch|storeline> <addr> [ch]
//   C <n>
//   R <slot> <entry-spec>
//   SND <ch> <word>
//   RCV <buf>
//   AB <id>
//   AE <id>
// ---------------------------------------------------------------------------

namespace detail {

inline uint64_t parseTraceNum(const std::string& tok, unsigned line) {
  try {
    size_t pos = 0;
    uint64_t v;
    if (tok.size() > 2 && tok[0] == '0' && (tok[1] == 'x' || tok[1] == 'X'))
      v = std::stoull(tok.substr(2), &pos, 16), pos += 2;
    else
      v = std::stoull(tok, &pos, 10);
    if (pos != tok.size()) throw ConfigError(line, "bad number '" + tok + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError(line, "bad number '" + tok + "'");
  }
}

inline std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace detail

// Structural validation: USE/LOAD balance, packet lengths, atomic nesting.
inline void validate_trace(const Trace& trace) {
  long outstanding = 0;
  uint64_t open_atomic = 0;
  for (size_t i = 0; i < trace.events.size(); ++i) {
    const auto& e = trace.events[i];
    unsigned line = (unsigned)i + 1;
    switch (e.kind) {
      case EventKind::fetch:
        if (e.length == 0 || e.length > 64)
          throw ConfigError(line, "packet length must be 1..64 instructions");
        break;
      case EventKind::load:
        ++outstanding;
        break;
      case EventKind::use:
        if (outstanding == 0)
          throw ConfigError(line, "USE without an outstanding load");
        --outstanding;
        break;
      case EventKind::atomic_begin:
        if (open_atomic)
          throw ConfigError(line, "atomic regions do not nest");
        if (e.atomic_id == 0)
          throw ConfigError(line, "atomic id must be nonzero");
        open_atomic = e.atomic_id;
        break;
      case EventKind::atomic_end:
        if (open_atomic != e.atomic_id)
          throw ConfigError(line, "AE does not match the open atomic region");
        open_atomic = 0;
        break;
      default:
        break;
    }
    if ((e.kind == EventKind::load || e.kind == EventKind::store ||
         e.kind == EventKind::lineop || e.kind == EventKind::send) &&
        e.channel >= kCmtSlots)
      throw ConfigError(line, "channel index out of range");
    if (e.kind == EventKind::recv && e.buffer >= kCoreInputBuffers)
      throw ConfigError(line, "input buffer index out of range");
  }
  if (outstanding != 0)
    throw ConfigError((unsigned)trace.events.size(),
                      std::to_string(outstanding) +
                          " loads are never matched by a USE");
  if (open_atomic)
    throw ConfigError((unsigned)trace.events.size(),
                      "atomic region never terminated");
}

inline Trace load_trace(const std::string& text) {
  using detail::parseTraceNum;
  Trace trace;
  std::istringstream in(text);
  std::string raw;
  unsigned lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    auto toks = detail::tokens(line);
    if (toks.empty()) continue;

    TraceEvent e;
    const std::string& op = toks[0];
    auto need = [&](size_t n) {
      if (toks.size() < n + 1)
        throw ConfigError(lineno, "'" + op + "' expects " + std::to_string(n) +
                                      " arguments");
    };
    if (op == "F") {
      need(2);
      e.kind = EventKind::fetch;
      e.addr = (Addr)parseTraceNum(toks[1], lineno);
      e.length = (unsigned)parseTraceNum(toks[2], lineno);
    } else if (op == "L") {
      need(1);
      e.kind = EventKind::load;
      e.addr = (Addr)parseTraceNum(toks[1], lineno);
      if (toks.size() > 2) e.channel = (unsigned)parseTraceNum(toks[2], lineno);
    } else if (op == "S") {
      need(2);
      e.kind = EventKind::store;
      e.addr = (Addr)parseTraceNum(toks[1], lineno);
      e.value = (Word)parseTraceNum(toks[2], lineno);
      if (toks.size() > 3) e.channel = (unsigned)parseTraceNum(toks[3], lineno);
    } else if (op == "U") {
      e.kind = EventKind::use;
    } else if (op == "X") {
      need(2);
      e.kind = EventKind::lineop;
      if (toks[1] == "fetch") e.op = MemOpKind::fetch_line;
      else if (toks[1] == "flush") e.op = MemOpKind::flush_line;
      else if (toks[1] == "inv") e.op = MemOpKind::invalidate_line;
      else if (toks[1] == "prefetch") e.op = MemOpKind::prefetch_line;
      else if (toks[1] == "storeline") e.op = MemOpKind::store_line;
      else
        throw ConfigError(lineno, "unknown line op '" + toks[1] + "'");
      e.addr = (Addr)parseTraceNum(toks[2], lineno);
      if (toks.size() > 3) e.channel = (unsigned)parseTraceNum(toks[3], lineno);
    } else if (op == "C") {
      need(1);
      e.kind = EventKind::compute;
      e.cycles = (unsigned)parseTraceNum(toks[1], lineno);
      if (e.cycles == 0) throw ConfigError(lineno, "C expects n >= 1");
    } else if (op == "R") {
      need(2);
      e.kind = EventKind::reconfig;
      e.slot = (unsigned)parseTraceNum(toks[1], lineno);
      std::string spec;
      for (size_t i = 2; i < toks.size(); ++i) spec += toks[i];
      e.entry = detail::parseEntrySpec(spec, lineno);
    } else if (op == "SND") {
      need(2);
      e.kind = EventKind::send;
      e.channel = (unsigned)parseTraceNum(toks[1], lineno);
      e.value = (Word)parseTraceNum(toks[2], lineno);
    } else if (op == "RCV") {
      need(1);
      e.kind = EventKind::recv;
      e.buffer = (unsigned)parseTraceNum(toks[1], lineno);
    } else if (op == "AB") {
      need(1);
      e.kind = EventKind::atomic_begin;
      e.atomic_id = parseTraceNum(toks[1], lineno);
    } else if (op == "AE") {
      need(1);
      e.kind = EventKind::atomic_end;
      e.atomic_id = parseTraceNum(toks[1], lineno);
    } else {
      throw ConfigError(lineno, "unknown event '" + op + "'");
    }
    trace.events.push_back(std::move(e));
  }
  validate_trace(trace);
  return trace;
}

inline std::string entry_spec_string(const ChannelMapEntry& e) {
  std::ostringstream out;
  switch (e.kind) {
    case ChannelMapEntry::Kind::memory_group: {
      out << "bank:" << e.group.base_bank << "," << e.group.size << ","
          << to_string(e.group.mode);
      if (e.group.bypass == Bypass::skip_l1) out << ",skip-l1";
      if (e.group.bypass == Bypass::skip_all) out << ",skip-all";
      if (e.group.return_channel)
        out << ",ret=" << e.group.return_channel->core << ":"
            << e.group.return_channel->buffer;
      break;
    }
    case ChannelMapEntry::Kind::remote_core:
      out << "core:" << e.remote.tile.x << "," << e.remote.tile.y << ","
          << e.remote.core << "," << e.remote.buffer;
      break;
    case ChannelMapEntry::Kind::local_multicast:
      out << "mcast:0x" << std::hex << (unsigned)e.multicast_mask;
      break;
  }
  return out.str();
}

inline std::string save_trace(const Trace& trace) {
  std::ostringstream out;
  char buf[64];
  for (const auto& e : trace.events) {
    switch (e.kind) {
      case EventKind::fetch:
        snprintf(buf, sizeof buf, "F 0x%X %u\n", e.addr, e.length);
        out << buf;
        break;
      case EventKind::load:
        if (e.channel == kCmtDataSlot)
          snprintf(buf, sizeof buf, "L 0x%X\n", e.addr);
        else
          snprintf(buf, sizeof buf, "L 0x%X %u\n", e.addr, e.channel);
        out << buf;
        break;
      case EventKind::store:
        if (e.channel == kCmtDataSlot)
          snprintf(buf, sizeof buf, "S 0x%X 0x%X\n", e.addr, e.value);
        else
          snprintf(buf, sizeof buf, "S 0x%X 0x%X %u\n", e.addr, e.value,
                   e.channel);
        out << buf;
        break;
      case EventKind::use:
        out << "U\n";
        break;
      case EventKind::lineop: {
        const char* k = e.op == MemOpKind::fetch_line     ? "fetch"
                        : e.op == MemOpKind::flush_line   ? "flush"
                        : e.op == MemOpKind::invalidate_line ? "inv"
                        : e.op == MemOpKind::prefetch_line   ? "prefetch"
                                                             : "storeline";
        if (e.channel == kCmtDataSlot)
          snprintf(buf, sizeof buf, "X %s 0x%X\n", k, e.addr);
        else
          snprintf(buf, sizeof buf, "X %s 0x%X %u\n", k, e.addr, e.channel);
        out << buf;
        break;
      }
      case EventKind::compute:
        out << "C " << e.cycles << "\n";
        break;
      case EventKind::reconfig:
        out << "R " << e.slot << " " << entry_spec_string(e.entry) << "\n";
        break;
      case EventKind::send:
        snprintf(buf, sizeof buf, "SND %u 0x%X\n", e.channel, e.value);
        out << buf;
        break;
      case EventKind::recv:
        out << "RCV " << e.buffer << "\n";
        break;
      case EventKind::atomic_begin:
        out << "AB " << e.atomic_id << "\n";
        break;
      case EventKind::atomic_end:
        out << "AE " << e.atomic_id << "\n";
        break;
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Synthetic workload generators.
// ---------------------------------------------------------------------------

enum class ProgramKind { loop_nest, pointer_chase, streaming, pipeline_stage };
enum class ReusePattern { sweep, phased, uniform };

struct ProgramModel {
  ProgramKind kind = ProgramKind::loop_nest;
  unsigned inst_working_set = 2048;  // bytes of instruction footprint
  unsigned data_working_set = 4096;  // bytes of data footprint
  ReusePattern reuse = ReusePattern::phased;
  double compute_ratio = 1.0;  // compute instructions per memory access
  uint64_t seed = 0;
  unsigned length = 10000;  // approximate event count
  Addr inst_base = 0;       // 0 = derived from program_index
  Addr data_base = 0;
  unsigned program_index = 0;

  // pipeline_stage parameters
  unsigned stage = 0;
  unsigned stages = 8;
  unsigned blocks = 256;
  bool use_lineops = true;
  bool use_scratchpad = true;
  unsigned lookups_per_block = 8;

  Addr instBase() const {
    return inst_base ? inst_base : 0x00100000 + program_index * 0x00200000;
  }
  Addr dataBase() const {
    return data_base ? data_base : instBase() + 0x00100000;
  }
};

// CMT slot layout used by generated pipeline traces.
constexpr unsigned kPipeLookupSlot = 3;   // scratchpad tables
constexpr unsigned kPipeIoSlot = 4;       // input (stage 0) / output (last)
constexpr unsigned kPipeSendSlot = 5;     // link to the next stage
constexpr unsigned kPipeRecvBuffer = 3;   // data from the previous stage

namespace detail {

// Emits packets of up to `packet_len` instructions, opening a new packet
// whenever the budget is exhausted or the pc changes.
class PacketEmitter {
public:
  PacketEmitter(Trace& t, unsigned packet_len = 16)
      : trace_(t), packet_len_(packet_len) {}

  void startPacket(Addr pc) {
    flush();
    pc_ = pc;
  }

  void emit(TraceEvent e) {
    unsigned w = e.weight();
    if (pending_.empty() || budget_ + w > packet_len_) flushAndContinue();
    budget_ += w;
    pending_.push_back(std::move(e));
  }

  void flush() {
    if (pending_.empty()) return;
    TraceEvent f;
    f.kind = EventKind::fetch;
    f.addr = pc_;
    f.length = std::max(1u, budget_);
    trace_.events.push_back(f);
    for (auto& e : pending_) trace_.events.push_back(std::move(e));
    pending_.clear();
    budget_ = 0;
    pc_ += packet_len_ * 4;  // next packet follows in instruction memory
  }

private:
  void flushAndContinue() { flush(); }

  Trace& trace_;
  unsigned packet_len_;
  Addr pc_ = 0;
  unsigned budget_ = 0;
  std::vector<TraceEvent> pending_;
};

inline TraceEvent loadEvent(Addr a, unsigned ch = kCmtDataSlot) {
  TraceEvent e;
  e.kind = EventKind::load;
  e.addr = a;
  e.channel = ch;
  return e;
}
inline TraceEvent storeEvent(Addr a, Word v, unsigned ch = kCmtDataSlot) {
  TraceEvent e;
  e.kind = EventKind::store;
  e.addr = a;
  e.value = v;
  e.channel = ch;
  return e;
}
inline TraceEvent useEvent() {
  TraceEvent e;
  e.kind = EventKind::use;
  return e;
}
inline TraceEvent computeEvent(unsigned n) {
  TraceEvent e;
  e.kind = EventKind::compute;
  e.cycles = n;
  return e;
}
inline TraceEvent lineopEvent(MemOpKind k, Addr a, unsigned ch = kCmtDataSlot) {
  TraceEvent e;
  e.kind = EventKind::lineop;
  e.op = k;
  e.addr = a;
  e.channel = ch;
  return e;
}
inline TraceEvent sendEvent(unsigned ch, Word v) {
  TraceEvent e;
  e.kind = EventKind::send;
  e.channel = ch;
  e.value = v;
  return e;
}
inline TraceEvent recvEvent(unsigned buf) {
  TraceEvent e;
  e.kind = EventKind::recv;
  e.buffer = buf;
  return e;
}

// A load whose value is consumed three instructions later, hiding the
// three-cycle L1 round trip.
inline void emitHiddenLoad(PacketEmitter& p, Addr addr,
                           unsigned ch = kCmtDataSlot) {
  p.emit(loadEvent(addr, ch));
  p.emit(computeEvent(1));
  p.emit(computeEvent(1));
  p.emit(useEvent());
}

inline Trace generateLoopNest(const ProgramModel& m) {
  Trace t;
  PacketEmitter pe(t);

  const unsigned kPhaseBytes = 2048;
  unsigned inst_packets = std::max(1u, m.inst_working_set / 64);
  unsigned phase_packets = std::max(1u, std::min(inst_packets, kPhaseBytes / 64));
  unsigned phases = (inst_packets + phase_packets - 1) / phase_packets;

  unsigned data_lines = std::max(1u, m.data_working_set / 32);
  unsigned window_lines = m.reuse == ReusePattern::phased
                              ? std::max(1u, std::min(data_lines, kPhaseBytes / 32))
                              : data_lines;

  std::mt19937_64 rng(m.seed * 1000003 + 17);
  Addr data_cursor = 0;
  // compute_ratio compute slots per memory slot; each slot is four
  // instructions (a hidden load or a COMPUTE(4)).
  double mem_budget = 1.0;
  const double mem_per_slot = 1.0 / (1.0 + std::max(0.0, m.compute_ratio));

  // Each phase iteration walks the phase's packets once; iterations per
  // phase are sized so one full pass approximates the requested length.
  unsigned events_per_packet = 10;
  unsigned per_phase_iters = std::max(
      2u, m.length / std::max(1u, phases * phase_packets * events_per_packet));

  for (unsigned phase = 0; phase < phases; ++phase) {
    Addr window_base = m.reuse == ReusePattern::phased
                           ? (Addr)((phase * window_lines * 32) %
                                    (data_lines * 32))
                           : 0;
    for (unsigned iter = 0; iter < per_phase_iters; ++iter) {
      for (unsigned pkt = 0; pkt < phase_packets; ++pkt) {
        Addr pc = m.instBase() + ((phase * phase_packets + pkt) % inst_packets) * 64;
        pe.startPacket(pc);
        // Packet body: interleave hidden loads with compute per the ratio.
        for (unsigned slot = 0; slot < 3; ++slot) {
          mem_budget += mem_per_slot;
          if (mem_budget >= 1.0) {
            mem_budget -= 1.0;
            Addr off;
            switch (m.reuse) {
              case ReusePattern::uniform:
                off = (Addr)((rng() % data_lines) * 32 + (rng() % 8) * 4);
                break;
              case ReusePattern::sweep:
              case ReusePattern::phased:
                off = window_base + data_cursor;
                data_cursor = (data_cursor + 4) % (window_lines * 32);
                break;
            }
            emitHiddenLoad(pe, m.dataBase() + off % (data_lines * 32));
          } else {
            pe.emit(computeEvent(4));
          }
        }
        pe.flush();
      }
    }
  }
  pe.flush();
  return t;
}

inline Trace generateStreaming(const ProgramModel& m) {
  Trace t;
  PacketEmitter pe(t);
  unsigned data_words = std::max(8u, m.data_working_set / 4);
  unsigned inst_packets = std::max(1u, m.inst_working_set / 64);
  Addr cursor = 0;
  unsigned emitted = 0, pkt = 0;
  while (emitted < m.length) {
    pe.startPacket(m.instBase() + (pkt++ % inst_packets) * 64);
    for (unsigned i = 0; i < 3; ++i) {
      emitHiddenLoad(pe, m.dataBase() + cursor * 4);
      cursor = (cursor + 1) % data_words;
      emitted += 4;
    }
    pe.flush();
  }
  return t;
}

inline Trace generatePointerChase(const ProgramModel& m) {
  Trace t;
  PacketEmitter pe(t);
  unsigned lines = std::max(2u, m.data_working_set / 32);
  std::vector<uint32_t> perm(lines);
  for (uint32_t i = 0; i < lines; ++i) perm[i] = i;
  std::mt19937_64 rng(m.seed * 7919 + 3);
  for (uint32_t i = lines - 1; i > 0; --i)
    std::swap(perm[i], perm[rng() % (i + 1)]);

  unsigned inst_packets = std::max(1u, m.inst_working_set / 64);
  unsigned emitted = 0, pkt = 0;
  uint32_t pos = 0;
  while (emitted < m.length) {
    pe.startPacket(m.instBase() + (pkt++ % inst_packets) * 64);
    for (unsigned i = 0; i < 4; ++i) {
      // Dependent chain: the next address needs the loaded value, so the
      // USE follows immediately and no latency is hidden.
      pe.emit(loadEvent(m.dataBase() + perm[pos] * 32));
      pe.emit(useEvent());
      pos = (pos + 1) % lines;
      emitted += 2;
    }
    pe.flush();
  }
  return t;
}

inline Trace generatePipelineStage(const ProgramModel& m) {
  Trace t;
  PacketEmitter pe(t, 61);  // one loop body per packet, resident in L0
  const unsigned words_per_block = 4;
  const unsigned blocks_per_line = 2;
  bool first_stage = m.stage == 0;
  bool last_stage = m.stage + 1 == m.stages;
  unsigned mem_ch = m.use_scratchpad ? kPipeLookupSlot : kCmtDataSlot;
  unsigned io_ch = m.use_lineops || first_stage || last_stage
                       ? kPipeIoSlot
                       : kCmtDataSlot;
  if (!m.use_scratchpad) io_ch = kCmtDataSlot;

  Addr table_base = m.dataBase();
  unsigned table_lines = 32;  // 1kB lookup table per stage
  Addr in_base = m.dataBase() + 0x40000;
  Addr out_base = m.dataBase() + 0x80000;
  std::mt19937_64 rng(m.seed * 104729 + m.stage);

  // Preload the lookup tables; in scratchpad mode this is the explicit
  // store_line preload, in cache mode the first pass warms the lines.
  if (!first_stage && !last_stage) {
    pe.startPacket(m.instBase());
    for (unsigned l = 0; l < table_lines; ++l)
      pe.emit(lineopEvent(MemOpKind::store_line, table_base + l * 32, mem_ch));
    pe.flush();
  }

  Addr loop_pc = m.instBase() + 0x1000;
  for (unsigned b = 0; b < m.blocks; ++b) {
    pe.startPacket(loop_pc);  // same pc: the loop body lives in the L0 cache
    if (first_stage) {
      Addr line = in_base + (b / blocks_per_line) * 32;
      if (b % blocks_per_line == 0) {
        if (m.use_lineops) {
          if (b == 0) pe.emit(lineopEvent(MemOpKind::fetch_line, line, io_ch));
          pe.emit(lineopEvent(MemOpKind::prefetch_line, line + 32, io_ch));
        }
      }
      Addr block_addr = in_base + b * 16;
      for (unsigned w = 0; w < words_per_block; ++w)
        emitHiddenLoad(pe, block_addr + w * 4, io_ch);
      for (unsigned w = 0; w < words_per_block; ++w)
        pe.emit(sendEvent(kPipeSendSlot, (Word)(b * 4 + w)));
    } else if (last_stage) {
      for (unsigned w = 0; w < words_per_block; ++w)
        pe.emit(recvEvent(kPipeRecvBuffer));
      pe.emit(computeEvent(2));
      Addr block_addr = out_base + b * 16;
      if (m.use_lineops) {
        if (b % blocks_per_line == 1)
          pe.emit(lineopEvent(MemOpKind::store_line,
                              out_base + (b / blocks_per_line) * 32, io_ch));
      } else {
        for (unsigned w = 0; w < words_per_block; ++w)
          pe.emit(storeEvent(block_addr + w * 4, (Word)(b * 4 + w), io_ch));
      }
    } else {
      for (unsigned w = 0; w < words_per_block; ++w)
        pe.emit(recvEvent(kPipeRecvBuffer));
      pe.emit(computeEvent(2));
      for (unsigned l = 0; l < m.lookups_per_block; l += 2) {
        // Two overlapped table lookups per round.
        Addr a1 = table_base + (rng() % table_lines) * 32 + (rng() % 8) * 4;
        Addr a2 = table_base + (rng() % table_lines) * 32 + (rng() % 8) * 4;
        pe.emit(loadEvent(a1, mem_ch));
        pe.emit(loadEvent(a2, mem_ch));
        pe.emit(computeEvent(2));
        pe.emit(useEvent());
        pe.emit(useEvent());
      }
      for (unsigned w = 0; w < words_per_block; ++w)
        pe.emit(sendEvent(kPipeSendSlot, (Word)(b * 4 + w)));
    }
    pe.flush();
  }
  pe.flush();
  return t;
}

}  // namespace detail

inline Trace generate_trace(const ProgramModel& m) {
  if (m.data_working_set > (1u << 24) || m.inst_working_set > (1u << 24))
    throw ConfigError(0, "working set exceeds the program's address region");
  if (m.kind == ProgramKind::pipeline_stage && m.stage >= m.stages)
    throw ConfigError(0, "pipeline stage index out of range");
  Trace t;
  switch (m.kind) {
    case ProgramKind::loop_nest: t = detail::generateLoopNest(m); break;
    case ProgramKind::streaming: t = detail::generateStreaming(m); break;
    case ProgramKind::pointer_chase: t = detail::generatePointerChase(m); break;
    case ProgramKind::pipeline_stage: t = detail::generatePipelineStage(m); break;
  }
  validate_trace(t);
  return t;
}

}  // namespace banksim
