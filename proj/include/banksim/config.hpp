/*
 * config.hpp
 *
 * Memory-system configuration: the static system description, channel map
 * table entries, virtual memory groups, the L2 directory table, the
 * configuration-file parser and the configuration families swept by the
 * explorer.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "banksim/common.hpp"

namespace banksim {

// Architectural constants that are not swept.
constexpr unsigned kCmtSlots = 8;            // channel map table entries per core
constexpr unsigned kCoreInputBuffers = 6;    // network input buffers per core
constexpr unsigned kInstPrimaryBuffer = 0;   // packet-fetch responses
constexpr unsigned kInstSecondaryBuffer = 1; // injected (core-to-core) instructions
constexpr unsigned kDefaultDataBuffer = 2;   // memory responses unless overridden
constexpr unsigned kBufferDepth = 4;         // flit slots per input buffer
constexpr unsigned kCmtInstSlot = 0;
constexpr unsigned kCmtDataSlot = 1;

enum class BankMode { cache, scratchpad };
enum class Bypass { none, skip_l1, skip_all };

inline const char* to_string(BankMode m) {
  return m == BankMode::cache ? "cache" : "scratchpad";
}

struct ReturnChannel {
  unsigned core = 0;  // core on the issuing tile that receives responses
  unsigned buffer = kDefaultDataBuffer;

  bool operator==(const ReturnChannel&) const = default;
};

// A virtual group of memory banks on one tile. Cache lines are interleaved
// across the group's banks; the group is addressed through a channel map
// entry and accessed in cache or scratchpad mode.
struct MemoryGroupConfig {
  unsigned base_bank = 0;
  unsigned size = 1;  // bank count, power of two
  BankMode mode = BankMode::cache;
  Bypass bypass = Bypass::none;
  std::optional<ReturnChannel> return_channel;  // default: issuing core

  bool operator==(const MemoryGroupConfig&) const = default;

  bool sameBanks(const MemoryGroupConfig& o) const {
    return base_bank == o.base_bank && size == o.size;
  }

  bool overlaps(const MemoryGroupConfig& o) const {
    return base_bank < o.base_bank + o.size && o.base_bank < base_bank + size;
  }

  void validate(unsigned banks_per_tile) const {
    if (!isPow2(size) || size > banks_per_tile)
      throw ConfigError(0, "group size must be a power of two <= " +
                               std::to_string(banks_per_tile) + " (got " +
                               std::to_string(size) + ")");
    if (base_bank % size != 0)
      throw ConfigError(0, "group base_bank " + std::to_string(base_bank) +
                               " not aligned to size " + std::to_string(size));
    if (base_bank + size > banks_per_tile)
      throw ConfigError(0, "group [" + std::to_string(base_bank) + "," +
                               std::to_string(base_bank + size) +
                               ") exceeds banks_per_tile");
  }

  std::string label() const {
    std::string s = "b" + std::to_string(base_bank) + "s" + std::to_string(size);
    s += mode == BankMode::cache ? "c" : "p";
    if (bypass == Bypass::skip_l1) s += "!1";
    if (bypass == Bypass::skip_all) s += "!*";
    return s;
  }
};

struct RemoteCoreTarget {
  TileCoord tile;
  unsigned core = 0;
  unsigned buffer = kDefaultDataBuffer;
  unsigned credit_limit = kBufferDepth;
  bool guaranteed_consumer = false;

  bool operator==(const RemoteCoreTarget&) const = default;
};

// One channel map table entry: a logical output channel bound to a remote
// core, a local multicast set, or a memory group.
struct ChannelMapEntry {
  enum class Kind { remote_core, local_multicast, memory_group };

  Kind kind = Kind::memory_group;
  RemoteCoreTarget remote;
  uint8_t multicast_mask = 0;
  MemoryGroupConfig group;

  bool operator==(const ChannelMapEntry&) const = default;

  static ChannelMapEntry forGroup(MemoryGroupConfig g) {
    ChannelMapEntry e;
    e.kind = Kind::memory_group;
    e.group = g;
    return e;
  }
  static ChannelMapEntry forRemote(RemoteCoreTarget t) {
    ChannelMapEntry e;
    e.kind = Kind::remote_core;
    e.remote = t;
    return e;
  }
  static ChannelMapEntry forMulticast(uint8_t mask) {
    ChannelMapEntry e;
    e.kind = Kind::local_multicast;
    e.multicast_mask = mask;
    return e;
  }

  void validate(unsigned banks_per_tile, unsigned cores_per_tile) const {
    switch (kind) {
      case Kind::remote_core:
        if (remote.credit_limit < 1)
          throw ConfigError(0, "remote_core entry needs credit_limit >= 1");
        if (remote.core >= cores_per_tile)
          throw ConfigError(0, "remote_core entry names core " +
                                   std::to_string(remote.core) +
                                   " beyond cores_per_tile");
        if (remote.buffer >= kCoreInputBuffers)
          throw ConfigError(0, "remote_core entry names input buffer " +
                                   std::to_string(remote.buffer) +
                                   " beyond buffer count");
        break;
      case Kind::local_multicast:
        if (multicast_mask == 0)
          throw ConfigError(0, "multicast entry has empty core mask");
        break;
      case Kind::memory_group:
        group.validate(banks_per_tile);
        if (group.return_channel &&
            group.return_channel->buffer >= kCoreInputBuffers)
          throw ConfigError(0, "group return channel names a missing buffer");
        break;
    }
  }
};

// Outcome of a channel map update: whether the outgoing entry's group must
// write back its dirty state before the new mapping takes effect.
struct FlushDecision {
  bool flush_needed = false;
  MemoryGroupConfig old_group;
};

// Per-core channel map table. The table itself updates in a single cycle;
// the caller charges any flush cost reported by the decision.
class CmtTable {
public:
  FlushDecision update(unsigned slot, const ChannelMapEntry& entry,
                       unsigned banks_per_tile, unsigned cores_per_tile) {
    if (slot >= kCmtSlots)
      throw ConfigError(0, "channel map slot " + std::to_string(slot) +
                               " out of range");
    entry.validate(banks_per_tile, cores_per_tile);  // reject before mutating

    FlushDecision d;
    const auto& old = slots_[slot];
    if (old && old->kind == ChannelMapEntry::Kind::memory_group &&
        old->group.mode == BankMode::cache) {
      bool same = entry.kind == ChannelMapEntry::Kind::memory_group &&
                  entry.group.sameBanks(old->group) &&
                  entry.group.mode == BankMode::cache;
      if (!same) {
        d.flush_needed = true;
        d.old_group = old->group;
      }
    }
    slots_[slot] = entry;
    return d;
  }

  const ChannelMapEntry* get(unsigned slot) const {
    if (slot >= kCmtSlots || !slots_[slot]) return nullptr;
    return &*slots_[slot];
  }

  void set(unsigned slot, const ChannelMapEntry& entry) { slots_[slot] = entry; }

private:
  std::array<std::optional<ChannelMapEntry>, kCmtSlots> slots_;
};

struct DirectoryEntry {
  bool to_memory = true;      // else targets l2_tile
  TileCoord l2_tile;
  uint32_t substitute_bits = 0;  // written over the address's top index bits
};

struct DirectoryConfig {
  unsigned entry_count = 16;       // power of two
  unsigned index_bit_position = 5; // low bits distribute lines evenly
  std::vector<DirectoryEntry> entries = std::vector<DirectoryEntry>(16);

  unsigned indexBits() const { return ilog2(entry_count); }
};

struct ProgramBinding {
  TileCoord tile;
  unsigned core = 0;
  std::string trace_path;
  std::array<std::optional<ChannelMapEntry>, kCmtSlots> cmt;
};

// Full static description of the simulated system.
struct SystemConfig {
  unsigned mesh_width = 4;
  unsigned mesh_height = 4;
  unsigned cores_per_tile = 8;
  unsigned banks_per_tile = 8;
  unsigned bank_bytes = 2048;
  unsigned line_bytes = 32;
  unsigned word_bytes = 4;
  unsigned main_memory_latency = 35;
  unsigned default_credits = kBufferDepth;
  TileCoord memctrl_tile{0, 0};
  std::vector<TileCoord> l2_tiles;
  DirectoryConfig directory;
  std::vector<ProgramBinding> programs;
  Cycle watchdog_cycles = 1000000;

  unsigned wordsPerLine() const { return line_bytes / word_bytes; }
  unsigned linesPerBank() const { return bank_bytes / line_bytes; }
  unsigned tileCount() const { return mesh_width * mesh_height; }

  bool inMesh(TileCoord t) const {
    return t.x >= 0 && t.y >= 0 && t.x < (int)mesh_width &&
           t.y < (int)mesh_height;
  }
  bool isL2(TileCoord t) const {
    return std::find(l2_tiles.begin(), l2_tiles.end(), t) != l2_tiles.end();
  }

  void validate() const;
};

inline void SystemConfig::validate() const {
  if (line_bytes == 0 || word_bytes == 0 || bank_bytes == 0)
    throw ConfigError(0, "sizes must be nonzero");
  if (bank_bytes % line_bytes != 0)
    throw ConfigError(0, "bank_bytes not divisible by line_bytes");
  if (line_bytes % word_bytes != 0)
    throw ConfigError(0, "line_bytes not divisible by word_bytes");
  if (wordsPerLine() > 32)
    throw ConfigError(0, "more than 32 words per line is unsupported");
  if (mesh_width == 0 || mesh_height == 0)
    throw ConfigError(0, "mesh must be at least 1x1");
  if (!inMesh(memctrl_tile))
    throw ConfigError(0, "memory controller attachment tile outside mesh");

  if (!isPow2(directory.entry_count))
    throw ConfigError(0, "directory entry_count must be a power of two");
  if (directory.entries.size() != directory.entry_count)
    throw ConfigError(0, "directory has " +
                             std::to_string(directory.entries.size()) +
                             " entries, expected " +
                             std::to_string(directory.entry_count));
  if (directory.index_bit_position + directory.indexBits() > kAddressBits)
    throw ConfigError(0, "directory index bits exceed address width");
  for (const auto& e : directory.entries) {
    if (!e.to_memory && !isL2(e.l2_tile))
      throw ConfigError(0, "directory entry targets tile " +
                               to_string(e.l2_tile) +
                               " which is not an L2 tile");
    if (e.substitute_bits >= directory.entry_count << 0 &&
        directory.indexBits() < kAddressBits &&
        e.substitute_bits >= (1u << directory.indexBits()))
      throw ConfigError(0, "directory substitute bits wider than index field");
  }

  for (auto t : l2_tiles) {
    if (!inMesh(t))
      throw ConfigError(0, "l2 tile " + to_string(t) + " outside mesh");
    if (std::count(l2_tiles.begin(), l2_tiles.end(), t) != 1)
      throw ConfigError(0, "l2 tile " + to_string(t) + " listed twice");
  }

  // Program bindings: one (tile, core) each, on compute tiles only, with
  // mode-consistent group overlap within each tile.
  std::vector<std::pair<TileCoord, unsigned>> seats;
  std::map<TileCoord, std::vector<MemoryGroupConfig>> tile_groups;
  for (size_t i = 0; i < programs.size(); ++i) {
    const auto& p = programs[i];
    if (!inMesh(p.tile))
      throw ConfigError(0, "program " + std::to_string(i) +
                               " bound to tile outside mesh");
    if (isL2(p.tile))
      throw ConfigError(0, "program " + std::to_string(i) +
                               " bound to l2 tile " + to_string(p.tile) +
                               "; l2 tiles host no programs");
    if (p.core >= cores_per_tile)
      throw ConfigError(0, "program " + std::to_string(i) +
                               " bound to core beyond cores_per_tile");
    auto seat = std::make_pair(p.tile, p.core);
    if (std::find(seats.begin(), seats.end(), seat) != seats.end())
      throw ConfigError(0, "two programs bound to tile " + to_string(p.tile) +
                               " core " + std::to_string(p.core));
    seats.push_back(seat);
    for (const auto& slot : p.cmt) {
      if (!slot) continue;
      slot->validate(banks_per_tile, cores_per_tile);
      if (slot->kind == ChannelMapEntry::Kind::remote_core &&
          !inMesh(slot->remote.tile))
        throw ConfigError(0, "channel targets tile outside mesh");
      if (slot->kind == ChannelMapEntry::Kind::memory_group)
        tile_groups[p.tile].push_back(slot->group);
    }
  }
  for (const auto& [tile, groups] : tile_groups) {
    for (size_t a = 0; a < groups.size(); ++a)
      for (size_t b = a + 1; b < groups.size(); ++b)
        if (groups[a].overlaps(groups[b]) && groups[a].mode != groups[b].mode)
          throw ConfigError(0, "groups " + groups[a].label() + " and " +
                                   groups[b].label() + " on tile " +
                                   to_string(tile) +
                                   " overlap with different modes");
  }
}

// ---------------------------------------------------------------------------
// Configuration document parser.
//
// Line-oriented `key = value` with [section] headers; see README for the
// grammar. Unknown keys are rejected so typos fail loudly.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> splitList(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline uint64_t parseNumber(const std::string& s, unsigned line) {
  std::string t = trim(s);
  if (t.empty()) throw ConfigError(line, "expected a number");
  try {
    size_t pos = 0;
    uint64_t v;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X'))
      v = std::stoull(t.substr(2), &pos, 16), pos += 2;
    else if (t.size() > 2 && t[0] == '0' && t[1] == 'b')
      v = std::stoull(t.substr(2), &pos, 2), pos += 2;
    else
      v = std::stoull(t, &pos, 10);
    if (pos != t.size()) throw ConfigError(line, "bad number '" + t + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    throw ConfigError(line, "bad number '" + t + "'");
  }
}

inline TileCoord parseTile(const std::string& s, unsigned line) {
  auto parts = splitList(s, ',');
  if (parts.size() != 2) throw ConfigError(line, "expected tile as X,Y");
  return TileCoord{(int)parseNumber(parts[0], line),
                   (int)parseNumber(parts[1], line)};
}

// `bank:BASE,SIZE,MODE[,skip-l1|skip-all][,ret=CORE:BUF]`
inline MemoryGroupConfig parseGroupSpec(const std::string& s, unsigned line) {
  if (s.rfind("bank:", 0) != 0)
    throw ConfigError(line, "group spec must start with 'bank:'");
  auto parts = splitList(s.substr(5), ',');
  if (parts.size() < 3) throw ConfigError(line, "group spec needs base,size,mode");
  MemoryGroupConfig g;
  g.base_bank = (unsigned)parseNumber(parts[0], line);
  g.size = (unsigned)parseNumber(parts[1], line);
  if (parts[2] == "cache")
    g.mode = BankMode::cache;
  else if (parts[2] == "scratchpad")
    g.mode = BankMode::scratchpad;
  else
    throw ConfigError(line, "group mode must be cache or scratchpad");
  for (size_t i = 3; i < parts.size(); ++i) {
    if (parts[i] == "skip-l1")
      g.bypass = Bypass::skip_l1;
    else if (parts[i] == "skip-all")
      g.bypass = Bypass::skip_all;
    else if (parts[i].rfind("ret=", 0) == 0) {
      auto rc = splitList(parts[i].substr(4), ':');
      if (rc.size() != 2) throw ConfigError(line, "ret= expects CORE:BUF");
      g.return_channel = ReturnChannel{(unsigned)parseNumber(rc[0], line),
                                       (unsigned)parseNumber(rc[1], line)};
    } else {
      throw ConfigError(line, "unknown group option '" + parts[i] + "'");
    }
  }
  return g;
}

// `core:TX,TY,CORE,BUF` or `mcast:MASK` or a group spec.
inline ChannelMapEntry parseEntrySpec(const std::string& s, unsigned line) {
  if (s.rfind("core:", 0) == 0) {
    auto parts = splitList(s.substr(5), ',');
    if (parts.size() != 4) throw ConfigError(line, "core: expects TX,TY,CORE,BUF");
    RemoteCoreTarget t;
    t.tile = TileCoord{(int)parseNumber(parts[0], line),
                       (int)parseNumber(parts[1], line)};
    t.core = (unsigned)parseNumber(parts[2], line);
    t.buffer = (unsigned)parseNumber(parts[3], line);
    return ChannelMapEntry::forRemote(t);
  }
  if (s.rfind("mcast:", 0) == 0)
    return ChannelMapEntry::forMulticast(
        (uint8_t)parseNumber(s.substr(6), line));
  return ChannelMapEntry::forGroup(parseGroupSpec(s, line));
}

}  // namespace detail

inline SystemConfig parse_config(const std::string& text) {
  using namespace detail;
  SystemConfig cfg;
  bool have_directory_entries = false;
  std::string section;
  int program_idx = -1;

  std::istringstream in(text);
  std::string raw;
  unsigned lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(lineno, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section.rfind("program.", 0) == 0) {
        program_idx = (int)parseNumber(section.substr(8), lineno);
        if (program_idx < 0 || program_idx > 255)
          throw ConfigError(lineno, "program index out of range");
        if ((int)cfg.programs.size() <= program_idx)
          cfg.programs.resize(program_idx + 1);
        section = "program";
      } else if (section != "system" && section != "directory") {
        throw ConfigError(lineno, "unknown section [" + section + "]");
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(lineno, "expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError(lineno, "expected 'key = value'");

    if (section.empty() || section == "system") {
      if (key == "tiles") {
        auto xi = val.find('x');
        if (xi == std::string::npos)
          throw ConfigError(lineno, "tiles expects WxH");
        cfg.mesh_width = (unsigned)parseNumber(val.substr(0, xi), lineno);
        cfg.mesh_height = (unsigned)parseNumber(val.substr(xi + 1), lineno);
      } else if (key == "cores_per_tile")
        cfg.cores_per_tile = (unsigned)parseNumber(val, lineno);
      else if (key == "banks_per_tile")
        cfg.banks_per_tile = (unsigned)parseNumber(val, lineno);
      else if (key == "bank_bytes")
        cfg.bank_bytes = (unsigned)parseNumber(val, lineno);
      else if (key == "line_bytes")
        cfg.line_bytes = (unsigned)parseNumber(val, lineno);
      else if (key == "word_bytes")
        cfg.word_bytes = (unsigned)parseNumber(val, lineno);
      else if (key == "main_memory_latency")
        cfg.main_memory_latency = (unsigned)parseNumber(val, lineno);
      else if (key == "default_credits")
        cfg.default_credits = (unsigned)parseNumber(val, lineno);
      else if (key == "watchdog")
        cfg.watchdog_cycles = parseNumber(val, lineno);
      else if (key == "memctrl_tile")
        cfg.memctrl_tile = parseTile(val, lineno);
      else if (key == "l2_tiles") {
        cfg.l2_tiles.clear();
        for (const auto& part : splitList(val, ' '))
          if (!part.empty()) cfg.l2_tiles.push_back(parseTile(part, lineno));
      } else
        throw ConfigError(lineno, "unknown [system] key '" + key + "'");
    } else if (section == "directory") {
      if (key == "index_bits_at")
        cfg.directory.index_bit_position = (unsigned)parseNumber(val, lineno);
      else if (key == "entries") {
        cfg.directory.entry_count = (unsigned)parseNumber(val, lineno);
        if (!isPow2(cfg.directory.entry_count))
          throw ConfigError(lineno, "directory entry_count must be a power of two");
        cfg.directory.entries.assign(cfg.directory.entry_count, DirectoryEntry{});
      } else if (key.rfind("entry.", 0) == 0) {
        unsigned idx = (unsigned)parseNumber(key.substr(6), lineno);
        if (idx >= cfg.directory.entries.size())
          throw ConfigError(lineno, "directory entry index out of range");
        DirectoryEntry e;
        if (val.rfind("mem", 0) == 0) {
          e.to_memory = true;
          auto rest = splitList(val, ',');
          if (rest.size() == 2) e.substitute_bits = (uint32_t)parseNumber(rest[1], lineno);
          else if (rest.size() != 1)
            throw ConfigError(lineno, "directory entry expects mem[,SUBST]");
        } else if (val.rfind("l2:", 0) == 0) {
          auto parts = splitList(val.substr(3), ',');
          if (parts.size() != 3)
            throw ConfigError(lineno, "directory entry expects l2:TX,TY,SUBST");
          e.to_memory = false;
          e.l2_tile = TileCoord{(int)parseNumber(parts[0], lineno),
                                (int)parseNumber(parts[1], lineno)};
          e.substitute_bits = (uint32_t)parseNumber(parts[2], lineno);
        } else {
          throw ConfigError(lineno, "directory entry expects mem or l2:...");
        }
        cfg.directory.entries[idx] = e;
        have_directory_entries = true;
      } else
        throw ConfigError(lineno, "unknown [directory] key '" + key + "'");
    } else if (section == "program") {
      auto& p = cfg.programs[program_idx];
      try {
        if (key == "tile")
          p.tile = parseTile(val, lineno);
        else if (key == "core")
          p.core = (unsigned)parseNumber(val, lineno);
        else if (key == "trace")
          p.trace_path = val;
        else if (key == "inst")
          p.cmt[kCmtInstSlot] =
              ChannelMapEntry::forGroup(parseGroupSpec(val, lineno));
        else if (key == "data")
          p.cmt[kCmtDataSlot] =
              ChannelMapEntry::forGroup(parseGroupSpec(val, lineno));
        else if (key.rfind("chan.", 0) == 0) {
          unsigned slot = (unsigned)parseNumber(key.substr(5), lineno);
          if (slot >= kCmtSlots)
            throw ConfigError(lineno, "channel slot out of range");
          p.cmt[slot] = parseEntrySpec(val, lineno);
        } else if (key.rfind("credits.", 0) == 0) {
          unsigned slot = (unsigned)parseNumber(key.substr(8), lineno);
          if (slot >= kCmtSlots || !p.cmt[slot] ||
              p.cmt[slot]->kind != ChannelMapEntry::Kind::remote_core)
            throw ConfigError(lineno, "credits.N must follow a core channel");
          p.cmt[slot]->remote.credit_limit = (unsigned)parseNumber(val, lineno);
        } else if (key.rfind("gc.", 0) == 0) {
          unsigned slot = (unsigned)parseNumber(key.substr(3), lineno);
          if (slot >= kCmtSlots || !p.cmt[slot] ||
              p.cmt[slot]->kind != ChannelMapEntry::Kind::remote_core)
            throw ConfigError(lineno, "gc.N must follow a core channel");
          p.cmt[slot]->remote.guaranteed_consumer = (val == "true" || val == "1");
        } else
          throw ConfigError(lineno, "unknown [program] key '" + key + "'");
      } catch (const ConfigError& e) {
        if (e.line()) throw;
        throw ConfigError(lineno, e.what());
      }
    }
  }

  // Directory entries default to the memory controller with a zero
  // substitution; if the user resized the table without naming entries that
  // default still applies.
  (void)have_directory_entries;

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(0, std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Swept L1 configuration families (§ explorer).
// ---------------------------------------------------------------------------

struct ProgramGroups {
  MemoryGroupConfig inst;
  MemoryGroupConfig data;
  bool unified = false;  // inst and data are the same group
};

// One point in an L1 configuration family: per-program instruction and data
// groups, possibly shared between the two programs of a pair.
struct L1ConfigPoint {
  std::vector<ProgramGroups> programs;
  bool shared_unified = false;
  bool shared_inst = false;
  bool shared_data = false;

  unsigned totalBanks() const {
    // Count each distinct bank range once.
    unsigned used = 0;
    std::vector<std::pair<unsigned, unsigned>> seen;
    auto add = [&](const MemoryGroupConfig& g) {
      auto key = std::make_pair(g.base_bank, g.size);
      if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
        seen.push_back(key);
        used += g.size;
      }
    };
    for (const auto& p : programs) {
      add(p.inst);
      if (!p.unified) add(p.data);
    }
    return used;
  }

  std::string label() const {
    auto part = [](const ProgramGroups& p) {
      if (p.unified) return "u" + std::to_string(p.inst.size);
      return "i" + std::to_string(p.inst.size) + "d" +
             std::to_string(p.data.size);
    };
    if (programs.size() == 1) return part(programs[0]);
    if (shared_unified)
      return "AB:u" + std::to_string(programs[0].inst.size);
    std::string s;
    if (shared_inst && shared_data)
      return "I:" + std::to_string(programs[0].inst.size) +
             "|D:" + std::to_string(programs[0].data.size);
    if (shared_inst)
      return "I:" + std::to_string(programs[0].inst.size) + "|A:d" +
             std::to_string(programs[0].data.size) + "|B:d" +
             std::to_string(programs[1].data.size);
    if (shared_data)
      return "D:" + std::to_string(programs[0].data.size) + "|A:i" +
             std::to_string(programs[0].inst.size) + "|B:i" +
             std::to_string(programs[1].inst.size);
    return "A:" + part(programs[0]) + "|B:" + part(programs[1]);
  }

  void validate(unsigned banks_per_tile) const {
    unsigned total = 0;
    for (const auto& p : programs) {
      p.inst.validate(banks_per_tile);
      p.data.validate(banks_per_tile);
    }
    total = totalBanks();
    if (total > banks_per_tile)
      throw ConfigError(0, "configuration uses " + std::to_string(total) +
                               " banks, more than the tile provides");
  }
};

namespace detail {

// Place groups of the given sizes into an 8-bank tile: size-descending
// first-fit at naturally aligned bases. With power-of-two sizes summing to
// at most the tile size this never fails.
inline std::vector<unsigned> placeGroups(const std::vector<unsigned>& sizes,
                                         unsigned banks_per_tile) {
  std::vector<size_t> order(sizes.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return sizes[a] > sizes[b]; });
  std::vector<unsigned> base(sizes.size(), 0);
  unsigned used = 0;  // bitmask of occupied banks
  for (size_t idx : order) {
    unsigned s = sizes[idx];
    bool placed = false;
    for (unsigned b = 0; b + s <= banks_per_tile; b += s) {
      unsigned mask = ((1u << s) - 1) << b;
      if ((used & mask) == 0) {
        used |= mask;
        base[idx] = b;
        placed = true;
        break;
      }
    }
    if (!placed)
      throw ConfigError(0, "internal: group placement failed");
  }
  return base;
}

inline MemoryGroupConfig cacheGroup(unsigned base, unsigned size) {
  MemoryGroupConfig g;
  g.base_bank = base;
  g.size = size;
  g.mode = BankMode::cache;
  return g;
}

}  // namespace detail

// Every unified configuration of size 2^k <= banks and every split
// (instruction 2^a, data 2^b) configuration with 2^a + 2^b <= banks.
inline std::vector<L1ConfigPoint> enumerate_single_program_configs(
    unsigned banks) {
  if (!isPow2(banks) || banks > 8)
    throw ConfigError(0, "bank budget must be 1, 2, 4 or 8");
  std::vector<L1ConfigPoint> out;
  for (unsigned s = 1; s <= banks; s *= 2) {
    L1ConfigPoint p;
    auto g = detail::cacheGroup(0, s);
    p.programs.push_back(ProgramGroups{g, g, true});
    out.push_back(p);
  }
  for (unsigned a = 1; a < banks; a *= 2) {
    for (unsigned b = 1; b < banks; b *= 2) {
      if (a + b > banks) continue;
      auto base = detail::placeGroups({a, b}, 8);
      L1ConfigPoint p;
      p.programs.push_back(ProgramGroups{detail::cacheGroup(base[0], a),
                                         detail::cacheGroup(base[1], b), false});
      out.push_back(p);
    }
  }
  return out;
}

// The two-program family: each program unified or split, each region private
// or shared with the other program, total at most `banks` banks. The family
// composition is reported in sweep output headers.
inline std::vector<L1ConfigPoint> enumerate_pair_configs(unsigned banks = 8) {
  if (banks != 8) throw ConfigError(0, "pair family is defined for 8 banks");
  std::vector<L1ConfigPoint> out;
  const unsigned sizes[] = {1, 2, 4, 8};
  const unsigned small_sizes[] = {1, 2, 4};

  // One unified group shared by both programs.
  for (unsigned s : sizes) {
    L1ConfigPoint p;
    auto g = detail::cacheGroup(0, s);
    p.programs = {ProgramGroups{g, g, true}, ProgramGroups{g, g, true}};
    p.shared_unified = p.shared_inst = p.shared_data = true;
    out.push_back(p);
  }
  // Private unified caches.
  for (unsigned sa : small_sizes)
    for (unsigned sb : small_sizes) {
      if (sa + sb > banks) continue;
      auto base = detail::placeGroups({sa, sb}, banks);
      L1ConfigPoint p;
      auto ga = detail::cacheGroup(base[0], sa);
      auto gb = detail::cacheGroup(base[1], sb);
      p.programs = {ProgramGroups{ga, ga, true}, ProgramGroups{gb, gb, true}};
      out.push_back(p);
    }
  // Split caches with both regions shared.
  for (unsigned i : small_sizes)
    for (unsigned d : small_sizes) {
      if (i + d > banks) continue;
      auto base = detail::placeGroups({i, d}, banks);
      L1ConfigPoint p;
      auto gi = detail::cacheGroup(base[0], i);
      auto gd = detail::cacheGroup(base[1], d);
      p.programs = {ProgramGroups{gi, gd, false}, ProgramGroups{gi, gd, false}};
      p.shared_inst = p.shared_data = true;
      out.push_back(p);
    }
  // Split caches, shared instruction region, private data regions.
  for (unsigned i : small_sizes)
    for (unsigned da : small_sizes)
      for (unsigned db : small_sizes) {
        if (i + da + db > banks) continue;
        auto base = detail::placeGroups({i, da, db}, banks);
        L1ConfigPoint p;
        auto gi = detail::cacheGroup(base[0], i);
        p.programs = {ProgramGroups{gi, detail::cacheGroup(base[1], da), false},
                      ProgramGroups{gi, detail::cacheGroup(base[2], db), false}};
        p.shared_inst = true;
        out.push_back(p);
      }
  // Split caches, shared data region, private instruction regions.
  for (unsigned d : small_sizes)
    for (unsigned ia : small_sizes)
      for (unsigned ib : small_sizes) {
        if (d + ia + ib > banks) continue;
        auto base = detail::placeGroups({d, ia, ib}, banks);
        L1ConfigPoint p;
        auto gd = detail::cacheGroup(base[0], d);
        p.programs = {ProgramGroups{detail::cacheGroup(base[1], ia), gd, false},
                      ProgramGroups{detail::cacheGroup(base[2], ib), gd, false}};
        p.shared_data = true;
        out.push_back(p);
      }
  // One program unified, the other split, everything private.
  for (int unified_prog = 0; unified_prog < 2; ++unified_prog)
    for (unsigned u : small_sizes)
      for (unsigned i : small_sizes)
        for (unsigned d : small_sizes) {
          if (u + i + d > banks) continue;
          auto base = detail::placeGroups({u, i, d}, banks);
          auto gu = detail::cacheGroup(base[0], u);
          ProgramGroups up{gu, gu, true};
          ProgramGroups sp{detail::cacheGroup(base[1], i),
                           detail::cacheGroup(base[2], d), false};
          L1ConfigPoint p;
          p.programs = unified_prog == 0
                           ? std::vector<ProgramGroups>{up, sp}
                           : std::vector<ProgramGroups>{sp, up};
          out.push_back(p);
        }
  // Both split, everything private.
  for (unsigned ia : small_sizes)
    for (unsigned da : small_sizes)
      for (unsigned ib : small_sizes)
        for (unsigned db : small_sizes) {
          if (ia + da + ib + db > banks) continue;
          auto base = detail::placeGroups({ia, da, ib, db}, banks);
          L1ConfigPoint p;
          p.programs = {
              ProgramGroups{detail::cacheGroup(base[0], ia),
                            detail::cacheGroup(base[1], da), false},
              ProgramGroups{detail::cacheGroup(base[2], ib),
                            detail::cacheGroup(base[3], db), false}};
          out.push_back(p);
        }
  return out;
}

// Bind a configuration point's groups onto program CMT slots.
inline void apply_config_point(SystemConfig& cfg, const L1ConfigPoint& point) {
  if (point.programs.size() != cfg.programs.size())
    throw ConfigError(0, "configuration point covers " +
                             std::to_string(point.programs.size()) +
                             " programs, config has " +
                             std::to_string(cfg.programs.size()));
  for (size_t i = 0; i < cfg.programs.size(); ++i) {
    cfg.programs[i].cmt[kCmtInstSlot] =
        ChannelMapEntry::forGroup(point.programs[i].inst);
    cfg.programs[i].cmt[kCmtDataSlot] =
        ChannelMapEntry::forGroup(point.programs[i].data);
  }
}

}  // namespace banksim
