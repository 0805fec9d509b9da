#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "banksim/hierarchy.hpp"
#include "reference_models.hpp"

using namespace banksim;

namespace {

DirectoryConfig stripedDirectory(const std::vector<TileCoord>& l2_tiles,
                                 unsigned position) {
  DirectoryConfig d;
  d.index_bit_position = position;
  for (unsigned i = 0; i < d.entry_count; ++i) {
    d.entries[i].to_memory = l2_tiles.empty();
    if (!l2_tiles.empty()) d.entries[i].l2_tile = l2_tiles[i % l2_tiles.size()];
    d.entries[i].substitute_bits = 0;
  }
  return d;
}

}  // namespace

TEST_CASE("directory lookup index and substitution", "[hierarchy]") {
  DirectoryConfig d;
  d.index_bit_position = 13;
  d.entries[5].to_memory = false;
  d.entries[5].l2_tile = {1, 2};
  d.entries[5].substitute_bits = 0x3;

  auto t = directory_lookup(0x0000A000, d);
  CHECK_FALSE(t.to_memory);  // (0xA000 >> 13) & 0xF == 5
  CHECK(t.l2_tile == TileCoord{1, 2});
  CHECK(t.substituted == 0x3000A000);

  // Substitute bits equal to the address's existing top bits: identity.
  d.entries[5].substitute_bits = 0x0;
  CHECK(directory_lookup(0x0000A000, d).substituted == 0x0000A000);
}

TEST_CASE("directory lookup is deterministic and ignores unrelated entries",
          "[hierarchy]") {
  DirectoryConfig d = stripedDirectory({{2, 1}, {1, 2}}, 5);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    Addr addr = (Addr)rng();
    auto a = directory_lookup(addr, d);
    auto b = directory_lookup(addr, d);
    CHECK(a.to_memory == b.to_memory);
    CHECK(a.substituted == b.substituted);

    unsigned idx = (addr >> d.index_bit_position) & (d.entry_count - 1);
    DirectoryConfig d2 = d;
    d2.entries[(idx + 1) % d.entry_count].substitute_bits ^= 0xF;
    d2.entries[(idx + 3) % d.entry_count].to_memory ^= true;
    auto c = directory_lookup(addr, d2);
    CHECK(a.to_memory == c.to_memory);
    CHECK(a.substituted == c.substituted);
  }
}

TEST_CASE("index bit position controls distribution", "[hierarchy]") {
  std::vector<TileCoord> tiles{{2, 1}, {1, 2}};

  SECTION("low bits stripe consecutive lines across tiles") {
    auto d = stripedDirectory(tiles, 5);  // line-granular striping
    std::vector<TileCoord> seq;
    for (Addr a = 0; a < 8 * 32; a += 32)
      seq.push_back(directory_lookup(a, d).l2_tile);
    for (size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] != seq[i - 1]);
  }

  SECTION("high bits keep contiguous data together") {
    auto d = stripedDirectory(tiles, 12);  // 4kB chunks
    for (Addr base = 0; base < 4 * 4096; base += 4096) {
      auto first = directory_lookup(base, d).l2_tile;
      for (Addr a = base; a < base + 4096; a += 32)
        CHECK(directory_lookup(a, d).l2_tile == first);
      CHECK(directory_lookup(base + 4096, d).l2_tile != first);
    }
  }

  SECTION("single entry sends everything to one target") {
    DirectoryConfig d;
    d.entry_count = 1;
    d.entries.assign(1, DirectoryEntry{});
    d.entries[0].to_memory = true;
    for (unsigned pos : {0u, 5u, 20u}) {
      auto c = choose_index_bits(d, pos);
      std::mt19937_64 rng(4);
      for (int i = 0; i < 100; ++i) {
        auto t = directory_lookup((Addr)rng(), c);
        CHECK(t.to_memory);
      }
    }
  }

  SECTION("out-of-range position rejected") {
    DirectoryConfig d;
    CHECK_THROWS_AS(choose_index_bits(d, 29), ConfigError);
    CHECK_NOTHROW(choose_index_bits(d, 28));
  }
}

TEST_CASE("eight distinct lines fit one L2 set; the ninth evicts exactly one",
          "[hierarchy]") {
  L2Cache l2(64, 8, 8);
  // Lines that all map to set 0: line_addr multiples of 64.
  for (unsigned i = 0; i < 8; ++i) {
    Addr line = i * 64;
    REQUIRE_FALSE(l2.probe(line).hit);
    auto v = l2.allocate(line);
    CHECK_FALSE(v.any);
    l2.install(line, default_fill(line * 32, 8), false, v.way);
  }
  for (unsigned i = 0; i < 8; ++i) CHECK(l2.probe(i * 64).hit);
  CHECK(l2.validCount(0) == 8);

  auto v = l2.allocate(8 * 64);
  CHECK(v.any);  // exactly one eviction
  l2.install(8 * 64, default_fill(8 * 64 * 32, 8), false, v.way);
  CHECK(l2.validCount(0) == 8);
  unsigned resident = 0;
  for (unsigned i = 0; i <= 8; ++i)
    if (l2.probe(i * 64).hit) ++resident;
  CHECK(resident == 8);
}

TEST_CASE("L2 behaviour equals a reference 8-way LRU cache", "[hierarchy]") {
  L2Cache l2(64, 8, 8);
  refmodel::SetAssocLRU ref(64, 8);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100000; ++i) {
    Addr line = (Addr)(rng() % 4096);  // 8x the capacity: heavy conflict
    bool ref_hit = ref.access(line);
    auto p = l2.probe(line);
    REQUIRE(p.hit == ref_hit);
    if (p.hit) {
      l2.touch(line, p.way);
    } else {
      auto v = l2.allocate(line);
      l2.install(line, default_fill(line * 32, 8), false, v.way);
    }
  }
}

TEST_CASE("memory controller timing", "[hierarchy]") {
  MemoryController mc(35, 32, 8);

  SECTION("single line fetch on an idle controller responds at t+35") {
    PacketMeta req;
    req.kind = MsgKind::mem_request;
    req.op = MemOpKind::load_line;
    req.addr = 0x400;
    mc.push(req, /*arrival=*/10);
    // Accepted in the first cycle after arrival.
    for (Cycle c = 10; c <= 11; ++c) {
      mc.accept(c);
      CHECK(mc.due(c).empty());
    }
    std::vector<PacketMeta> got;
    for (Cycle c = 12; c <= 11 + 35; ++c) {
      auto out = mc.due(c);
      got.insert(got.end(), out.begin(), out.end());
    }
    REQUIRE(got.size() == 1);  // due exactly at accept (11) + 35
    CHECK(got[0].words.size() == 8);
    CHECK(got[0].words[0] == 0x400);  // fill pattern
  }

  SECTION("two same-cycle requests are accepted one per cycle") {
    PacketMeta a, b;
    a.kind = b.kind = MsgKind::mem_request;
    a.op = b.op = MemOpKind::load_line;
    a.addr = 0x100;
    b.addr = 0x200;
    mc.push(a, 5);
    mc.push(b, 5);
    std::map<Addr, Cycle> due_at;
    for (Cycle c = 6; c < 50; ++c) {
      mc.accept(c);
      for (auto& r : mc.due(c)) due_at[r.addr & ~31u] = c;
    }
    REQUIRE(due_at.size() == 2);
    CHECK(due_at[0x100] == 6 + 35);
    CHECK(due_at[0x200] == 7 + 35);
  }

  SECTION("writebacks are absorbed with no response") {
    PacketMeta wb;
    wb.kind = MsgKind::writeback;
    wb.op = MemOpKind::store_line;
    wb.addr = 0x800;
    wb.words.assign(9, 0);  // header + 8 words
    for (unsigned i = 0; i < 8; ++i) wb.words[i + 1] = 0xBEEF0000 + i;
    mc.push(wb, 3);
    for (Cycle c = 4; c < 60; ++c) {
      mc.accept(c);
      CHECK(mc.due(c).empty());
    }
    CHECK(mc.writebackCount() == 1);
    CHECK(mc.lineFor(0x800)[3] == 0xBEEF0003);

    // A later read returns the written data.
    PacketMeta rd;
    rd.kind = MsgKind::mem_request;
    rd.op = MemOpKind::load_line;
    rd.addr = 0x800;
    mc.push(rd, 60);
    std::vector<PacketMeta> got;
    for (Cycle c = 61; c < 110; ++c) {
      mc.accept(c);
      for (auto& r : mc.due(c)) got.push_back(r);
    }
    REQUIRE(got.size() == 1);
    CHECK(got[0].words[7] == 0xBEEF0007);
  }
}
