#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "banksim/config.hpp"
#include "reference_models.hpp"

using namespace banksim;

TEST_CASE("minimal document yields all defaults", "[config]") {
  SystemConfig cfg = parse_config("tiles = 4x4\n");
  CHECK(cfg.mesh_width == 4);
  CHECK(cfg.mesh_height == 4);
  CHECK(cfg.cores_per_tile == 8);
  CHECK(cfg.banks_per_tile == 8);
  CHECK(cfg.bank_bytes == 2048);
  CHECK(cfg.line_bytes == 32);
  CHECK(cfg.word_bytes == 4);
  CHECK(cfg.main_memory_latency == 35);
  CHECK(cfg.default_credits == 4);
  CHECK(cfg.memctrl_tile == TileCoord{0, 0});
  CHECK(cfg.l2_tiles.empty());
  CHECK(cfg.directory.entry_count == 16);
  CHECK(cfg.programs.empty());
  CHECK(cfg.wordsPerLine() == 8);
  CHECK(cfg.linesPerBank() == 64);
}

TEST_CASE("misaligned group is rejected naming the invariant", "[config]") {
  std::string doc =
      "[program.0]\n"
      "tile = 1,1\n"
      "trace = t.trc\n"
      "inst = bank:3,2,cache\n";
  try {
    parse_config(doc);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("not aligned") != std::string::npos);
  }
}

TEST_CASE("explicit main memory latency is honoured", "[config]") {
  SystemConfig cfg = parse_config("main_memory_latency = 35\n");
  CHECK(cfg.main_memory_latency == 35);
  cfg = parse_config("main_memory_latency = 90\n");
  CHECK(cfg.main_memory_latency == 90);
}

TEST_CASE("syntax errors carry line numbers", "[config]") {
  try {
    parse_config("tiles = 4x4\nnonsense without equals\n");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_config("[system]\ntiles = 4x4\nbanana = 1\n");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("full document round trip", "[config]") {
  std::string doc =
      "# sample\n"
      "[system]\n"
      "tiles = 4x4\n"
      "main_memory_latency = 35\n"
      "memctrl_tile = 0,0\n"
      "l2_tiles = 2,1 1,2\n"
      "[directory]\n"
      "index_bits_at = 12\n"
      "entries = 16\n"
      "entry.5 = l2:2,1,0x3\n"
      "entry.6 = mem,0x0\n"
      "[program.0]\n"
      "tile = 1,1\n"
      "core = 0\n"
      "trace = traces/a.trc\n"
      "inst = bank:0,2,cache\n"
      "data = bank:4,4,scratchpad\n"
      "chan.3 = core:1,1,3,2\n"
      "credits.3 = 8\n"
      "chan.4 = mcast:0b00001100\n";
  SystemConfig cfg = parse_config(doc);
  REQUIRE(cfg.programs.size() == 1);
  const auto& p = cfg.programs[0];
  CHECK(p.tile == TileCoord{1, 1});
  CHECK(p.trace_path == "traces/a.trc");
  REQUIRE(p.cmt[kCmtInstSlot]);
  CHECK(p.cmt[kCmtInstSlot]->group.size == 2);
  REQUIRE(p.cmt[kCmtDataSlot]);
  CHECK(p.cmt[kCmtDataSlot]->group.mode == BankMode::scratchpad);
  REQUIRE(p.cmt[3]);
  CHECK(p.cmt[3]->kind == ChannelMapEntry::Kind::remote_core);
  CHECK(p.cmt[3]->remote.credit_limit == 8);
  REQUIRE(p.cmt[4]);
  CHECK(p.cmt[4]->multicast_mask == 0b00001100);
  CHECK(cfg.directory.entries[5].to_memory == false);
  CHECK(cfg.directory.entries[5].l2_tile == TileCoord{2, 1});
  CHECK(cfg.directory.entries[5].substitute_bits == 3);
  CHECK(cfg.directory.entries[0].to_memory == true);
}

TEST_CASE("programs cannot live on l2 tiles", "[config]") {
  std::string doc =
      "l2_tiles = 1,1\n"
      "[program.0]\n"
      "tile = 1,1\n"
      "trace = t.trc\n";
  CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("mixed-mode overlap is rejected, same-mode overlap allowed",
          "[config]") {
  std::string base =
      "[program.0]\n"
      "tile = 1,1\n"
      "trace = t.trc\n"
      "inst = bank:0,4,cache\n";
  CHECK_THROWS_AS(parse_config(base + "data = bank:0,2,scratchpad\n"),
                  ConfigError);
  CHECK_NOTHROW(parse_config(base + "data = bank:0,2,cache\n"));
}

TEST_CASE("directory validation", "[config]") {
  CHECK_THROWS_AS(parse_config("[directory]\nentries = 12\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[directory]\nindex_bits_at = 30\n"),
                  ConfigError);
  // Entry targeting a tile that is not an L2 tile.
  CHECK_THROWS_AS(parse_config("[directory]\nentry.0 = l2:2,2,0\n"),
                  ConfigError);
}

TEST_CASE("channel map update round trip and rejection", "[config]") {
  CmtTable cmt;
  auto entry = ChannelMapEntry::forRemote(
      RemoteCoreTarget{TileCoord{1, 0}, 3, 2, 4, false});
  auto d = cmt.update(2, entry, 8, 8);
  CHECK_FALSE(d.flush_needed);
  REQUIRE(cmt.get(2));
  CHECK(*cmt.get(2) == entry);

  // Invalid entry: rejected, table unchanged.
  MemoryGroupConfig bad;
  bad.base_bank = 3;
  bad.size = 2;
  CHECK_THROWS_AS(cmt.update(2, ChannelMapEntry::forGroup(bad), 8, 8),
                  ConfigError);
  CHECK(*cmt.get(2) == entry);

  CHECK_THROWS_AS(cmt.update(9, entry, 8, 8), ConfigError);
}

TEST_CASE("flush decision on group replacement", "[config]") {
  CmtTable cmt;
  MemoryGroupConfig g;
  g.base_bank = 0;
  g.size = 4;
  g.mode = BankMode::cache;
  cmt.update(1, ChannelMapEntry::forGroup(g), 8, 8);

  SECTION("same banks, same mode: no flush") {
    auto d = cmt.update(1, ChannelMapEntry::forGroup(g), 8, 8);
    CHECK_FALSE(d.flush_needed);
  }
  SECTION("shrinking the group flushes") {
    MemoryGroupConfig h = g;
    h.size = 2;
    auto d = cmt.update(1, ChannelMapEntry::forGroup(h), 8, 8);
    CHECK(d.flush_needed);
    CHECK(d.old_group == g);
  }
  SECTION("mode change flushes") {
    MemoryGroupConfig h = g;
    h.mode = BankMode::scratchpad;
    CHECK(cmt.update(1, ChannelMapEntry::forGroup(h), 8, 8).flush_needed);
  }
  SECTION("replacing with a core channel flushes") {
    auto e = ChannelMapEntry::forRemote(RemoteCoreTarget{TileCoord{0, 0}, 0, 2});
    CHECK(cmt.update(1, e, 8, 8).flush_needed);
  }
  SECTION("outgoing scratchpad group never flushes") {
    MemoryGroupConfig sp = g;
    sp.mode = BankMode::scratchpad;
    CmtTable t2;
    t2.update(1, ChannelMapEntry::forGroup(sp), 8, 8);
    auto e = ChannelMapEntry::forRemote(RemoteCoreTarget{TileCoord{0, 0}, 0, 2});
    CHECK_FALSE(t2.update(1, e, 8, 8).flush_needed);
  }
}

// ---------------------------------------------------------------------------
// Configuration family enumerations against the brute-force generators.
// ---------------------------------------------------------------------------

TEST_CASE("single-program family counts", "[config]") {
  CHECK(enumerate_single_program_configs(8).size() == 13);
  CHECK(enumerate_single_program_configs(1).size() == 1);
  CHECK(enumerate_single_program_configs(2).size() == 3);
  CHECK(enumerate_single_program_configs(4).size() ==
        refmodel::bruteForceSingle(4).size());
  CHECK(enumerate_single_program_configs(8).size() ==
        refmodel::bruteForceSingle(8).size());
}

TEST_CASE("single-program family matches brute force shape for shape",
          "[config]") {
  for (unsigned banks : {1u, 2u, 4u, 8u}) {
    auto family = enumerate_single_program_configs(banks);
    std::set<std::tuple<bool, unsigned, unsigned>> shapes;
    for (const auto& p : family) {
      CHECK_NOTHROW(p.validate(8));
      shapes.insert({p.programs[0].unified, p.programs[0].inst.size,
                     p.programs[0].data.size});
    }
    CHECK(shapes.size() == family.size());  // no duplicates
    CHECK(shapes == refmodel::bruteForceSingle(banks));
  }
}

TEST_CASE("pair family matches brute force and contains known members",
          "[config]") {
  auto family = enumerate_pair_configs(8);
  std::set<refmodel::PairShape> shapes;
  for (const auto& p : family) {
    CHECK_NOTHROW(p.validate(8));
    REQUIRE(p.programs.size() == 2);
    shapes.insert(refmodel::PairShape{
        p.programs[0].unified, p.programs[1].unified, p.shared_unified,
        p.shared_inst && !p.shared_unified, p.shared_data && !p.shared_unified,
        p.programs[0].inst.size, p.programs[0].data.size,
        p.programs[1].inst.size, p.programs[1].data.size});
  }
  CHECK(shapes.size() == family.size());
  CHECK(shapes == refmodel::bruteForcePair());

  // Spec'd members: both private unified 4+4; one shared unified 8-bank
  // group; A split 2+2 private with B unified 4 private.
  auto has = [&](refmodel::PairShape s) { return shapes.count(s) == 1; };
  CHECK(has({true, true, false, false, false, 4, 4, 4, 4}));
  CHECK(has({true, true, true, false, false, 8, 8, 8, 8}));
  CHECK(has({false, true, false, false, false, 2, 2, 4, 4}));
}

TEST_CASE("enumeration order is deterministic", "[config]") {
  auto a = enumerate_pair_configs(8);
  auto b = enumerate_pair_configs(8);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].label() == b[i].label());
}

TEST_CASE("pair placements never collide except when shared", "[config]") {
  for (const auto& p : enumerate_pair_configs(8)) {
    std::vector<MemoryGroupConfig> groups;
    std::vector<std::pair<unsigned, unsigned>> seen;
    for (const auto& pg : p.programs) {
      groups.push_back(pg.inst);
      if (!pg.unified) groups.push_back(pg.data);
    }
    for (size_t i = 0; i < groups.size(); ++i)
      for (size_t j = i + 1; j < groups.size(); ++j)
        if (groups[i].overlaps(groups[j]))
          CHECK(groups[i].sameBanks(groups[j]));
  }
}
