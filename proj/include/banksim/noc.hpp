/*
 * noc.hpp
 *
 * On-chip networks: the inter-tile mesh with wormhole routing and
 * dimension-ordered (X then Y) paths, per-class physical networks, and
 * credit-based end-to-end flow control for core-to-core connections.
 *
 * Timing convention: a packet injected while its sender executes cycle c has
 * its head delivered to the destination component at cycle c + route_latency,
 * where route_latency = manhattan hops + 1 (the +1 covers injection and
 * ejection together). Intra-tile traffic does not use the mesh; tiles have a
 * non-blocking crossbar handled by the engine with the same one-cycle
 * convention.
 */

#pragma once

#include <array>
#include <deque>
#include <map>
#include <memory>
#include <vector>

#include "banksim/common.hpp"
#include "banksim/config.hpp"
#include "banksim/mem.hpp"

namespace banksim {

inline unsigned route_latency(TileCoord src, TileCoord dst) {
  return (unsigned)manhattan(src, dst) + 1;
}

// The five physical traffic classes: separate networks keep request and
// response traffic from blocking each other in the memory hierarchy.
enum class NetClass : uint8_t {
  core = 0,
  l1_to_l2,
  l2_to_l1,
  l2_to_mem,
  mem_to_l2
};
constexpr unsigned kNetClasses = 5;

inline const char* to_string(NetClass c) {
  switch (c) {
    case NetClass::core: return "core";
    case NetClass::l1_to_l2: return "l1l2req";
    case NetClass::l2_to_l1: return "l2l1resp";
    case NetClass::l2_to_mem: return "l2memreq";
    case NetClass::mem_to_l2: return "meml2resp";
  }
  return "?";
}

struct Port {
  enum class Kind : uint8_t { none, core, bank, l2, memctrl };
  Kind kind = Kind::none;
  uint8_t index = 0;

  bool operator==(const Port&) const = default;
  auto operator<=>(const Port&) const = default;

  static Port core_port(unsigned i) { return {Kind::core, (uint8_t)i}; }
  static Port bank_port(unsigned i) { return {Kind::bank, (uint8_t)i}; }
  static Port l2_port() { return {Kind::l2, 0}; }
  static Port memctrl_port() { return {Kind::memctrl, 0}; }
};

enum class MsgKind : uint8_t {
  core_data,     // SEND payloads and injected instructions
  mem_request,   // word/line requests travelling down the hierarchy
  mem_response,  // word/line data travelling back up
  writeback      // fire-and-forget dirty line data
};

struct PacketMeta {
  MsgKind kind = MsgKind::core_data;
  TileCoord src_tile, dst_tile;
  Port src_port, dst_port;
  unsigned dst_buffer = 0;  // core input buffer when dst_port is a core

  MemOpKind op = MemOpKind::load_word;
  Addr addr = 0;
  unsigned req_words = 0;  // word count for partial line reads (0 = whole line)

  TileCoord reply_tile;  // where the response should go
  Port reply_port;
  unsigned reply_buffer = 0;

  int program = -1;   // issuing program, for statistics attribution
  uint64_t load_seq = 0;
  uint64_t conn_id = 0;     // credited connection, 0 for uncredited traffic
  uint64_t atomic_id = 0;   // packet-scoped bank reservation
  bool atomic_end = false;

  std::vector<Word> words;  // one payload word per flit (padded as needed)
};

struct Packet {
  uint64_t id = 0;
  unsigned flits = 1;
  PacketMeta meta;

  Word word(unsigned idx) const {
    return idx < meta.words.size() ? meta.words[idx] : 0;
  }
};

inline std::shared_ptr<Packet> make_packet(uint64_t id, PacketMeta meta,
                                           unsigned flits) {
  auto p = std::make_shared<Packet>();
  p->id = id;
  p->flits = flits;
  p->meta = std::move(meta);
  return p;
}

// Destination-side acceptor. A refused flit stays in the network (or
// crossbar) and retries next cycle; nothing is ever dropped.
struct FlitSink {
  virtual bool canAccept(const Packet& pkt, unsigned flit_idx,
                         Cycle now) const = 0;
  virtual void deliver(const Packet& pkt, unsigned flit_idx, Cycle now) = 0;
  virtual ~FlitSink() = default;

  bool tryDeliver(const Packet& pkt, unsigned flit_idx, Cycle now) {
    if (!canAccept(pkt, flit_idx, now)) return false;
    deliver(pkt, flit_idx, now);
    return true;
  }
};

// ---------------------------------------------------------------------------
// Credit-based end-to-end flow control (core-to-core connections).
// ---------------------------------------------------------------------------

struct Connection {
  uint64_t id = 0;
  TileCoord src_tile, dst_tile;
  unsigned src_core = 0, dst_core = 0, dst_buffer = 0;
  bool intra_tile = false;  // local connections do not use credits
  bool guaranteed_consumer = false;
  bool open = true;

  unsigned credit_limit = kBufferDepth;
  unsigned credits_available = kBufferDepth;
  unsigned in_flight = 0;           // sent, not yet consumed
  unsigned credits_in_transit = 0;  // consumed, credit still returning

  bool canSend() const { return intra_tile || credits_available > 0; }

  void onSend() {
    if (intra_tile) return;
    if (credits_available == 0)
      throw SimError("send without credits on connection " +
                     std::to_string(id));
    --credits_available;
    ++in_flight;
  }

  void onConsume() {
    if (intra_tile) return;
    if (in_flight > 0) --in_flight;
    ++credits_in_transit;
  }

  void onCreditArrival() {
    if (intra_tile) return;
    if (credits_in_transit > 0) --credits_in_transit;
    if (credits_available < credit_limit) ++credits_available;
  }

  // Credit conservation; holds whenever the limit is not being resized.
  bool conserved() const {
    return intra_tile ||
           credits_available + in_flight + credits_in_transit == credit_limit;
  }
};

// Adjust a connection's credit allowance. Increasing the allowance is only
// safe if the destination is guaranteed to consume everything it receives;
// callers surface the returned warning.
inline std::string set_credits(Connection& conn, unsigned n) {
  if (n < 1) throw ConfigError(0, "credit count must be at least 1");
  std::string warning;
  if (n > conn.credit_limit && !conn.guaranteed_consumer)
    warning = "raising credits on connection " + std::to_string(conn.id) +
              " whose destination is not a declared guaranteed consumer";
  if (n >= conn.credit_limit) {
    conn.credits_available += n - conn.credit_limit;
  } else {
    unsigned drop = conn.credit_limit - n;
    conn.credits_available -= std::min(conn.credits_available, drop);
  }
  conn.credit_limit = n;
  return warning;
}

// All-or-nothing delivery of one flit to a multicast set: either every sink
// accepts in the same cycle ("sent to all cores simultaneously") or the flit
// is deferred for all of them.
inline bool multicast_deliver(std::span<FlitSink* const> sinks,
                              const Packet& pkt, unsigned flit_idx,
                              Cycle now) {
  for (FlitSink* s : sinks)
    if (!s->canAccept(pkt, flit_idx, now)) return false;
  for (FlitSink* s : sinks) s->deliver(pkt, flit_idx, now);
  return true;
}

// ---------------------------------------------------------------------------
// Wormhole mesh, one instance per traffic class.
// ---------------------------------------------------------------------------

class MeshNetwork {
public:
  MeshNetwork(unsigned width, unsigned height,
              unsigned buffer_depth = kBufferDepth)
      : width_(width), height_(height), depth_(buffer_depth),
        routers_(width * height), inject_(width * height),
        link_flits_(width * height * 4, 0) {}

  void registerSink(TileCoord tile, Port port, FlitSink* sink) {
    sinks_[{tile, port}] = sink;
  }

  // Queue a packet for injection at its source tile. The head can reach an
  // adjacent tile's component two cycles after the send cycle.
  void inject(std::shared_ptr<Packet> pkt, Cycle send_cycle) {
    if (pkt->meta.src_tile == pkt->meta.dst_tile)
      throw SimError("mesh inject used for intra-tile traffic");
    active_flits_pending_ += pkt->flits;
    auto& q = inject_[tileIndex(pkt->meta.src_tile)];
    q.push_back(Staged{std::move(pkt), 0, send_cycle});
  }

  void advance(Cycle now) {
    if (activeFlits() == 0) return;
    // Snapshot input occupancy; freed slots become usable next cycle.
    occ_snapshot_.assign(routers_.size() * 5, 0);
    for (size_t r = 0; r < routers_.size(); ++r)
      for (unsigned i = 0; i < 5; ++i)
        occ_snapshot_[r * 5 + i] = (unsigned)routers_[r].in[i].size();

    for (unsigned y = 0; y < height_; ++y)
      for (unsigned x = 0; x < width_; ++x) stepRouter(TileCoord{(int)x, (int)y}, now);

    for (unsigned y = 0; y < height_; ++y)
      for (unsigned x = 0; x < width_; ++x) stepInjection(TileCoord{(int)x, (int)y}, now);
  }

  size_t activeFlits() const { return active_flits_pending_ + active_flits_in_; }

  uint64_t flitsMoved() const { return flits_moved_; }

  // Introspection used by invariant checks.
  unsigned bufferOccupancy(TileCoord tile, unsigned input) const {
    return (unsigned)routers_[tileIndex(tile)].in[input].size();
  }
  unsigned bufferDepth() const { return depth_; }
  const std::vector<uint64_t>& linkFlitCounts() const { return link_flits_; }

  // Optional per-link transfer log for wormhole-exclusivity checks.
  struct LinkEvent {
    Cycle cycle;
    TileCoord tile;
    unsigned dir;
    uint64_t packet;
    unsigned flit;
    bool eop;
  };
  void enableLog() { log_enabled_ = true; }
  const std::vector<LinkEvent>& log() const { return log_; }

private:
  // Input buffer indices: 0..3 = from N,S,E,W; 4 = local injection.
  static constexpr unsigned kLocal = 4;
  // Directions: 0=N (y-1), 1=S (y+1), 2=E (x+1), 3=W (x-1).

  struct FlitRef {
    std::shared_ptr<Packet> pkt;
    unsigned idx = 0;
    Cycle arrived = 0;
  };

  struct Staged {
    std::shared_ptr<Packet> pkt;
    unsigned next = 0;
    Cycle staged;
  };

  struct Router {
    std::array<std::deque<FlitRef>, 5> in;
    std::array<uint64_t, 4> out_owner{};  // packet owning each output link
    std::array<bool, 4> out_used{};       // per-cycle bandwidth
  };

  unsigned width_, height_, depth_;
  std::vector<Router> routers_;
  std::vector<std::deque<Staged>> inject_;
  std::map<std::pair<TileCoord, Port>, FlitSink*> sinks_;
  std::vector<unsigned> occ_snapshot_;
  std::vector<uint64_t> link_flits_;
  size_t active_flits_pending_ = 0;  // staged, not yet in routers
  size_t active_flits_in_ = 0;       // inside router buffers
  uint64_t flits_moved_ = 0;
  bool log_enabled_ = false;
  std::vector<LinkEvent> log_;

  size_t tileIndex(TileCoord t) const { return (size_t)t.y * width_ + t.x; }

  TileCoord neighbour(TileCoord t, unsigned dir) const {
    switch (dir) {
      case 0: return {t.x, t.y - 1};
      case 1: return {t.x, t.y + 1};
      case 2: return {t.x + 1, t.y};
      default: return {t.x - 1, t.y};
    }
  }

  static unsigned opposite(unsigned dir) { return dir ^ 1u; }  // N<->S, E<->W

  // Dimension-ordered: correct X before Y.
  unsigned routeDir(TileCoord here, TileCoord dst) const {
    if (dst.x > here.x) return 2;
    if (dst.x < here.x) return 3;
    if (dst.y > here.y) return 1;
    return 0;
  }

  FlitSink* sinkFor(const Packet& pkt) const {
    auto it = sinks_.find({pkt.meta.dst_tile, pkt.meta.dst_port});
    if (it == sinks_.end())
      throw SimError("no sink registered for packet destination at tile " +
                     to_string(pkt.meta.dst_tile));
    return it->second;
  }

  // Try to move one flit from input buffer `input` of `tile`; returns true
  // if a flit crossed a link.
  bool tryMoveHead(TileCoord tile, unsigned input, Cycle now) {
    Router& r = routers_[tileIndex(tile)];
    auto& buf = r.in[input];
    if (buf.empty()) return false;
    FlitRef& f = buf.front();
    if (f.arrived >= now) return false;  // landed this cycle; moves next cycle

    unsigned dir = routeDir(tile, f.pkt->meta.dst_tile);
    if (r.out_used[dir]) return false;
    if (r.out_owner[dir] != 0 && r.out_owner[dir] != f.pkt->id) return false;
    if (r.out_owner[dir] == 0 && f.idx != 0) return false;  // mid-packet stray

    TileCoord nb = neighbour(tile, dir);
    bool is_final = nb == f.pkt->meta.dst_tile;
    bool moved = false;
    if (is_final) {
      FlitSink* sink = sinkFor(*f.pkt);
      moved = sink->tryDeliver(*f.pkt, f.idx, now);
      if (moved) --active_flits_in_;
    } else {
      Router& nr = routers_[tileIndex(nb)];
      unsigned nb_input = opposite(dir);
      if (occ_snapshot_[tileIndex(nb) * 5 + nb_input] < depth_) {
        nr.in[nb_input].push_back(FlitRef{f.pkt, f.idx, now});
        moved = true;
      }
    }
    if (!moved) return false;

    bool eop = f.idx + 1 == f.pkt->flits;
    r.out_used[dir] = true;
    r.out_owner[dir] = eop ? 0 : f.pkt->id;
    ++flits_moved_;
    ++link_flits_[tileIndex(tile) * 4 + dir];
    if (log_enabled_)
      log_.push_back(LinkEvent{now, tile, dir, f.pkt->id, f.idx, eop});
    buf.pop_front();
    return true;
  }

  void stepRouter(TileCoord tile, Cycle now) {
    Router& r = routers_[tileIndex(tile)];
    r.out_used.fill(false);
    // Fixed input priority: through-traffic from N,S,E,W, then local.
    for (unsigned input = 0; input < 5; ++input) {
      // Each input may send at most one flit per cycle.
      tryMoveHead(tile, input, now);
    }
  }

  void stepInjection(TileCoord tile, Cycle now) {
    auto& q = inject_[tileIndex(tile)];
    if (q.empty()) return;
    Staged& s = q.front();
    if (s.staged >= now) return;
    Router& r = routers_[tileIndex(tile)];
    if (occ_snapshot_[tileIndex(tile) * 5 + kLocal] >= depth_) return;
    r.in[kLocal].push_back(FlitRef{s.pkt, s.next, now});
    --active_flits_pending_;
    ++active_flits_in_;
    ++flits_moved_;
    if (++s.next == s.pkt->flits) q.pop_front();
  }
};

}  // namespace banksim
