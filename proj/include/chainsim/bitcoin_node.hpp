#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "chainsim/chain.hpp"
#include "chainsim/engine.hpp"
#include "chainsim/miner.hpp"

namespace chainsim::btc {

// wire sizes and payload sampling, shared by every node in a run
struct ProtocolParams {
    TxParams tx;
    std::uint32_t header_bytes = 80;
    std::uint32_t inv_bytes = 61;
    std::uint32_t getdata_bytes = 61;
};

using Ctx = engine::StepContext<Message>;

// A relay node, and a miner when given nonzero power. Per step it first
// consumes every due packet, then makes its single mining attempt, so a block
// heard this step is already the mining parent this step.
//
// Gossip is inv/getdata/block:
//   - a block is announced (Inv) to every peer except its source exactly once,
//     when it is first integrated; this is what keeps Invs from looping
//   - an Inv for an unheld, unrequested block is answered with GetData to the
//     announcer; anything else is ignored
//   - a GetData for a held block is served to the requester; stale requests
//     are dropped silently
//   - a block whose parent is missing waits as an orphan and triggers one
//     GetData for the parent, addressed to whoever delivered the child
class BitcoinNode : public engine::Node<Message> {
  public:
    BitcoinNode(NodeId id, std::uint64_t master_seed, MinerParams miner,
                ProtocolParams proto)
        : engine::Node<Message>(id),
          proto_(proto),
          miner_(miner),
          p_mine_(mining_probability(miner)),
          mine_rng_(RngStream::derive(master_seed, id, "mining")),
          count_rng_(RngStream::derive(master_seed, id, "txcount")),
          size_rng_(RngStream::derive(master_seed, id, "txsize")) {}

    void handle(Ctx& ctx, std::vector<engine::Packet<Message>> due) override {
        for (auto& p : due) {
            const NodeId sender = p.sender;
            std::visit(
                [&](auto& msg) { receive(ctx, sender, std::move(msg)); },
                p.payload);
        }
        mine(ctx);
    }

    const ChainView& view() const { return view_; }
    std::uint64_t blocks_mined() const { return mined_; }

  protected:
    // --- hooks the withholding miner overrides ---

    // block to mine on this step
    virtual BlockPtr mining_parent() const { return view_.tip_block(); }

    // a block this node just mined; default: adopt it and tell everyone
    virtual void on_mined(Ctx& ctx, BlockPtr b) {
        accept_block(ctx, std::move(b), kNoNode);
    }

    // the integrated (public) tip height just rose because of received blocks
    virtual void on_height_advanced(Ctx& ctx) {}

    // --- shared machinery ---

    void receive(Ctx& ctx, NodeId sender, InvMsg msg) {
        if (view_.knows(msg.block) || requested_.count(msg.block)) return;
        send_getdata(ctx, sender, msg.block);
    }

    void receive(Ctx& ctx, NodeId sender, GetDataMsg msg) {
        const BlockPtr* b = view_.find(msg.block);
        if (!b) return; // stale request
        ctx.send(sender, BlockMsg{(*b)->item, *b});
    }

    void receive(Ctx& ctx, NodeId sender, BlockMsg msg) {
        if (view_.knows(msg.block->id())) return; // duplicate body
        source_.emplace(msg.block->id(), sender);
        ctx.emit(EventKind::BlockReceived, msg.block->id(), FromExtra{sender});
        requested_.erase(msg.block->id());
        const BlockPtr blk = msg.block;
        accept_block(ctx, std::move(msg.block), sender);
        if (view_.is_orphan(blk->id()) && !view_.knows(blk->parent) &&
            !requested_.count(blk->parent))
            send_getdata(ctx, sender, blk->parent);
    }

    // Record a block and, for everything that connects, announce and re-aim
    // the miner. `sender` is only used so we never announce back to the source.
    void accept_block(Ctx& ctx, BlockPtr b, NodeId sender) {
        const std::uint32_t before = view_.tip_height();
        auto res = view_.add(std::move(b), ctx.step());
        if (res.duplicate || res.became_orphan) return;
        for (const BlockPtr& nb : res.integrated) {
            NodeId except = kNoNode;
            auto it = source_.find(nb->id());
            if (it != source_.end()) except = it->second;
            announce(ctx, nb->id(), except);
        }
        if (res.tip_changed)
            ctx.emit(EventKind::TipChanged, view_.tip(),
                     TipExtra{view_.tip_height()});
        if (sender != kNoNode && view_.tip_height() > before)
            on_height_advanced(ctx);
    }

    void announce(Ctx& ctx, BlockId block, NodeId except) {
        for (NodeId peer : ctx.peers()) {
            if (peer == except) continue;
            ctx.send(peer, InvMsg{make_item(ctx, proto_.inv_bytes), block});
            ctx.emit(EventKind::InvSent, block, PeerExtra{peer});
        }
    }

    void send_getdata(Ctx& ctx, NodeId to, BlockId block) {
        requested_.insert(block);
        ctx.send(to, GetDataMsg{make_item(ctx, proto_.getdata_bytes), block});
        ctx.emit(EventKind::GetDataSent, block, PeerExtra{to});
    }

    void mine(Ctx& ctx) {
        if (p_mine_ <= 0) return;
        if (!try_mine(mine_rng_, p_mine_)) return;
        const BlockPtr parent = mining_parent();
        BlockPtr b = create_block(parent, id(), next_item_id(), ctx.step(),
                                  count_rng_, size_rng_, proto_.tx,
                                  proto_.header_bytes);
        ++mined_;
        ctx.emit(EventKind::BlockMined, b->id(),
                 MinedExtra{b->parent, b->height, b->tx_count, b->item.size_bytes});
        on_mined(ctx, std::move(b));
    }

    ItemId next_item_id() { return make_item_id(id(), item_seq_++); }

    engine::Item make_item(Ctx& ctx, std::uint32_t bytes) {
        return engine::Item{next_item_id(), id(), ctx.step(), bytes};
    }

    ProtocolParams proto_;
    MinerParams miner_;
    double p_mine_;
    RngStream mine_rng_, count_rng_, size_rng_;
    ChainView view_;
    std::unordered_set<BlockId> requested_;
    std::unordered_map<BlockId, NodeId> source_;
    std::uint64_t item_seq_ = 0;
    std::uint64_t mined_ = 0;
};

} // namespace chainsim::btc
