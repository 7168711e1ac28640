#pragma once

#include <cstdint>
#include <memory>
#include <variant>

#include "chainsim/engine.hpp"
#include "chainsim/ids.hpp"

namespace chainsim::btc {

using BlockId = ItemId;

// only its size matters to the network; sampled, summed, then discarded
struct Transaction {
    std::uint64_t size_bytes = 0;
};

// immutable once mined; nodes share ownership of one copy
struct Block {
    engine::Item item;            // id, origin = miner, created_step, total bytes
    BlockId parent = kGenesisId;
    std::uint32_t height = 0;
    std::uint32_t tx_count = 0;
    std::uint64_t tx_bytes = 0;   // payload without the header

    BlockId id() const { return item.id; }
    NodeId miner() const { return item.origin; }
};

using BlockPtr = std::shared_ptr<const Block>;

inline const BlockPtr& genesis_block(std::uint32_t header_bytes = 80) {
    static const BlockPtr g = [header_bytes] {
        auto b = std::make_shared<Block>();
        b->item = engine::Item{kGenesisId, kNoNode, 0, header_bytes};
        return BlockPtr(std::move(b));
    }();
    return g;
}

// announce a block id
struct InvMsg {
    engine::Item item;
    BlockId block = 0;
};

// ask the announcer for the block body
struct GetDataMsg {
    engine::Item item;
    BlockId block = 0;
};

// the body itself; the message's item mirrors the block's
struct BlockMsg {
    engine::Item item;
    BlockPtr block;
};

using Message = std::variant<InvMsg, GetDataMsg, BlockMsg>;

} // namespace chainsim::btc
