#pragma once

#include <cstdint>

namespace chainsim {

using NodeId = std::uint32_t;
using Step = std::uint64_t;
using ItemId = std::uint64_t;

// sentinel for "no node" (genesis has no miner, some events have no peer)
inline constexpr NodeId kNoNode = 0xffffffffu;

// the genesis block's id; all other ids are strictly greater
inline constexpr ItemId kGenesisId = 0;

// Item ids encode (creator, per-creator sequence). Two reasons:
//  - no shared counter, so an id never depends on the order nodes ran in
//  - ids stay below 2^53 for any realistic network, so they survive a trip
//    through JSON doubles exactly
inline constexpr ItemId make_item_id(NodeId creator, std::uint64_t seq) {
    return (static_cast<ItemId>(creator) + 1) << 24 | seq;
}

} // namespace chainsim
