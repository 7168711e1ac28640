#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chainsim/blocks.hpp"
#include "chainsim/ids.hpp"

namespace chainsim::btc {

// One node's knowledge of the block tree.
//
// A block is "held" once it arrives in any form and "integrated" once its
// whole ancestry down to genesis is held; blocks with a missing ancestor wait
// in the orphan pool. The tip is the best integrated block under the order
//   higher height, then earlier first_seen, then smaller id
// which is a strict total order because ids are unique, so fork choice never
// depends on what order candidates were examined in.
class ChainView {
  public:
    ChainView() {
        const BlockPtr& g = genesis_block();
        blocks_.emplace(g->id(), g);
        first_seen_.emplace(g->id(), 0);
        tip_ = g;
    }

    bool knows(BlockId id) const { return blocks_.count(id) != 0; }
    bool is_orphan(BlockId id) const { return orphans_.count(id) != 0; }
    bool integrated(BlockId id) const { return knows(id) && !is_orphan(id); }

    const BlockPtr* find(BlockId id) const {
        auto it = blocks_.find(id);
        return it == blocks_.end() ? nullptr : &it->second;
    }

    const BlockPtr& tip_block() const { return tip_; }
    BlockId tip() const { return tip_->id(); }
    std::uint32_t tip_height() const { return tip_->height; }

    Step first_seen(BlockId id) const { return first_seen_.at(id); }

    std::size_t held_count() const { return blocks_.size(); }
    std::size_t orphan_count() const { return orphans_.size(); }

    const std::unordered_map<BlockId, BlockPtr>& held() const { return blocks_; }
    const std::unordered_set<BlockId>& orphans() const { return orphans_; }

    struct AddResult {
        bool duplicate = false;
        bool became_orphan = false;
        std::vector<BlockPtr> integrated; // cascade, parents before children
        bool tip_changed = false;
    };

    // Record a block seen now. Duplicates are ignored entirely (first_seen is
    // first arrival). Integrating a block may connect waiting orphans; the
    // cascade resolves them in ascending id order, which only affects event
    // ordering, never the resulting view.
    AddResult add(BlockPtr b, Step now) {
        AddResult res;
        const BlockId id = b->id();
        if (knows(id)) {
            res.duplicate = true;
            return res;
        }
        blocks_.emplace(id, b);
        first_seen_.emplace(id, now);

        if (!integrated(b->parent)) {
            orphans_.insert(id);
            waiting_on_[b->parent].push_back(id);
            res.became_orphan = true;
            return res;
        }

        const BlockId old_tip = tip_->id();
        integrate(std::move(b), res.integrated);
        res.tip_changed = tip_->id() != old_tip;
        return res;
    }

  private:
    void integrate(BlockPtr b, std::vector<BlockPtr>& out) {
        consider_tip(b);
        out.push_back(b);
        auto it = waiting_on_.find(b->id());
        if (it == waiting_on_.end()) return;
        std::vector<BlockId> children = std::move(it->second);
        waiting_on_.erase(it);
        std::sort(children.begin(), children.end());
        for (BlockId c : children) {
            orphans_.erase(c);
            integrate(blocks_.at(c), out);
        }
    }

    void consider_tip(const BlockPtr& cand) {
        const Step cand_seen = first_seen_.at(cand->id());
        const Step tip_seen = first_seen_.at(tip_->id());
        if (cand->height != tip_->height) {
            if (cand->height > tip_->height) tip_ = cand;
        } else if (cand_seen != tip_seen) {
            if (cand_seen < tip_seen) tip_ = cand;
        } else if (cand->id() < tip_->id()) {
            tip_ = cand;
        }
    }

    std::unordered_map<BlockId, BlockPtr> blocks_;
    std::unordered_set<BlockId> orphans_;
    std::unordered_map<BlockId, Step> first_seen_;
    std::unordered_map<BlockId, std::vector<BlockId>> waiting_on_;
    BlockPtr tip_;
};

// Declarative fork choice: scan every integrated block and pick the best
// under (height desc, first_seen asc, id asc). The view keeps its tip current
// incrementally; this full scan exists as the reference the incremental path
// is tested against.
inline BlockId choose_tip(const ChainView& view) {
    const Block* best = nullptr;
    Step best_seen = 0;
    for (const auto& [id, b] : view.held()) {
        if (view.is_orphan(id)) continue;
        const Step seen = view.first_seen(id);
        if (!best) {
            best = b.get();
            best_seen = seen;
            continue;
        }
        bool better = false;
        if (b->height != best->height)
            better = b->height > best->height;
        else if (seen != best_seen)
            better = seen < best_seen;
        else
            better = b->id() < best->id();
        if (better) {
            best = b.get();
            best_seen = seen;
        }
    }
    return best->id();
}

} // namespace chainsim::btc
