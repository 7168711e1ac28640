#pragma once

#include <cstdint>
#include <deque>

#include "chainsim/bitcoin_node.hpp"

namespace chainsim::btc {

// Counters the attacker keeps about its own campaign. gamma is the share of
// races (equal-height standoffs it created) that honest miners resolved in
// its favor; it is an emergent property of propagation, measured rather than
// configured.
struct AttackerStats {
    std::uint64_t blocks_published = 0;
    std::uint64_t races_started = 0;
    std::uint64_t races_resolved_by_honest = 0; // honest block ended the race
    std::uint64_t races_on_attacker_branch = 0; //   ... by extending our block
    std::uint64_t races_won_by_mining = 0;      // we found the next block first
    std::uint32_t max_lead = 0;

    double gamma() const {
        return races_resolved_by_honest == 0
                   ? 0.0
                   : static_cast<double>(races_on_attacker_branch) /
                         static_cast<double>(races_resolved_by_honest);
    }
};

// Block-withholding miner. It mines on a private branch and reveals blocks
// only when the public chain forces its hand:
//
//   public chain catches up to one behind  ->  reveal one block at that height
//   public chain catches up to two behind  ->  reveal the whole branch (override)
//   public chain ties the private tip      ->  reveal everything and race
//   public chain passes the private tip    ->  abandon the branch, mine honestly
//
// During a race the attacker mines on its own published block; if it finds the
// next block it publishes immediately and takes both, if an honest block
// resolves the race the round is over either way. Honest traffic is relayed
// normally; only the attacker's own blocks are ever withheld.
class SelfishMiner final : public BitcoinNode {
  public:
    using BitcoinNode::BitcoinNode;

    const AttackerStats& stats() const { return stats_; }

  protected:
    BlockPtr mining_parent() const override {
        return branch_tip_ ? branch_tip_ : view_.tip_block();
    }

    void on_mined(Ctx& ctx, BlockPtr b) override {
        if (in_race_) {
            // extends our published race block; revealing it settles the race
            publish(ctx, std::move(b));
            ++stats_.races_won_by_mining;
            in_race_ = false;
            branch_tip_ = nullptr;
            return;
        }
        branch_tip_ = b;
        unpublished_.push_back(std::move(b));
        const std::uint32_t lead = branch_tip_->height - view_.tip_height();
        if (lead > stats_.max_lead) stats_.max_lead = lead;
    }

    void on_height_advanced(Ctx& ctx) override {
        const std::uint32_t pub = view_.tip_height();

        if (in_race_) {
            // height rose off a received block, so an honest miner ended the race
            ++stats_.races_resolved_by_honest;
            if (tip_descends_from_race_block())
                ++stats_.races_on_attacker_branch;
            in_race_ = false;
            branch_tip_ = nullptr; // round over on either branch
            return;
        }
        if (!branch_tip_) return; // nothing withheld, plain honest adoption

        const std::uint32_t priv = branch_tip_->height;
        if (priv < pub) {
            // outrun; the withheld blocks are dead weight now
            unpublished_.clear();
            branch_tip_ = nullptr;
        } else if (priv == pub) {
            // tie: show everything and fight for the next block
            publish_through(ctx, priv);
            in_race_ = true;
            race_block_ = branch_tip_->id();
            race_height_ = priv;
            ++stats_.races_started;
        } else if (priv == pub + 1) {
            // one ahead: reveal the full branch, public chain is overridden
            publish_through(ctx, priv);
            branch_tip_ = nullptr;
        } else {
            // comfortable lead: reveal just enough to match the public height
            publish_through(ctx, pub);
        }
    }

  private:
    void publish(Ctx& ctx, BlockPtr b) {
        ++stats_.blocks_published;
        accept_block(ctx, std::move(b), kNoNode);
    }

    void publish_through(Ctx& ctx, std::uint32_t height) {
        while (!unpublished_.empty() && unpublished_.front()->height <= height) {
            BlockPtr b = std::move(unpublished_.front());
            unpublished_.pop_front();
            publish(ctx, std::move(b));
        }
    }

    bool tip_descends_from_race_block() const {
        const Block* cur = view_.tip_block().get();
        while (cur->height > race_height_)
            cur = view_.find(cur->parent)->get();
        return cur->id() == race_block_;
    }

    std::deque<BlockPtr> unpublished_; // private branch, oldest first
    BlockPtr branch_tip_;              // last private block; null = no branch
    bool in_race_ = false;
    BlockId race_block_ = kGenesisId;
    std::uint32_t race_height_ = 0;
    AttackerStats stats_;
};

} // namespace chainsim::btc
