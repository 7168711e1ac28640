#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "chainsim/errors.hpp"
#include "chainsim/event_log.hpp"
#include "chainsim/ids.hpp"

// Discrete-step network kernel. Time is an integer step counter; each step,
// every node's handler runs exactly once and sees exactly the packets whose
// delivery step came due. A handler may read and write only its own state,
// draw from its own rng streams, and send packets that arrive no earlier than
// the next step. Under those rules the outcome is independent of the order
// nodes are iterated in, which run() lets you permute to prove it.

namespace chainsim::engine {

// every payload carries one of these; ids come from make_item_id
struct Item {
    ItemId id{};
    NodeId origin{kNoNode};
    Step created_step{};
    std::uint64_t size_bytes{};
};

// Message types are std::variant over structs that each expose a `.item`
// member; this is the only thing the kernel needs from a protocol.
template <typename Message>
const Item& item_of(const Message& m) {
    return std::visit([](const auto& alt) -> const Item& { return alt.item; }, m);
}

template <typename Message>
struct Packet {
    Message payload;
    NodeId sender{};
    NodeId recipient{};
    Step sent_step{};
    Step deliver_step{};
};

// Per-node mailbox, keyed by delivery step. Insertion order reflects the
// schedule and is deliberately forgotten: consumption sorts by
// (sender id, item id), the canonical order every permutation agrees on.
template <typename Message>
class Inbox {
  public:
    void put(Packet<Message> p) {
        pending_[p.deliver_step].push_back(std::move(p));
        ++count_;
    }

    // all packets due exactly at `step`, canonically ordered, removed
    std::vector<Packet<Message>> take_due(Step step) {
        auto it = pending_.find(step);
        if (it == pending_.end()) return {};
        std::vector<Packet<Message>> due = std::move(it->second);
        pending_.erase(it);
        count_ -= due.size();
        std::sort(due.begin(), due.end(),
                  [](const Packet<Message>& a, const Packet<Message>& b) {
                      const ItemId ia = item_of(a.payload).id;
                      const ItemId ib = item_of(b.payload).id;
                      return a.sender != b.sender ? a.sender < b.sender : ia < ib;
                  });
        return due;
    }

    std::size_t size() const { return count_; }

  private:
    std::map<Step, std::vector<Packet<Message>>> pending_;
    std::size_t count_ = 0;
};

struct SimClock {
    Step current_step = 0;
    double seconds_per_step = 1.0;
};

enum class IterationOrder { ascending, descending };

template <typename Message>
class Simulation;

// handler-side view of the kernel: what step it is, who my peers are,
// and the two effects a node may have (send a packet, log an event)
template <typename Message>
class StepContext {
  public:
    Step step() const { return step_; }
    NodeId self() const { return self_; }
    double seconds_per_step() const { return sim_->clock().seconds_per_step; }
    std::span<const NodeId> peers() const { return sim_->peers_of(self_); }
    void send(NodeId to, Message msg) { sim_->send(self_, to, std::move(msg)); }
    void emit(EventKind kind, ItemId item, EventExtra extra) {
        sim_->emit(self_, kind, item, std::move(extra));
    }

  private:
    friend class Simulation<Message>;
    StepContext(Simulation<Message>* sim, NodeId self, Step step)
        : sim_(sim), self_(self), step_(step) {}
    Simulation<Message>* sim_;
    NodeId self_;
    Step step_;
};

template <typename Message>
class Node {
  public:
    explicit Node(NodeId id) : id_(id) {}
    virtual ~Node() = default;
    NodeId id() const { return id_; }

    // once per step: `due` holds this step's deliveries in canonical order
    virtual void handle(StepContext<Message>& ctx,
                        std::vector<Packet<Message>> due) = 0;

  private:
    NodeId id_;
};

template <typename Message>
class Simulation {
  public:
    // steps a packet of `bytes` takes from one node to another; the kernel
    // clamps the result to at least 1 so nothing arrives within its own step
    using DelayFn = std::function<Step(NodeId, NodeId, std::uint64_t)>;

    struct Params {
        Step total_steps = 0;
        double seconds_per_step = 1.0;
        IterationOrder order = IterationOrder::ascending;
    };

    struct Totals {
        std::uint64_t packets_sent = 0;
        std::uint64_t packets_delivered = 0;
        std::uint64_t packets_pending = 0;
    };

    Simulation(Params params, std::vector<std::vector<NodeId>> peers, DelayFn delay)
        : params_(params), peers_(std::move(peers)), delay_(std::move(delay)) {
        if (params_.seconds_per_step <= 0.0)
            throw InvalidParams("seconds_per_step must be positive");
        clock_.seconds_per_step = params_.seconds_per_step;
        for (auto& list : peers_) std::sort(list.begin(), list.end());
    }

    // nodes must arrive in id order, ids 0..N-1
    void add_node(std::unique_ptr<Node<Message>> node) {
        if (node->id() != nodes_.size())
            throw InvalidSpec("node ids must be contiguous from 0");
        nodes_.push_back(std::move(node));
    }

    std::size_t node_count() const { return nodes_.size(); }
    const SimClock& clock() const { return clock_; }
    Node<Message>& node(NodeId id) { return *nodes_.at(id); }

    std::span<const NodeId> peers_of(NodeId id) const { return peers_.at(id); }

    // Runs every step, appending events to `log`. Events within a step are
    // flushed in ascending node id, and each node's own emissions keep their
    // order, so the log bytes do not depend on the iteration order used.
    Totals run(EventLog& log) {
        if (peers_.size() != nodes_.size())
            throw InvalidSpec("adjacency size does not match node count");
        const std::size_t n = nodes_.size();
        inboxes_.clear();
        inboxes_.resize(n);
        step_events_.assign(n, {});

        for (Step t = 0; t < params_.total_steps; ++t) {
            clock_.current_step = t;
            for (std::size_t k = 0; k < n; ++k) {
                const NodeId id = static_cast<NodeId>(
                    params_.order == IterationOrder::ascending ? k : n - 1 - k);
                auto due = inboxes_[id].take_due(t);
                totals_.packets_delivered += due.size();
                StepContext<Message> ctx(this, id, t);
                nodes_[id]->handle(ctx, std::move(due));
            }
            for (std::size_t id = 0; id < n; ++id) {
                auto& buf = step_events_[id];
                log.insert(log.end(), std::make_move_iterator(buf.begin()),
                           std::make_move_iterator(buf.end()));
                buf.clear();
            }
        }

        totals_.packets_pending = 0;
        for (const auto& ib : inboxes_) totals_.packets_pending += ib.size();
        return totals_;
    }

  private:
    friend class StepContext<Message>;

    void send(NodeId from, NodeId to, Message msg) {
        const auto& plist = peers_[from];
        if (!std::binary_search(plist.begin(), plist.end(), to))
            throw UnknownPeer("node " + std::to_string(from) +
                              " has no edge to " + std::to_string(to));
        const std::uint64_t bytes = item_of(msg).size_bytes;
        const Step delay = std::max<Step>(1, delay_(from, to, bytes));
        Packet<Message> p{std::move(msg), from, to, clock_.current_step,
                          clock_.current_step + delay};
        inboxes_[to].put(std::move(p));
        ++totals_.packets_sent;
    }

    void emit(NodeId node, EventKind kind, ItemId item, EventExtra extra) {
        step_events_[node].push_back(
            Event{clock_.current_step, kind, node, item, std::move(extra)});
    }

    Params params_;
    SimClock clock_;
    std::vector<std::vector<NodeId>> peers_;
    DelayFn delay_;
    std::vector<std::unique_ptr<Node<Message>>> nodes_;
    std::vector<Inbox<Message>> inboxes_;
    std::vector<std::vector<Event>> step_events_;
    Totals totals_;
};

} // namespace chainsim::engine
