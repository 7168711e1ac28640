#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <variant>
#include <vector>

#include "chainsim/engine.hpp"
#include "chainsim/rng.hpp"

using namespace chainsim;
using namespace chainsim::engine;

// minimal protocol: a single message kind carrying just its item
namespace {

struct Ping {
    Item item;
};
using Msg = std::variant<Ping>;

Simulation<Msg>::DelayFn fixed_delay(Step d) {
    return [d](NodeId, NodeId, std::uint64_t) { return d; };
}

// sends a fixed schedule of pings and remembers everything it receives
class Scripted : public Node<Msg> {
  public:
    struct Send {
        Step at;
        NodeId to;
        ItemId item;
    };

    Scripted(NodeId id, std::vector<Send> plan)
        : Node<Msg>(id), plan_(std::move(plan)) {}

    void handle(StepContext<Msg>& ctx, std::vector<Packet<Msg>> due) override {
        for (auto& p : due) {
            // causality: nothing arrives in the step it was sent
            REQUIRE(ctx.step() > p.sent_step);
            REQUIRE(p.deliver_step == ctx.step());
            received.push_back(p);
        }
        for (const auto& s : plan_)
            if (s.at == ctx.step())
                ctx.send(s.to, Ping{Item{s.item, ctx.self(), ctx.step(), 100}});
    }

    std::vector<Packet<Msg>> received;

  private:
    std::vector<Send> plan_;
};

} // namespace

TEST_CASE("inbox delivers due packets in canonical order, exactly once") {
    Inbox<Msg> inbox;
    auto packet = [](NodeId sender, ItemId item, Step due) {
        return Packet<Msg>{Ping{Item{item, sender, 0, 1}}, sender, 0, 0, due};
    };
    inbox.put(packet(3, 5, 5));
    inbox.put(packet(1, 9, 5));
    inbox.put(packet(1, 2, 5));
    inbox.put(packet(2, 1, 7));

    SECTION("nothing due between occupied steps") {
        REQUIRE(inbox.take_due(6).empty());
        REQUIRE(inbox.size() == 4);
    }

    SECTION("due packets come out sorted by (sender, item)") {
        auto due = inbox.take_due(5);
        REQUIRE(due.size() == 3);
        CHECK(due[0].sender == 1);
        CHECK(item_of(due[0].payload).id == 2);
        CHECK(due[1].sender == 1);
        CHECK(item_of(due[1].payload).id == 9);
        CHECK(due[2].sender == 3);

        // consume-once
        REQUIRE(inbox.take_due(5).empty());
        REQUIRE(inbox.size() == 1);
    }
}

TEST_CASE("packets sent with zero computed delay still arrive next step") {
    Simulation<Msg>::Params params{10, 1.0, IterationOrder::ascending};
    std::vector<std::vector<NodeId>> peers{{1}, {0}};
    Simulation<Msg> sim(params, peers, fixed_delay(0));

    auto* sender = new Scripted(0, {{3, 1, 77}});
    auto* receiver = new Scripted(1, {});
    sim.add_node(std::unique_ptr<Node<Msg>>(sender));
    sim.add_node(std::unique_ptr<Node<Msg>>(receiver));

    EventLog log;
    auto totals = sim.run(log);
    REQUIRE(receiver->received.size() == 1);
    CHECK(receiver->received[0].sent_step == 3);
    CHECK(receiver->received[0].deliver_step == 4);
    CHECK(totals.packets_sent == 1);
    CHECK(totals.packets_delivered == 1);
    CHECK(totals.packets_pending == 0);
}

TEST_CASE("a fixed delay lands the packet exactly delay steps later") {
    Simulation<Msg>::Params params{20, 0.5, IterationOrder::ascending};
    std::vector<std::vector<NodeId>> peers{{1}, {0}};
    Simulation<Msg> sim(params, peers, fixed_delay(3));
    auto* receiver = new Scripted(1, {});
    sim.add_node(std::make_unique<Scripted>(0, std::vector<Scripted::Send>{{0, 1, 8}}));
    sim.add_node(std::unique_ptr<Node<Msg>>(receiver));
    EventLog log;
    sim.run(log);
    REQUIRE(receiver->received.size() == 1);
    CHECK(receiver->received[0].deliver_step == 3);
}

TEST_CASE("sending to a non-peer is an error") {
    Simulation<Msg>::Params params{5, 1.0, IterationOrder::ascending};
    std::vector<std::vector<NodeId>> peers{{1}, {0}, {}};
    Simulation<Msg> sim(params, peers, fixed_delay(1));
    sim.add_node(std::make_unique<Scripted>(0, std::vector<Scripted::Send>{{0, 2, 1}}));
    sim.add_node(std::make_unique<Scripted>(1, std::vector<Scripted::Send>{}));
    sim.add_node(std::make_unique<Scripted>(2, std::vector<Scripted::Send>{}));
    EventLog log;
    REQUIRE_THROWS_AS(sim.run(log), UnknownPeer);
}

TEST_CASE("node ids must be contiguous") {
    Simulation<Msg>::Params params{1, 1.0, IterationOrder::ascending};
    Simulation<Msg> sim(params, {{}, {}}, fixed_delay(1));
    REQUIRE_THROWS_AS(sim.add_node(std::make_unique<Scripted>(
                          1, std::vector<Scripted::Send>{})),
                      InvalidSpec);
}

TEST_CASE("seconds_per_step must be positive") {
    Simulation<Msg>::Params params{1, 0.0, IterationOrder::ascending};
    REQUIRE_THROWS_AS(Simulation<Msg>(params, {}, fixed_delay(1)), InvalidParams);
}

TEST_CASE("a run with zero nodes is vacuous") {
    Simulation<Msg>::Params params{1000, 1.0, IterationOrder::ascending};
    Simulation<Msg> sim(params, {}, fixed_delay(1));
    EventLog log;
    auto totals = sim.run(log);
    CHECK(log.empty());
    CHECK(totals.packets_sent == 0);
}

TEST_CASE("packets still in flight at termination are counted pending") {
    Simulation<Msg>::Params params{5, 1.0, IterationOrder::ascending};
    std::vector<std::vector<NodeId>> peers{{1}, {0}};
    Simulation<Msg> sim(params, peers, fixed_delay(50));
    sim.add_node(std::make_unique<Scripted>(0, std::vector<Scripted::Send>{{0, 1, 1}, {2, 1, 2}}));
    sim.add_node(std::make_unique<Scripted>(1, std::vector<Scripted::Send>{}));
    EventLog log;
    auto totals = sim.run(log);
    CHECK(totals.packets_sent == 2);
    CHECK(totals.packets_delivered == 0);
    CHECK(totals.packets_pending == 2);
    CHECK(totals.packets_sent ==
          totals.packets_delivered + totals.packets_pending);
}

namespace {

// every step: maybe relay to a random peer, and log every receipt; all
// randomness comes from the node's own derived stream
class Chatter : public Node<Msg> {
  public:
    Chatter(NodeId id, std::uint64_t seed)
        : Node<Msg>(id), rng_(RngStream::derive(seed, id, "chatter")) {}

    void handle(StepContext<Msg>& ctx, std::vector<Packet<Msg>> due) override {
        for (auto& p : due)
            ctx.emit(EventKind::BlockReceived, item_of(p.payload).id,
                     FromExtra{p.sender});
        if (!ctx.peers().empty() && rng_.next_bernoulli(0.3)) {
            const auto pick = rng_.next_below(ctx.peers().size());
            ctx.send(ctx.peers()[pick],
                     Ping{Item{make_item_id(ctx.self(), seq_++), ctx.self(),
                               ctx.step(), 64}});
        }
    }

  private:
    RngStream rng_;
    std::uint64_t seq_ = 0;
};

EventLog chatter_run(IterationOrder order, std::uint64_t seed) {
    Simulation<Msg>::Params params{500, 1.0, order};
    std::vector<std::vector<NodeId>> peers{
        {1, 4}, {0, 2}, {1, 3}, {2, 4}, {3, 0}};
    Simulation<Msg> sim(params, peers, fixed_delay(2));
    for (NodeId id = 0; id < 5; ++id)
        sim.add_node(std::make_unique<Chatter>(id, seed));
    EventLog log;
    auto totals = sim.run(log);
    REQUIRE(totals.packets_sent ==
            totals.packets_delivered + totals.packets_pending);
    return log;
}

} // namespace

TEST_CASE("same seed, same log; different seed, different log") {
    const auto a = chatter_run(IterationOrder::ascending, 1234);
    const auto b = chatter_run(IterationOrder::ascending, 1234);
    REQUIRE(a == b);
    REQUIRE(to_jsonl(a) == to_jsonl(b));
    const auto c = chatter_run(IterationOrder::ascending, 1235);
    REQUIRE(a != c);
}

TEST_CASE("iteration order does not change the event log") {
    const auto asc = chatter_run(IterationOrder::ascending, 99);
    const auto desc = chatter_run(IterationOrder::descending, 99);
    REQUIRE(to_jsonl(asc) == to_jsonl(desc));
}
