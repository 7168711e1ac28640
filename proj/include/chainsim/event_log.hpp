#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "chainsim/errors.hpp"
#include "chainsim/ids.hpp"

namespace chainsim {

enum class EventKind : std::uint8_t {
    BlockMined,
    InvSent,
    GetDataSent,
    BlockReceived,
    TipChanged,
};

inline const char* to_string(EventKind k) {
    switch (k) {
    case EventKind::BlockMined: return "BLOCK_MINED";
    case EventKind::InvSent: return "INV_SENT";
    case EventKind::GetDataSent: return "GETDATA_SENT";
    case EventKind::BlockReceived: return "BLOCK_RECEIVED";
    case EventKind::TipChanged: return "TIP_CHANGED";
    }
    return "?";
}

// kind-specific payloads; kept small because full-scale runs log millions of rows
struct MinedExtra {
    ItemId parent{};
    std::uint32_t height{};
    std::uint32_t tx_count{};
    std::uint64_t size_bytes{};
    bool operator==(const MinedExtra&) const = default;
};

// peer an Inv or GetData went to
struct PeerExtra {
    NodeId peer{};
    bool operator==(const PeerExtra&) const = default;
};

// who delivered the block
struct FromExtra {
    NodeId from{};
    bool operator==(const FromExtra&) const = default;
};

// height of the new tip
struct TipExtra {
    std::uint32_t height{};
    bool operator==(const TipExtra&) const = default;
};

using EventExtra = std::variant<MinedExtra, PeerExtra, FromExtra, TipExtra>;

struct Event {
    Step step{};
    EventKind kind{};
    NodeId node{};
    ItemId item{};
    EventExtra extra{};
    bool operator==(const Event&) const = default;
};

using EventLog = std::vector<Event>;

// One event per line, fixed key order, integers only: two runs that produce
// equal logs produce byte-identical files.
inline void write_jsonl(const EventLog& log, std::ostream& out) {
    for (const Event& e : log) {
        nlohmann::ordered_json j;
        j["step"] = e.step;
        j["event"] = to_string(e.kind);
        j["node"] = e.node;
        j["item"] = e.item;
        nlohmann::ordered_json x;
        if (const auto* m = std::get_if<MinedExtra>(&e.extra)) {
            x["parent"] = m->parent;
            x["height"] = m->height;
            x["tx_count"] = m->tx_count;
            x["size_bytes"] = m->size_bytes;
        } else if (const auto* p = std::get_if<PeerExtra>(&e.extra)) {
            x["peer"] = p->peer;
        } else if (const auto* f = std::get_if<FromExtra>(&e.extra)) {
            x["from"] = f->from;
        } else if (const auto* t = std::get_if<TipExtra>(&e.extra)) {
            x["height"] = t->height;
        }
        j["extra"] = std::move(x);
        out << j.dump() << '\n';
    }
}

inline std::string to_jsonl(const EventLog& log) {
    std::ostringstream os;
    write_jsonl(log, os);
    return os.str();
}

inline EventLog read_jsonl(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        Event e;
        std::string kind;
        nlohmann::json x;
        // one catch covers parse and extraction; missing or mistyped fields
        // fail with the line number, same as unparseable text
        try {
            j = nlohmann::json::parse(line);
            e.step = j.at("step").get<Step>();
            e.node = j.at("node").get<NodeId>();
            e.item = j.at("item").get<ItemId>();
            kind = j.at("event").get<std::string>();
            x = j.at("extra");
            if (kind == "BLOCK_MINED") {
                e.kind = EventKind::BlockMined;
                e.extra = MinedExtra{x.at("parent").get<ItemId>(),
                                     x.at("height").get<std::uint32_t>(),
                                     x.at("tx_count").get<std::uint32_t>(),
                                     x.at("size_bytes").get<std::uint64_t>()};
            } else if (kind == "INV_SENT") {
                e.kind = EventKind::InvSent;
                e.extra = PeerExtra{x.at("peer").get<NodeId>()};
            } else if (kind == "GETDATA_SENT") {
                e.kind = EventKind::GetDataSent;
                e.extra = PeerExtra{x.at("peer").get<NodeId>()};
            } else if (kind == "BLOCK_RECEIVED") {
                e.kind = EventKind::BlockReceived;
                e.extra = FromExtra{x.at("from").get<NodeId>()};
            } else if (kind == "TIP_CHANGED") {
                e.kind = EventKind::TipChanged;
                e.extra = TipExtra{x.at("height").get<std::uint32_t>()};
            } else {
                throw ConfigError("event log line " + std::to_string(lineno) +
                                  ": unknown event kind '" + kind + "'");
            }
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError("event log line " + std::to_string(lineno) +
                              ": " + ex.what());
        }
        log.push_back(e);
    }
    return log;
}

} // namespace chainsim
