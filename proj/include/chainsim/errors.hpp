#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainsim {

// Base for everything this library throws. Catching chainsim::Error at the
// CLI boundary is enough to turn any misuse into a clean exit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad value in a config file or an override; message names the offending key
struct ConfigError : Error {
    using Error::Error;
};

// malformed topology expression; position is a byte offset into the source
struct ParseError : Error {
    ParseError(const std::string& what, std::size_t pos)
        : Error(what), position(pos) {}
    std::size_t position;
};

// runtime failure while evaluating a predicate (division or modulo by zero)
struct EvalError : Error {
    using Error::Error;
};

// a node tried to send to a node it has no edge to
struct UnknownPeer : Error {
    using Error::Error;
};

// a region id that is not present in the region table / latency matrix
struct UnknownRegion : Error {
    using Error::Error;
};

// structurally invalid topology request (k >= node count, bad edge ids, ...)
struct InvalidSpec : Error {
    using Error::Error;
};

// numeric parameters outside their domain (per-step mining probability > 1, ...)
struct InvalidParams : Error {
    using Error::Error;
};

// metrics requested for a run in which no block was ever mined
struct EmptyRun : Error {
    using Error::Error;
};

} // namespace chainsim
