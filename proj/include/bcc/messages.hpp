#pragma once

#include <algorithm>
#include <optional>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bcc/geometry.hpp"

namespace bcc {

using NodeId = int;      // 1..n
using RoundIndex = int;  // -1 is the preliminary round

// (x, j, -1): an input point reliably broadcast in the preliminary round.
struct InputTuple {
    Point x;
    NodeId sender = 0;

    friend bool operator==(const InputTuple& a, const InputTuple& b) {
        return a.sender == b.sender && a.x == b.x;
    }
    friend bool operator<(const InputTuple& a, const InputTuple& b) {
        if (a.sender != b.sender) return a.sender < b.sender;
        return a.x < b.x;
    }
};

// A node's frozen view of round -1: sorted set of input tuples.
using InputSnapshot = std::vector<InputTuple>;

// (V, j, -1): element of R[0]; V is the sender's round -1 snapshot.
struct SnapshotTuple {
    InputSnapshot snapshot;
    NodeId sender = 0;

    friend bool operator==(const SnapshotTuple& a, const SnapshotTuple& b) {
        return a.sender == b.sender && a.snapshot == b.snapshot;
    }
    friend bool operator<(const SnapshotTuple& a, const SnapshotTuple& b) {
        if (a.sender != b.sender) return a.sender < b.sender;
        return a.snapshot < b.snapshot;
    }
};

// (h, j, r): element of R[r+1] for r >= 0.
struct PolytopeTuple {
    Polytope h;
    NodeId sender = 0;
    RoundIndex round = 0;

    friend bool operator==(const PolytopeTuple& a, const PolytopeTuple& b) {
        return a.sender == b.sender && a.round == b.round && a.h == b.h;
    }
    friend bool operator<(const PolytopeTuple& a, const PolytopeTuple& b) {
        if (a.sender != b.sender) return a.sender < b.sender;
        if (a.round != b.round) return a.round < b.round;
        return a.h < b.h;
    }
};

// Message sets are kept as sorted, duplicate-free vectors. The alternative
// in use depends on the round: inputs for R[-1], snapshots for R[0],
// polytope tuples for R[t], t >= 1.
using MessageSet =
    std::variant<std::vector<InputTuple>, std::vector<SnapshotTuple>, std::vector<PolytopeTuple>>;

template <typename T>
bool set_insert(std::vector<T>& set, const T& element) {
    auto it = std::lower_bound(set.begin(), set.end(), element);
    if (it != set.end() && *it == element) return false;
    set.insert(it, element);
    return true;
}

template <typename T>
bool set_contains(const std::vector<T>& set, const T& element) {
    return std::binary_search(set.begin(), set.end(), element);
}

template <typename T>
bool is_subset(const std::vector<T>& sub, const std::vector<T>& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

std::size_t message_set_size(const MessageSet& set);
bool message_set_subset(const MessageSet& sub, const MessageSet& super);
// True iff the set holds a tuple (*, sender, .) — and, for polytope sets,
// one with the given round tag.
bool message_set_has_sender(const MessageSet& set, NodeId sender);

// Value carried by a round t >= 0 broadcast: ((h, V), i, t).
struct RoundMessage {
    Polytope h;          // empty polytope stands for the round-0 placeholder
    MessageSet snapshot;  // the sender's claimed R^c[t-1]

    bool operator==(const RoundMessage&) const = default;
};

// Round -1 broadcasts carry the input point; later rounds carry (h, V).
using MessageValue = std::variant<Point, RoundMessage>;

struct SignedMessage {
    MessageValue value;
    NodeId sender = 0;
    RoundIndex round = -1;
};

// --- JSON encoding (rationals as "num/den" strings) ---

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

nlohmann::json point_to_json(const Point& p);
Point point_from_json(const nlohmann::json& j);

nlohmann::json polytope_to_json(const Polytope& h);
Polytope polytope_from_json(const nlohmann::json& j);

nlohmann::json message_set_to_json(const MessageSet& set);
MessageSet message_set_from_json(const nlohmann::json& j);

nlohmann::json message_value_to_json(const MessageValue& value);
MessageValue message_value_from_json(const nlohmann::json& j);

nlohmann::json input_snapshot_to_json(const InputSnapshot& snapshot);
InputSnapshot input_snapshot_from_json(const nlohmann::json& j);

}  // namespace bcc
