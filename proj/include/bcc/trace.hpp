#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bcc/messages.hpp"

namespace bcc {

enum class EventKind {
    RbSend,
    SvReturn,
    Delivery,
    Suppression,
    Verify,
    Add,
    RcFreeze,
    HCompute,
    RoundAdvance,
    Decide,
};

const char* event_kind_name(EventKind kind);
EventKind event_kind_from_name(const std::string& name);

// One totally-ordered event. Which payload fields are meaningful depends
// on the kind; unspecified fields stay defaulted and are not serialized.
struct TraceEvent {
    long step = 0;
    EventKind kind = EventKind::RbSend;
    NodeId node = 0;    // receiver / owner of the state change
    NodeId sender = 0;  // message sender where applicable
    RoundIndex round = 0;
    bool ok = false;  // Verify
    int t_end = 0;    // Decide
    std::optional<MessageValue> value;    // RbSend
    std::optional<InputSnapshot> sv_set;  // SvReturn
    std::optional<MessageSet> rc;         // RcFreeze
    std::optional<Polytope> polytope;     // HCompute / Decide
};

nlohmann::json trace_event_to_json(const TraceEvent& event);
TraceEvent trace_event_from_json(const nlohmann::json& j);

// Complete event log of one simulated execution. The config is kept as
// raw JSON so a trace file is self-contained for offline checking.
struct ExecutionTrace {
    nlohmann::json config_json;
    std::uint64_t seed = 0;
    std::vector<TraceEvent> events;

    std::string to_jsonl() const;
    static ExecutionTrace from_jsonl(std::istream& in);
    static ExecutionTrace from_file(const std::string& path);
    void write_file(const std::string& path) const;
};

}  // namespace bcc
