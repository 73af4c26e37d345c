#include "bcc/trace.hpp"

#include <fstream>
#include <sstream>

namespace bcc {

using nlohmann::json;

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::RbSend: return "rb_send";
        case EventKind::SvReturn: return "sv_return";
        case EventKind::Delivery: return "delivery";
        case EventKind::Suppression: return "suppression";
        case EventKind::Verify: return "verify";
        case EventKind::Add: return "add";
        case EventKind::RcFreeze: return "rc_freeze";
        case EventKind::HCompute: return "h_compute";
        case EventKind::RoundAdvance: return "round_advance";
        case EventKind::Decide: return "decide";
    }
    return "unknown";
}

EventKind event_kind_from_name(const std::string& name) {
    if (name == "rb_send") return EventKind::RbSend;
    if (name == "sv_return") return EventKind::SvReturn;
    if (name == "delivery") return EventKind::Delivery;
    if (name == "suppression") return EventKind::Suppression;
    if (name == "verify") return EventKind::Verify;
    if (name == "add") return EventKind::Add;
    if (name == "rc_freeze") return EventKind::RcFreeze;
    if (name == "h_compute") return EventKind::HCompute;
    if (name == "round_advance") return EventKind::RoundAdvance;
    if (name == "decide") return EventKind::Decide;
    throw Error(Errc::IncompleteTrace, "unknown event kind '" + name + "'");
}

json trace_event_to_json(const TraceEvent& e) {
    json j{{"step", e.step}, {"kind", event_kind_name(e.kind)}};
    switch (e.kind) {
        case EventKind::RbSend:
            j["sender"] = e.sender;
            j["round"] = e.round;
            j["value"] = message_value_to_json(*e.value);
            break;
        case EventKind::SvReturn:
            j["node"] = e.node;
            j["messages"] = input_snapshot_to_json(*e.sv_set);
            break;
        case EventKind::Delivery:
        case EventKind::Suppression:
            j["node"] = e.node;
            j["sender"] = e.sender;
            j["round"] = e.round;
            break;
        case EventKind::Verify:
            j["node"] = e.node;
            j["sender"] = e.sender;
            j["round"] = e.round;
            j["ok"] = e.ok;
            break;
        case EventKind::Add:
            j["node"] = e.node;
            j["sender"] = e.sender;
            j["round"] = e.round;
            break;
        case EventKind::RcFreeze:
            j["node"] = e.node;
            j["round"] = e.round;
            j["rc"] = message_set_to_json(*e.rc);
            break;
        case EventKind::HCompute:
            j["node"] = e.node;
            j["round"] = e.round;
            j["polytope"] = polytope_to_json(*e.polytope);
            break;
        case EventKind::RoundAdvance:
            j["node"] = e.node;
            j["round"] = e.round;
            break;
        case EventKind::Decide:
            j["node"] = e.node;
            j["t_end"] = e.t_end;
            j["polytope"] = polytope_to_json(*e.polytope);
            break;
    }
    return j;
}

TraceEvent trace_event_from_json(const json& j) {
    TraceEvent e;
    e.step = j.at("step").get<long>();
    e.kind = event_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("node")) e.node = j.at("node").get<NodeId>();
    if (j.contains("sender")) e.sender = j.at("sender").get<NodeId>();
    if (j.contains("round")) e.round = j.at("round").get<RoundIndex>();
    if (j.contains("ok")) e.ok = j.at("ok").get<bool>();
    if (j.contains("t_end")) e.t_end = j.at("t_end").get<int>();
    if (j.contains("value")) e.value = message_value_from_json(j.at("value"));
    if (j.contains("messages")) e.sv_set = input_snapshot_from_json(j.at("messages"));
    if (j.contains("rc")) e.rc = message_set_from_json(j.at("rc"));
    if (j.contains("polytope")) e.polytope = polytope_from_json(j.at("polytope"));
    return e;
}

std::string ExecutionTrace::to_jsonl() const {
    std::ostringstream out;
    out << json{{"kind", "config"}, {"config", config_json}, {"seed", seed}}.dump() << '\n';
    for (const TraceEvent& e : events) out << trace_event_to_json(e).dump() << '\n';
    return out.str();
}

ExecutionTrace ExecutionTrace::from_jsonl(std::istream& in) {
    ExecutionTrace trace;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        if (!have_header) {
            if (j.value("kind", "") != "config")
                throw Error(Errc::IncompleteTrace, "trace must start with a config line");
            trace.config_json = j.at("config");
            trace.seed = j.at("seed").get<std::uint64_t>();
            have_header = true;
            continue;
        }
        trace.events.push_back(trace_event_from_json(j));
    }
    if (!have_header) throw Error(Errc::IncompleteTrace, "empty trace");
    return trace;
}

ExecutionTrace ExecutionTrace::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IncompleteTrace, "cannot open trace file " + path);
    return from_jsonl(in);
}

void ExecutionTrace::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IncompleteTrace, "cannot write trace file " + path);
    out << to_jsonl();
}

}  // namespace bcc
