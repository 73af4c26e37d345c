#include "bcc/messages.hpp"

namespace bcc {

using nlohmann::json;

std::size_t message_set_size(const MessageSet& set) {
    return std::visit([](const auto& v) { return v.size(); }, set);
}

bool message_set_subset(const MessageSet& sub, const MessageSet& super) {
    if (sub.index() != super.index()) return message_set_size(sub) == 0;
    return std::visit(
        [&](const auto& s) {
            using V = std::decay_t<decltype(s)>;
            return is_subset(s, std::get<V>(super));
        },
        sub);
}

bool message_set_has_sender(const MessageSet& set, NodeId sender) {
    return std::visit(
        [&](const auto& v) {
            for (const auto& t : v)
                if (t.sender == sender) return true;
            return false;
        },
        set);
}

json rational_to_json(const Rational& r) { return to_string(r); }

Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<long long>()));
    if (j.is_number_float()) {
        Rational r(j.get<double>());  // exact binary expansion
        r.canonicalize();
        return r;
    }
    throw Error(Errc::ConfigInvalid, "expected rational");
}

json point_to_json(const Point& p) {
    json arr = json::array();
    for (const Rational& c : p.coords) arr.push_back(rational_to_json(c));
    return arr;
}

Point point_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error(Errc::ConfigInvalid, "point must be a non-empty array");
    Point p;
    for (const auto& c : j) p.coords.push_back(rational_from_json(c));
    return p;
}

json polytope_to_json(const Polytope& h) {
    json verts = json::array();
    for (const Point& v : h.vertices) verts.push_back(point_to_json(v));
    return json{{"d", h.d}, {"vertices", verts}};
}

Polytope polytope_from_json(const json& j) {
    Polytope h;
    h.d = j.at("d").get<int>();
    for (const auto& v : j.at("vertices")) h.vertices.push_back(point_from_json(v));
    return h;
}

json input_snapshot_to_json(const InputSnapshot& snapshot) {
    json arr = json::array();
    for (const InputTuple& t : snapshot) arr.push_back(json{{"x", point_to_json(t.x)}, {"j", t.sender}});
    return arr;
}

InputSnapshot input_snapshot_from_json(const json& j) {
    InputSnapshot out;
    for (const auto& e : j) out.push_back({point_from_json(e.at("x")), e.at("j").get<NodeId>()});
    std::sort(out.begin(), out.end());
    return out;
}

json message_set_to_json(const MessageSet& set) {
    json items = json::array();
    const char* type = "inputs";
    if (std::holds_alternative<std::vector<InputTuple>>(set)) {
        for (const auto& t : std::get<std::vector<InputTuple>>(set))
            items.push_back(json{{"x", point_to_json(t.x)}, {"j", t.sender}});
    } else if (std::holds_alternative<std::vector<SnapshotTuple>>(set)) {
        type = "snapshots";
        for (const auto& t : std::get<std::vector<SnapshotTuple>>(set))
            items.push_back(json{{"V", input_snapshot_to_json(t.snapshot)}, {"j", t.sender}});
    } else {
        type = "polytopes";
        for (const auto& t : std::get<std::vector<PolytopeTuple>>(set))
            items.push_back(json{{"h", polytope_to_json(t.h)}, {"j", t.sender}, {"r", t.round}});
    }
    return json{{"type", type}, {"items", items}};
}

MessageSet message_set_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    const json& items = j.at("items");
    if (type == "inputs") {
        std::vector<InputTuple> v;
        for (const auto& e : items) v.push_back({point_from_json(e.at("x")), e.at("j").get<NodeId>()});
        std::sort(v.begin(), v.end());
        return v;
    }
    if (type == "snapshots") {
        std::vector<SnapshotTuple> v;
        for (const auto& e : items)
            v.push_back({input_snapshot_from_json(e.at("V")), e.at("j").get<NodeId>()});
        std::sort(v.begin(), v.end());
        return v;
    }
    if (type == "polytopes") {
        std::vector<PolytopeTuple> v;
        for (const auto& e : items)
            v.push_back({polytope_from_json(e.at("h")), e.at("j").get<NodeId>(), e.at("r").get<int>()});
        std::sort(v.begin(), v.end());
        return v;
    }
    throw Error(Errc::ConfigInvalid, "unknown message set type '" + type + "'");
}

json message_value_to_json(const MessageValue& value) {
    if (std::holds_alternative<Point>(value))
        return json{{"input", point_to_json(std::get<Point>(value))}};
    const RoundMessage& m = std::get<RoundMessage>(value);
    return json{{"h", polytope_to_json(m.h)}, {"V", message_set_to_json(m.snapshot)}};
}

MessageValue message_value_from_json(const json& j) {
    if (j.contains("input")) return point_from_json(j.at("input"));
    return RoundMessage{polytope_from_json(j.at("h")), message_set_from_json(j.at("V"))};
}

}  // namespace bcc
