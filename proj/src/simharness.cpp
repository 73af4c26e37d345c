#include "bcc/simharness.hpp"

#include <algorithm>
#include <memory>

namespace bcc {

using nlohmann::json;

void ExecutionConfig::validate() const {
    params.validate();
    if (static_cast<int>(inputs.size()) != params.n)
        throw Error(Errc::ConfigInvalid, "need exactly n inputs");
    if (static_cast<int>(faulty.size()) > params.f)
        throw Error(Errc::ConfigInvalid, "more faulty nodes than f");
    for (const auto& [id, strategy] : faulty) {
        if (id < 1 || id > params.n) throw Error(Errc::ConfigInvalid, "faulty id out of range");
        strategy.validate(params);
    }
    for (NodeId id = 1; id <= params.n; ++id) {
        const Point& x = inputs[static_cast<std::size_t>(id - 1)];
        if (x.dim() != params.d) throw Error(Errc::ConfigInvalid, "input dimension mismatch");
        if (faulty.count(id)) continue;
        for (const Rational& c : x.coords)
            if (c < params.lower || c > params.upper)
                throw Error(Errc::ConfigInvalid, "fault-free input outside [mu,U]^d");
    }
}

namespace {

json scheduler_to_json(const SchedulerPolicy& p) {
    const char* order = p.order == SchedulerPolicy::Order::Random ? "random"
                        : p.order == SchedulerPolicy::Order::FifoGlobal ? "fifo-global"
                                                                        : "targeted-delay";
    const char* prefix = p.sv_prefix == SchedulerPolicy::SvPrefix::Random ? "random"
                         : p.sv_prefix == SchedulerPolicy::SvPrefix::Min ? "min"
                                                                         : "all";
    return json{{"order", order}, {"sv_prefix", prefix}, {"delayed_senders", p.delayed_senders}};
}

SchedulerPolicy scheduler_from_json(const json& j) {
    SchedulerPolicy p;
    const std::string order = j.value("order", "random");
    if (order == "random") p.order = SchedulerPolicy::Order::Random;
    else if (order == "fifo-global") p.order = SchedulerPolicy::Order::FifoGlobal;
    else if (order == "targeted-delay") p.order = SchedulerPolicy::Order::TargetedDelay;
    else throw Error(Errc::ConfigInvalid, "unknown scheduler order '" + order + "'");
    const std::string prefix = j.value("sv_prefix", "random");
    if (prefix == "random") p.sv_prefix = SchedulerPolicy::SvPrefix::Random;
    else if (prefix == "min") p.sv_prefix = SchedulerPolicy::SvPrefix::Min;
    else if (prefix == "all") p.sv_prefix = SchedulerPolicy::SvPrefix::All;
    else throw Error(Errc::ConfigInvalid, "unknown sv_prefix '" + prefix + "'");
    if (j.contains("delayed_senders"))
        p.delayed_senders = j.at("delayed_senders").get<std::vector<NodeId>>();
    return p;
}

json strategy_to_json(const AdversaryStrategy& s) {
    json j{{"strategy", strategy_kind_name(s.kind)}};
    switch (s.kind) {
        case StrategyKind::HonestBadInput: j["bad_input"] = point_to_json(*s.bad_input); break;
        case StrategyKind::Silent: j["after_round"] = s.after_round; break;
        case StrategyKind::MalformedPolytope:
        case StrategyKind::ShortSnapshot:
        case StrategyKind::StaleOmission: j["target_round"] = s.target_round; break;
        case StrategyKind::WithholdPartial:
            j["withhold_round"] = s.withhold_round;
            j["early_receiver"] = s.early_receiver;
            break;
        case StrategyKind::CustomScript: {
            json script = json::array();
            for (const ScriptAction& a : s.script) {
                json e{{"round", a.round}};
                if (a.kind == ScriptAction::Kind::Silent) e["action"] = "silent";
                else if (a.kind == ScriptAction::Kind::SendValue) {
                    e["action"] = "send";
                    e["value"] = *a.value;
                } else e["action"] = "honest";
                if (a.spec.mode == DeliverySpec::Mode::EarlyOnly) e["early"] = a.spec.early;
                if (a.spec.mode == DeliverySpec::Mode::None) e["withhold_all"] = true;
                script.push_back(e);
            }
            j["script"] = script;
            break;
        }
    }
    return j;
}

AdversaryStrategy strategy_from_json(const json& j) {
    AdversaryStrategy s;
    s.kind = strategy_kind_from_name(j.at("strategy").get<std::string>());
    switch (s.kind) {
        case StrategyKind::HonestBadInput: s.bad_input = point_from_json(j.at("bad_input")); break;
        case StrategyKind::Silent: s.after_round = j.value("after_round", -1); break;
        case StrategyKind::MalformedPolytope:
        case StrategyKind::ShortSnapshot:
        case StrategyKind::StaleOmission: s.target_round = j.value("target_round", s.kind == StrategyKind::StaleOmission ? 1 : 0); break;
        case StrategyKind::WithholdPartial:
            s.withhold_round = j.value("withhold_round", 1);
            s.early_receiver = j.value("early_receiver", 1);
            break;
        case StrategyKind::CustomScript:
            for (const auto& e : j.value("script", json::array())) {
                ScriptAction a;
                a.round = e.at("round").get<RoundIndex>();
                const std::string action = e.value("action", "honest");
                if (action == "silent") a.kind = ScriptAction::Kind::Silent;
                else if (action == "send") {
                    a.kind = ScriptAction::Kind::SendValue;
                    a.value = e.at("value");
                } else a.kind = ScriptAction::Kind::Honest;
                if (e.value("withhold_all", false)) a.spec.mode = DeliverySpec::Mode::None;
                else if (e.contains("early")) {
                    a.spec.mode = DeliverySpec::Mode::EarlyOnly;
                    a.spec.early = e.at("early").get<std::vector<NodeId>>();
                }
                s.script.push_back(a);
            }
            break;
    }
    return s;
}

}  // namespace

json execution_config_to_json(const ExecutionConfig& config) {
    json inputs = json::array();
    for (const Point& x : config.inputs) inputs.push_back(point_to_json(x));
    json faulty = json::object();
    for (const auto& [id, strategy] : config.faulty)
        faulty[std::to_string(id)] = strategy_to_json(strategy);
    return json{
        {"params",
         {{"n", config.params.n},
          {"f", config.params.f},
          {"d", config.params.d},
          {"epsilon", rational_to_json(config.params.epsilon)},
          {"U", rational_to_json(config.params.upper)},
          {"mu", rational_to_json(config.params.lower)}}},
        {"inputs", inputs},
        {"faulty", faulty},
        {"scheduler", scheduler_to_json(config.scheduler)},
    };
}

ExecutionConfig execution_config_from_json(const json& j) {
    ExecutionConfig config;
    const json& p = j.at("params");
    config.params.n = p.at("n").get<int>();
    config.params.f = p.at("f").get<int>();
    config.params.d = p.at("d").get<int>();
    config.params.epsilon = rational_from_json(p.at("epsilon"));
    config.params.upper = rational_from_json(p.at("U"));
    config.params.lower = rational_from_json(p.at("mu"));
    for (const auto& x : j.at("inputs")) config.inputs.push_back(point_from_json(x));
    if (j.contains("faulty"))
        for (const auto& [key, value] : j.at("faulty").items())
            config.faulty.emplace(std::stoi(key), strategy_from_json(value));
    if (j.contains("scheduler")) config.scheduler = scheduler_from_json(j.at("scheduler"));
    return config;
}

namespace {

class Harness;

class HarnessContext final : public NodeContext {
public:
    HarnessContext(Harness& harness, NodeId id) : harness_(harness), id_(id) {}
    void rb_send(const MessageValue& value, RoundIndex round) override;
    void log_verify(NodeId sender, RoundIndex msg_round, bool ok) override;
    void log_add(NodeId sender, RoundIndex msg_round) override;
    void log_rc_freeze(RoundIndex round, const MessageSet& rc) override;
    void log_h_compute(RoundIndex round, const Polytope& h) override;
    void log_round_advance(RoundIndex round) override;
    void log_decide(const Polytope& output) override;

private:
    Harness& harness_;
    NodeId id_;
};

class Harness {
public:
    Harness(const ExecutionConfig& config, std::uint64_t seed)
        : config_(config),
          ledger_(config.params.n),
          scheduler_(config.scheduler, seed) {
        trace_.config_json = execution_config_to_json(config);
        trace_.seed = seed;
        for (NodeId id = 1; id <= config.params.n; ++id) {
            Point input = config.inputs[static_cast<std::size_t>(id - 1)];
            auto it = config.faulty.find(id);
            if (it != config.faulty.end() && it->second.kind == StrategyKind::HonestBadInput)
                input = *it->second.bad_input;
            nodes_.push_back(std::make_unique<Node>(id, input, config.params));
            contexts_.push_back(std::make_unique<HarnessContext>(*this, id));
        }
    }

    ExecutionTrace run() {
        for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i]->start(*contexts_[i]);
        stable_vector_phase();
        drain();

        for (const auto& node : nodes_) {
            if (config_.faulty.count(node->id())) continue;
            if (!node->decided())
                throw Error(Errc::DeadlockDetected,
                            "node " + std::to_string(node->id()) + " undecided at drain");
        }
        return std::move(trace_);
    }

    void node_rb_send(NodeId sender, const MessageValue& honest, RoundIndex round) {
        MessageValue value = honest;
        DeliverySpec spec;
        auto it = config_.faulty.find(sender);
        if (it != config_.faulty.end()) {
            auto shaped = apply_strategy(it->second, sender, honest, round, config_.params);
            if (!shaped) return;  // broadcast dropped
            value = std::move(shaped->value);
            spec = shaped->spec;
        }
        try {
            ledger_.register_broadcast(sender, round, value, spec);
        } catch (const Error& e) {
            if (e.code() == Errc::DuplicateBroadcast && it != config_.faulty.end()) return;
            throw;  // a fault-free duplicate is a harness bug
        }
        TraceEvent e;
        e.kind = EventKind::RbSend;
        e.sender = sender;
        e.round = round;
        e.value = value;
        log(std::move(e));
    }

    void log(TraceEvent event) {
        event.step = ++step_;
        trace_.events.push_back(std::move(event));
    }

private:
    void stable_vector_phase() {
        const std::size_t min_len =
            static_cast<std::size_t>(config_.params.n - config_.params.f);
        std::vector<NodeId> candidates = ledger_.stable_vector_candidates();
        if (candidates.size() < min_len)
            throw Error(Errc::NotReady, "fewer than n-f round -1 broadcasts registered");
        const std::vector<NodeId> order = scheduler_.sv_order(candidates);

        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const NodeId id = nodes_[i]->id();
            const std::size_t len = scheduler_.sv_prefix_length(min_len, order.size());
            InputSnapshot snapshot;
            for (std::size_t k = 0; k < len; ++k) {
                const NodeId sender = order[k];
                snapshot.push_back(
                    InputTuple{std::get<Point>(ledger_.value_of(sender, -1)), sender});
                ledger_.mark_seen(sender, -1, id);
            }
            std::sort(snapshot.begin(), snapshot.end());

            TraceEvent e;
            e.kind = EventKind::SvReturn;
            e.node = id;
            e.sv_set = snapshot;
            log(std::move(e));
            nodes_[i]->on_sv_return(snapshot, *contexts_[i]);
        }

        // Round -1 messages outside a node's prefix arrive later as
        // ordinary reliable-broadcast deliveries.
        for (const NodeId sender : order)
            for (const auto& node : nodes_)
                if (!ledger_.seen(sender, -1, node->id()))
                    ledger_.schedule(sender, -1, node->id(), false);
    }

    void drain() {
        while (ledger_.has_pending()) {
            const auto eligible = ledger_.eligible();
            const BroadcastLedger::Pending& choice = scheduler_.pick(eligible);
            const BroadcastLedger::Pending delivery = ledger_.pop(choice.id);

            TraceEvent e;
            e.node = delivery.receiver;
            e.sender = delivery.sender;
            e.round = delivery.round;
            if (ledger_.seen(delivery.sender, delivery.round, delivery.receiver)) {
                e.kind = EventKind::Suppression;
                log(std::move(e));
                continue;
            }
            ledger_.mark_seen(delivery.sender, delivery.round, delivery.receiver);
            e.kind = EventKind::Delivery;
            log(std::move(e));

            Node& node = *nodes_[static_cast<std::size_t>(delivery.receiver - 1)];
            NodeContext& ctx = *contexts_[static_cast<std::size_t>(delivery.receiver - 1)];
            const MessageValue& value = ledger_.value_of(delivery.sender, delivery.round);
            if (delivery.round == -1)
                node.on_rb_receive_input(std::get<Point>(value), delivery.sender, ctx);
            else
                node.on_rb_receive_round(std::get<RoundMessage>(value), delivery.sender,
                                         delivery.round, ctx);
        }
    }

    friend class HarnessContext;

    ExecutionConfig config_;
    BroadcastLedger ledger_;
    Scheduler scheduler_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::vector<std::unique_ptr<HarnessContext>> contexts_;
    ExecutionTrace trace_;
    long step_ = 0;
};

void HarnessContext::rb_send(const MessageValue& value, RoundIndex round) {
    harness_.node_rb_send(id_, value, round);
}

void HarnessContext::log_verify(NodeId sender, RoundIndex msg_round, bool ok) {
    TraceEvent e;
    e.kind = EventKind::Verify;
    e.node = id_;
    e.sender = sender;
    e.round = msg_round;
    e.ok = ok;
    harness_.log(std::move(e));
}

void HarnessContext::log_add(NodeId sender, RoundIndex msg_round) {
    TraceEvent e;
    e.kind = EventKind::Add;
    e.node = id_;
    e.sender = sender;
    e.round = msg_round;
    harness_.log(std::move(e));
}

void HarnessContext::log_rc_freeze(RoundIndex round, const MessageSet& rc) {
    TraceEvent e;
    e.kind = EventKind::RcFreeze;
    e.node = id_;
    e.round = round;
    e.rc = rc;
    harness_.log(std::move(e));
}

void HarnessContext::log_h_compute(RoundIndex round, const Polytope& h) {
    TraceEvent e;
    e.kind = EventKind::HCompute;
    e.node = id_;
    e.round = round;
    e.polytope = h;
    harness_.log(std::move(e));
}

void HarnessContext::log_round_advance(RoundIndex round) {
    TraceEvent e;
    e.kind = EventKind::RoundAdvance;
    e.node = id_;
    e.round = round;
    harness_.log(std::move(e));
}

void HarnessContext::log_decide(const Polytope& output) {
    TraceEvent e;
    e.kind = EventKind::Decide;
    e.node = id_;
    e.t_end = compute_t_end(harness_.config_.params);
    e.polytope = output;
    harness_.log(std::move(e));
}

}  // namespace

ExecutionTrace run_execution(const ExecutionConfig& config, std::uint64_t seed) {
    config.validate();
    Harness harness(config, seed);
    return harness.run();
}

}  // namespace bcc
