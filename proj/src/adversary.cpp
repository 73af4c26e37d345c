#include "bcc/adversary.hpp"

#include <algorithm>

namespace bcc {

const char* strategy_kind_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::HonestBadInput: return "honest-bad-input";
        case StrategyKind::Silent: return "silent";
        case StrategyKind::MalformedPolytope: return "malformed-polytope";
        case StrategyKind::ShortSnapshot: return "short-snapshot";
        case StrategyKind::StaleOmission: return "stale-omission";
        case StrategyKind::WithholdPartial: return "withhold-partial";
        case StrategyKind::CustomScript: return "custom-script";
    }
    return "unknown";
}

StrategyKind strategy_kind_from_name(const std::string& name) {
    if (name == "honest-bad-input") return StrategyKind::HonestBadInput;
    if (name == "silent") return StrategyKind::Silent;
    if (name == "malformed-polytope") return StrategyKind::MalformedPolytope;
    if (name == "short-snapshot") return StrategyKind::ShortSnapshot;
    if (name == "stale-omission") return StrategyKind::StaleOmission;
    if (name == "withhold-partial") return StrategyKind::WithholdPartial;
    if (name == "custom-script") return StrategyKind::CustomScript;
    throw Error(Errc::ConfigInvalid, "unknown strategy '" + name + "'");
}

void AdversaryStrategy::validate(const Params& params) const {
    switch (kind) {
        case StrategyKind::HonestBadInput:
            if (!bad_input) throw Error(Errc::ConfigInvalid, "honest-bad-input needs bad_input");
            if (bad_input->dim() != params.d)
                throw Error(Errc::ConfigInvalid, "bad_input dimension mismatch");
            for (const Rational& c : bad_input->coords)
                if (c < params.lower || c > params.upper)
                    throw Error(Errc::ConfigInvalid, "bad_input outside [mu,U]^d");
            break;
        case StrategyKind::Silent:
            if (after_round < -2) throw Error(Errc::ConfigInvalid, "silent after_round < -2");
            break;
        case StrategyKind::MalformedPolytope:
        case StrategyKind::ShortSnapshot:
            if (target_round < 0) throw Error(Errc::ConfigInvalid, "target_round must be >= 0");
            break;
        case StrategyKind::StaleOmission:
            if (target_round < 1)
                throw Error(Errc::ConfigInvalid, "stale-omission target_round must be >= 1");
            break;
        case StrategyKind::WithholdPartial:
            if (withhold_round < 0)
                throw Error(Errc::ConfigInvalid, "withhold_round must be >= 0");
            if (early_receiver < 1 || early_receiver > params.n)
                throw Error(Errc::ConfigInvalid, "early_receiver out of range");
            break;
        case StrategyKind::CustomScript:
            for (const ScriptAction& a : script)
                if (a.round < -1) throw Error(Errc::ConfigInvalid, "script round < -1");
            break;
    }
}

namespace {

// h != H(V, t-1) guaranteed: translate by one unit along the first axis.
Polytope corrupt_polytope(const Polytope& h) {
    Polytope out = h;
    for (Point& v : out.vertices) v.coords[0] += 1;
    return out;
}

std::optional<ShapedBroadcast> apply_script(const AdversaryStrategy& strategy,
                                            const MessageValue& honest, RoundIndex round) {
    for (const ScriptAction& action : strategy.script) {
        if (action.round != round) continue;
        switch (action.kind) {
            case ScriptAction::Kind::Silent: return std::nullopt;
            case ScriptAction::Kind::SendValue:
                return ShapedBroadcast{message_value_from_json(*action.value), action.spec};
            case ScriptAction::Kind::Honest: return ShapedBroadcast{honest, action.spec};
        }
    }
    return ShapedBroadcast{honest, DeliverySpec{}};
}

}  // namespace

std::optional<ShapedBroadcast> apply_strategy(const AdversaryStrategy& strategy, NodeId self,
                                              const MessageValue& honest, RoundIndex round,
                                              const Params& params) {
    switch (strategy.kind) {
        case StrategyKind::HonestBadInput:
            // the bad input is substituted at node construction
            return ShapedBroadcast{honest, DeliverySpec{}};

        case StrategyKind::Silent:
            if (round > strategy.after_round) return std::nullopt;
            return ShapedBroadcast{honest, DeliverySpec{}};

        case StrategyKind::MalformedPolytope: {
            if (round != strategy.target_round + 1) return ShapedBroadcast{honest, DeliverySpec{}};
            RoundMessage m = std::get<RoundMessage>(honest);
            m.h = corrupt_polytope(m.h);
            return ShapedBroadcast{MessageValue{m}, DeliverySpec{}};
        }

        case StrategyKind::ShortSnapshot: {
            if (round != strategy.target_round + 1) return ShapedBroadcast{honest, DeliverySpec{}};
            RoundMessage m = std::get<RoundMessage>(honest);
            const std::size_t keep = static_cast<std::size_t>(params.n - params.f - 1);
            std::visit([&](auto& v) { if (v.size() > keep) v.resize(keep); }, m.snapshot);
            return ShapedBroadcast{MessageValue{m}, DeliverySpec{}};
        }

        case StrategyKind::StaleOmission: {
            if (round != strategy.target_round + 1) return ShapedBroadcast{honest, DeliverySpec{}};
            RoundMessage m = std::get<RoundMessage>(honest);
            auto& tuples = std::get<std::vector<PolytopeTuple>>(m.snapshot);
            tuples.erase(std::remove_if(tuples.begin(), tuples.end(),
                                        [&](const PolytopeTuple& t) { return t.sender == self; }),
                         tuples.end());
            // keep the h-check consistent so only the own-tuple check fails
            if (!tuples.empty()) m.h = function_H(m.snapshot, round - 1, params);
            return ShapedBroadcast{MessageValue{m}, DeliverySpec{}};
        }

        case StrategyKind::WithholdPartial: {
            if (round != strategy.withhold_round) return ShapedBroadcast{honest, DeliverySpec{}};
            DeliverySpec spec;
            spec.mode = DeliverySpec::Mode::EarlyOnly;
            spec.early = {strategy.early_receiver};
            return ShapedBroadcast{honest, spec};
        }

        case StrategyKind::CustomScript: return apply_script(strategy, honest, round);
    }
    return ShapedBroadcast{honest, DeliverySpec{}};
}

const BroadcastLedger::Pending& Scheduler::pick(
    const std::vector<BroadcastLedger::Pending>& eligible) {
    if (eligible.empty()) throw Error(Errc::NoPendingDeliveries, "scheduler: nothing eligible");
    switch (policy_.order) {
        case SchedulerPolicy::Order::Random: {
            std::uniform_int_distribution<std::size_t> dist(0, eligible.size() - 1);
            return eligible[dist(rng_)];
        }
        case SchedulerPolicy::Order::FifoGlobal: {
            const BroadcastLedger::Pending* best = &eligible[0];
            for (const auto& p : eligible)
                if (p.seq < best->seq || (p.seq == best->seq && p.receiver < best->receiver))
                    best = &p;
            return *best;
        }
        case SchedulerPolicy::Order::TargetedDelay: {
            const BroadcastLedger::Pending* best = nullptr;
            auto is_delayed_sender = [&](NodeId s) {
                return std::find(policy_.delayed_senders.begin(), policy_.delayed_senders.end(), s) !=
                       policy_.delayed_senders.end();
            };
            for (bool delayed_pass : {false, true}) {
                for (const auto& p : eligible) {
                    if (is_delayed_sender(p.sender) != delayed_pass) continue;
                    if (!best || p.seq < best->seq ||
                        (p.seq == best->seq && p.receiver < best->receiver))
                        best = &p;
                }
                if (best) return *best;
            }
            return eligible[0];
        }
    }
    return eligible[0];
}

std::vector<NodeId> Scheduler::sv_order(std::vector<NodeId> candidates) {
    switch (policy_.order) {
        case SchedulerPolicy::Order::Random:
            std::shuffle(candidates.begin(), candidates.end(), rng_);
            break;
        case SchedulerPolicy::Order::FifoGlobal: break;  // registration order
        case SchedulerPolicy::Order::TargetedDelay:
            std::stable_partition(candidates.begin(), candidates.end(), [&](NodeId s) {
                return std::find(policy_.delayed_senders.begin(), policy_.delayed_senders.end(),
                                 s) == policy_.delayed_senders.end();
            });
            break;
    }
    return candidates;
}

std::size_t Scheduler::sv_prefix_length(std::size_t min_len, std::size_t max_len) {
    switch (policy_.sv_prefix) {
        case SchedulerPolicy::SvPrefix::Min: return std::min(min_len, max_len);
        case SchedulerPolicy::SvPrefix::All: return max_len;
        case SchedulerPolicy::SvPrefix::Random: {
            std::uniform_int_distribution<std::size_t> dist(std::min(min_len, max_len), max_len);
            return dist(rng_);
        }
    }
    return max_len;
}

}  // namespace bcc
