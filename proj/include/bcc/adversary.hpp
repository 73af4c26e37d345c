#pragma once

#include <optional>
#include <random>

#include "bcc/protocol.hpp"
#include "bcc/rbcast.hpp"

namespace bcc {

enum class StrategyKind {
    HonestBadInput,    // follows the protocol with an adversary-chosen in-range input
    Silent,            // stops broadcasting after a chosen round
    MalformedPolytope, // sends h != H(V, t-1) for one execution round
    ShortSnapshot,     // sends |V| < n-f for one execution round
    StaleOmission,     // omits its own previous tuple from V for one execution round
    WithholdPartial,   // delays one round's broadcast for all but one receiver
    CustomScript,      // replays explicit per-round actions
};

const char* strategy_kind_name(StrategyKind kind);
StrategyKind strategy_kind_from_name(const std::string& name);

struct ScriptAction {
    RoundIndex round = 0;
    enum class Kind { Honest, Silent, SendValue } kind = Kind::Honest;
    std::optional<nlohmann::json> value;  // raw message value (SendValue)
    DeliverySpec spec;
};

struct AdversaryStrategy {
    StrategyKind kind = StrategyKind::Silent;
    std::optional<Point> bad_input;  // HonestBadInput
    RoundIndex after_round = -1;     // Silent: last round it still broadcasts (-2 = never)
    RoundIndex target_round = 0;     // execution round whose verification must fail
    RoundIndex withhold_round = 1;   // WithholdPartial: broadcast round to withhold
    NodeId early_receiver = 1;       // WithholdPartial: prompt receiver
    std::vector<ScriptAction> script;

    void validate(const Params& params) const;
};

// Result of running a strategy against the node's honest outgoing
// broadcast. nullopt means the broadcast is dropped entirely.
struct ShapedBroadcast {
    MessageValue value;
    DeliverySpec spec;
};

std::optional<ShapedBroadcast> apply_strategy(const AdversaryStrategy& strategy, NodeId self,
                                              const MessageValue& honest, RoundIndex round,
                                              const Params& params);

// Seeded scheduling policy: delivery ordering plus stable-vector shape.
struct SchedulerPolicy {
    enum class Order { Random, FifoGlobal, TargetedDelay };
    enum class SvPrefix { Random, Min, All };

    Order order = Order::Random;
    SvPrefix sv_prefix = SvPrefix::Random;
    std::vector<NodeId> delayed_senders;  // TargetedDelay
};

class Scheduler {
public:
    Scheduler(SchedulerPolicy policy, std::uint64_t seed) : policy_(policy), rng_(seed) {}

    // Picks the next delivery among the eligible channel heads.
    const BroadcastLedger::Pending& pick(const std::vector<BroadcastLedger::Pending>& eligible);

    // Global delivery order of round -1 broadcasts for the stable vector.
    std::vector<NodeId> sv_order(std::vector<NodeId> candidates);

    // Prefix length for one node, clamped to [min_len, max_len].
    std::size_t sv_prefix_length(std::size_t min_len, std::size_t max_len);

private:
    SchedulerPolicy policy_;
    std::mt19937_64 rng_;
};

}  // namespace bcc
