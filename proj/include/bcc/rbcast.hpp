#pragma once

#include <map>
#include <set>
#include <vector>

#include "bcc/messages.hpp"

namespace bcc {

// How the deliveries of one registered broadcast are shaped. Normal
// broadcasts reach everyone promptly; EarlyOnly reaches the listed
// receivers promptly and everyone else only when nothing else is pending;
// None registers the value without delivering it to anyone, which is the
// one way a broadcast may skip delivery without violating Global Liveness.
struct DeliverySpec {
    enum class Mode { Normal, EarlyOnly, None };
    Mode mode = Mode::Normal;
    std::vector<NodeId> early;
};

// Simulated reliable-broadcast ledger. It enforces, by construction, the
// per-(sender,round) uniqueness and the delivery bookkeeping from which
// the integrity/liveness/uniqueness properties follow; timing stays with
// the scheduler.
class BroadcastLedger {
public:
    struct Pending {
        long id = 0;        // unique, monotone
        long seq = 0;       // send order; per-channel FIFO key
        NodeId sender = 0;
        RoundIndex round = -1;
        NodeId receiver = 0;
        bool delayed = false;
    };

    explicit BroadcastLedger(int n) : n_(n) {}

    // Registers (value, sender, round). Round -1 deliveries are deferred
    // until the stable-vector phase; later rounds schedule immediately
    // per the delivery spec. Throws DuplicateBroadcast on re-registration.
    void register_broadcast(NodeId sender, RoundIndex round, MessageValue value,
                            const DeliverySpec& spec = {});

    bool registered(NodeId sender, RoundIndex round) const;
    const MessageValue& value_of(NodeId sender, RoundIndex round) const;
    const DeliverySpec& spec_of(NodeId sender, RoundIndex round) const;

    // Round -1 registrations eligible for the stable vector, in
    // registration order (None-spec broadcasts are excluded).
    std::vector<NodeId> stable_vector_candidates() const;

    // Schedules one delivery (used for post-prefix round -1 messages and
    // by tests that force duplicates).
    void schedule(NodeId sender, RoundIndex round, NodeId receiver, bool delayed);

    void mark_seen(NodeId sender, RoundIndex round, NodeId receiver);
    bool seen(NodeId sender, RoundIndex round, NodeId receiver) const;

    // Deliveries that may dispatch next: one head per (sender, receiver)
    // channel (FIFO), and delayed heads only when no normal head exists.
    std::vector<Pending> eligible() const;
    Pending pop(long pending_id);
    bool has_pending() const { return !pending_.empty(); }
    std::size_t pending_count() const { return pending_.size(); }

private:
    int n_;
    long next_seq_ = 0;
    long next_id_ = 0;
    std::map<std::pair<NodeId, RoundIndex>, MessageValue> values_;
    std::map<std::pair<NodeId, RoundIndex>, DeliverySpec> specs_;
    std::map<std::pair<NodeId, RoundIndex>, long> send_seq_;
    std::vector<std::pair<NodeId, RoundIndex>> registration_order_;
    std::vector<Pending> pending_;
    std::set<std::tuple<NodeId, RoundIndex, NodeId>> seen_;
};

}  // namespace bcc
