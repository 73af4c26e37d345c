#include "bcc/rbcast.hpp"

#include <algorithm>

namespace bcc {

void BroadcastLedger::register_broadcast(NodeId sender, RoundIndex round, MessageValue value,
                                         const DeliverySpec& spec) {
    const std::pair<NodeId, RoundIndex> key{sender, round};
    if (values_.count(key))
        throw Error(Errc::DuplicateBroadcast, "second broadcast for (sender,round) refused");
    const long seq = next_seq_++;
    values_.emplace(key, std::move(value));
    specs_.emplace(key, spec);
    send_seq_.emplace(key, seq);
    registration_order_.push_back(key);

    if (round == -1 || spec.mode == DeliverySpec::Mode::None) return;
    for (NodeId receiver = 1; receiver <= n_; ++receiver) {
        bool delayed = false;
        if (spec.mode == DeliverySpec::Mode::EarlyOnly)
            delayed = std::find(spec.early.begin(), spec.early.end(), receiver) == spec.early.end();
        pending_.push_back(Pending{next_id_++, seq, sender, round, receiver, delayed});
    }
}

bool BroadcastLedger::registered(NodeId sender, RoundIndex round) const {
    return values_.count({sender, round}) > 0;
}

const MessageValue& BroadcastLedger::value_of(NodeId sender, RoundIndex round) const {
    return values_.at({sender, round});
}

const DeliverySpec& BroadcastLedger::spec_of(NodeId sender, RoundIndex round) const {
    return specs_.at({sender, round});
}

std::vector<NodeId> BroadcastLedger::stable_vector_candidates() const {
    std::vector<NodeId> out;
    for (const auto& [sender, round] : registration_order_) {
        if (round != -1) continue;
        if (specs_.at({sender, round}).mode == DeliverySpec::Mode::None) continue;
        out.push_back(sender);
    }
    return out;
}

void BroadcastLedger::schedule(NodeId sender, RoundIndex round, NodeId receiver, bool delayed) {
    pending_.push_back(Pending{next_id_++, send_seq_.at({sender, round}), sender, round, receiver, delayed});
}

void BroadcastLedger::mark_seen(NodeId sender, RoundIndex round, NodeId receiver) {
    seen_.insert({sender, round, receiver});
}

bool BroadcastLedger::seen(NodeId sender, RoundIndex round, NodeId receiver) const {
    return seen_.count({sender, round, receiver}) > 0;
}

std::vector<BroadcastLedger::Pending> BroadcastLedger::eligible() const {
    // FIFO per channel: only the earliest pending delivery of each
    // (sender, receiver) channel may dispatch.
    std::map<std::pair<NodeId, NodeId>, Pending> heads;
    for (const Pending& p : pending_) {
        auto key = std::make_pair(p.sender, p.receiver);
        auto it = heads.find(key);
        if (it == heads.end() || p.seq < it->second.seq) heads[key] = p;
    }
    std::vector<Pending> normal, delayed;
    for (const auto& [key, p] : heads) (p.delayed ? delayed : normal).push_back(p);
    return normal.empty() ? delayed : normal;
}

BroadcastLedger::Pending BroadcastLedger::pop(long pending_id) {
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const Pending& p) { return p.id == pending_id; });
    if (it == pending_.end())
        throw Error(Errc::NoPendingDeliveries, "no pending delivery with the given id");
    Pending out = *it;
    pending_.erase(it);
    return out;
}

}  // namespace bcc
