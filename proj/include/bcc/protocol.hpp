#pragma once

#include <map>
#include <optional>
#include <set>

#include "bcc/messages.hpp"

namespace bcc {

// Public protocol parameters, known to every node.
struct Params {
    int n = 0;
    int f = 0;
    int d = 1;
    Rational epsilon;
    Rational upper;  // U: upper bound on fault-free input coordinates
    Rational lower;  // mu: lower bound

    void validate() const;  // throws ConfigInvalid
};

// Smallest positive t with alpha^t * sqrt(d n^2 max(U^2, mu^2)) < epsilon,
// alpha = 1 - 1/n; compared as alpha^(2t) d n^2 max(U^2,mu^2) < epsilon^2
// so the search stays in exact rationals.
int compute_t_end(const Params& params);

// Round-state aggregation. t = 0 counts input endorsements and intersects
// the sub-multiset hulls; t >= 1 averages the received polytopes with
// uniform weights 1/|X|.
Polytope function_H(const MessageSet& V, RoundIndex t, const Params& params);

// Procedure Verify for a received ((h, V), j, t) message. Total function.
bool verify(const Polytope& h, const MessageSet& V, NodeId j, RoundIndex t, const Params& params);

// Procedure Add: returns R extended with the tuple the message contributes.
MessageSet add(MessageSet R, const Polytope& h, const MessageSet& V, NodeId j, RoundIndex t);

// Procedure Proceed. own_prev is (h[t-1], i, t-1); ignored for t = 0.
bool proceed(RoundIndex t, const MessageSet& R, const std::optional<PolytopeTuple>& own_prev,
             const Params& params);

// Interface through which a node acts on the world; implemented by the
// harness (broadcast scheduling + trace logging).
class NodeContext {
public:
    virtual ~NodeContext() = default;
    virtual void rb_send(const MessageValue& value, RoundIndex round) = 0;
    virtual void log_verify(NodeId sender, RoundIndex msg_round, bool ok) = 0;
    virtual void log_add(NodeId sender, RoundIndex msg_round) = 0;
    virtual void log_rc_freeze(RoundIndex round, const MessageSet& rc) = 0;
    virtual void log_h_compute(RoundIndex round, const Polytope& h) = 0;
    virtual void log_round_advance(RoundIndex round) = 0;
    virtual void log_decide(const Polytope& output) = 0;
};

// One node's state machine. The harness owns the instance and calls the
// event handlers from its single-threaded loop; handlers run lines 11-16
// to completion, which realizes the critical section.
class Node {
public:
    Node(NodeId id, Point input, const Params& params);

    void start(NodeContext& ctx);
    void on_sv_return(const InputSnapshot& messages, NodeContext& ctx);
    void on_rb_receive_input(const Point& x, NodeId j, NodeContext& ctx);
    void on_rb_receive_round(const RoundMessage& m, NodeId j, RoundIndex t, NodeContext& ctx);

    NodeId id() const { return id_; }
    const Point& input() const { return input_; }
    RoundIndex round() const { return round_; }
    int t_end() const { return t_end_; }
    bool decided() const { return decision_.has_value(); }
    const std::optional<Polytope>& decision() const { return decision_; }
    const Polytope& h(RoundIndex t) const { return h_.at(t); }
    const MessageSet& R(RoundIndex t);
    bool has_rc(RoundIndex t) const { return rc_.count(t) > 0; }
    const MessageSet& rc(RoundIndex t) const { return rc_.at(t); }
    std::size_t parked_count() const { return parked_.size(); }

private:
    struct Parked {
        Polytope h;
        MessageSet V;
        NodeId sender;
        RoundIndex round;
    };

    MessageSet& mutable_R(RoundIndex t);
    void scan_parked(NodeContext& ctx);
    void process(const Parked& msg, NodeContext& ctx);
    void try_proceed(RoundIndex t, NodeContext& ctx);

    NodeId id_;
    Point input_;
    Params params_;
    int t_end_;
    RoundIndex round_ = -1;
    bool started_ = false;
    std::map<RoundIndex, Polytope> h_;
    std::map<RoundIndex, MessageSet> R_;
    std::map<RoundIndex, MessageSet> rc_;
    std::set<RoundIndex> proceeded_;
    std::vector<Parked> parked_;  // line-10 waits, in arrival order
    std::optional<Polytope> decision_;
};

}  // namespace bcc
