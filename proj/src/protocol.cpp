#include "bcc/protocol.hpp"

#include <map>

namespace bcc {

void Params::validate() const {
    if (n < 2) throw Error(Errc::ConfigInvalid, "n must be at least 2");
    if (f < 0) throw Error(Errc::ConfigInvalid, "f must be non-negative");
    if (d != 1 && d != 2) throw Error(Errc::ConfigInvalid, "d must be 1 or 2");
    if (n < (d + 2) * f + 1) throw Error(Errc::ConfigInvalid, "n >= (d+2)f+1 violated");
    if (epsilon <= 0) throw Error(Errc::ConfigInvalid, "epsilon must be positive");
    if (lower > upper) throw Error(Errc::ConfigInvalid, "mu must not exceed U");
}

int compute_t_end(const Params& params) {
    const Rational alpha_sq = squared(Rational(params.n - 1, params.n));
    const Rational eps_sq = squared(params.epsilon);
    const Rational bound_base =
        Rational(params.d) * Rational(params.n) * Rational(params.n) *
        std::max(squared(params.upper), squared(params.lower));

    Rational acc = bound_base;
    for (int t = 1;; ++t) {
        acc *= alpha_sq;
        if (acc < eps_sq) return t;
    }
}

namespace {

Polytope function_H_round0(const std::vector<SnapshotTuple>& V, const Params& params) {
    // N(x,k): how many snapshot senders l report (x,k,-1).
    std::map<InputTuple, int> counts;
    for (const SnapshotTuple& tuple : V)
        for (const InputTuple& entry : tuple.snapshot) counts[entry] += 1;

    // Multiset X keeps one occurrence of x per qualifying (x,k) pair.
    std::vector<Point> X;
    for (const auto& [entry, count] : counts)
        if (count >= params.f + 1) X.push_back(entry.x);

    return safe_area(params.d, X, params.f);
}

Polytope function_H_averaging(const std::vector<PolytopeTuple>& V, const Params& params) {
    std::vector<Polytope> X;
    X.reserve(V.size());
    for (const PolytopeTuple& tuple : V) X.push_back(tuple.h);
    if (X.empty()) throw Error(Errc::EmptyOperand, "H: empty polytope multiset");
    (void)params;
    return linear_combination(X, WeightVector::uniform(X.size()));
}

}  // namespace

Polytope function_H(const MessageSet& V, RoundIndex t, const Params& params) {
    if (t == 0) {
        if (!std::holds_alternative<std::vector<SnapshotTuple>>(V))
            throw Error(Errc::ConfigInvalid, "H(V,0) expects round -1 snapshot tuples");
        return function_H_round0(std::get<std::vector<SnapshotTuple>>(V), params);
    }
    if (t < 0) throw Error(Errc::ConfigInvalid, "H requires t >= 0");
    if (!std::holds_alternative<std::vector<PolytopeTuple>>(V))
        throw Error(Errc::ConfigInvalid, "H(V,t) expects polytope tuples for t >= 1");
    return function_H_averaging(std::get<std::vector<PolytopeTuple>>(V), params);
}

bool verify(const Polytope& h, const MessageSet& V, NodeId j, RoundIndex t, const Params& params) {
    const std::size_t need = static_cast<std::size_t>(params.n - params.f);
    if (message_set_size(V) < need) return false;
    if (t == 0) return true;

    if (t == 1) {
        if (!std::holds_alternative<std::vector<SnapshotTuple>>(V)) return false;
        return h == function_H(V, 0, params);
    }

    // t >= 2
    if (!std::holds_alternative<std::vector<PolytopeTuple>>(V)) return false;
    const auto& tuples = std::get<std::vector<PolytopeTuple>>(V);
    for (const PolytopeTuple& tuple : tuples)
        if (tuple.round != t - 2) return false;
    if (!message_set_has_sender(V, j)) return false;
    return h == function_H(V, t - 1, params);
}

MessageSet add(MessageSet R, const Polytope& h, const MessageSet& V, NodeId j, RoundIndex t) {
    if (t == 0) {
        auto& set = std::get<std::vector<SnapshotTuple>>(R);
        set_insert(set, SnapshotTuple{std::get<std::vector<InputTuple>>(V), j});
    } else {
        auto& set = std::get<std::vector<PolytopeTuple>>(R);
        set_insert(set, PolytopeTuple{h, j, t - 1});
    }
    return R;
}

bool proceed(RoundIndex t, const MessageSet& R, const std::optional<PolytopeTuple>& own_prev,
             const Params& params) {
    const std::size_t need = static_cast<std::size_t>(params.n - params.f);
    if (message_set_size(R) < need) return false;
    if (t == 0) return true;
    if (!own_prev) return false;
    return set_contains(std::get<std::vector<PolytopeTuple>>(R), *own_prev);
}

Node::Node(NodeId id, Point input, const Params& params)
    : id_(id), input_(std::move(input)), params_(params), t_end_(compute_t_end(params)) {}

MessageSet& Node::mutable_R(RoundIndex t) {
    auto it = R_.find(t);
    if (it != R_.end()) return it->second;
    MessageSet fresh;
    if (t == -1)
        fresh = std::vector<InputTuple>{};
    else if (t == 0)
        fresh = std::vector<SnapshotTuple>{};
    else
        fresh = std::vector<PolytopeTuple>{};
    return R_.emplace(t, std::move(fresh)).first->second;
}

const MessageSet& Node::R(RoundIndex t) { return mutable_R(t); }

void Node::start(NodeContext& ctx) {
    started_ = true;
    ctx.rb_send(MessageValue{input_}, -1);
}

void Node::on_sv_return(const InputSnapshot& messages, NodeContext& ctx) {
    auto& r = std::get<std::vector<InputTuple>>(mutable_R(-1));
    for (const InputTuple& t : messages) set_insert(r, t);
    rc_.emplace(-1, MessageSet{messages});
    h_.emplace(-1, empty_polytope(params_.d));
    round_ = 0;
    ctx.log_round_advance(0);
    ctx.rb_send(MessageValue{RoundMessage{h_.at(-1), rc_.at(-1)}}, 0);
    scan_parked(ctx);
}

void Node::on_rb_receive_input(const Point& x, NodeId j, NodeContext& ctx) {
    auto& r = std::get<std::vector<InputTuple>>(mutable_R(-1));
    if (set_insert(r, InputTuple{x, j})) scan_parked(ctx);
}

void Node::on_rb_receive_round(const RoundMessage& m, NodeId j, RoundIndex t, NodeContext& ctx) {
    parked_.push_back(Parked{m.h, m.snapshot, j, t});
    scan_parked(ctx);
}

void Node::scan_parked(NodeContext& ctx) {
    // The line-10 wait: re-scan after every mutation of R until no parked
    // message can make progress; unblocked messages run in arrival order.
    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (std::size_t i = 0; i < parked_.size(); ++i) {
            if (!message_set_subset(parked_[i].V, mutable_R(parked_[i].round - 1))) continue;
            Parked msg = std::move(parked_[i]);
            parked_.erase(parked_.begin() + static_cast<std::ptrdiff_t>(i));
            process(msg, ctx);
            progressed = true;
            break;
        }
    }
}

void Node::process(const Parked& msg, NodeContext& ctx) {
    const bool ok = verify(msg.h, msg.V, msg.sender, msg.round, params_);
    ctx.log_verify(msg.sender, msg.round, ok);
    if (ok) {
        MessageSet& r = mutable_R(msg.round);
        r = add(std::move(r), msg.h, msg.V, msg.sender, msg.round);
        ctx.log_add(msg.sender, msg.round);
    }
    try_proceed(msg.round, ctx);
}

void Node::try_proceed(RoundIndex t, NodeContext& ctx) {
    if (proceeded_.count(t)) return;
    std::optional<PolytopeTuple> own;
    if (t >= 1) {
        auto it = h_.find(t - 1);
        if (it == h_.end()) return;
        own = PolytopeTuple{it->second, id_, t - 1};
    }
    if (!proceed(t, mutable_R(t), own, params_)) return;

    proceeded_.insert(t);
    rc_.insert_or_assign(t, mutable_R(t));  // frozen copy; R keeps growing
    ctx.log_rc_freeze(t, rc_.at(t));
    h_.insert_or_assign(t, function_H(rc_.at(t), t, params_));
    ctx.log_h_compute(t, h_.at(t));
    round_ = t + 1;
    ctx.log_round_advance(round_);
    if (t + 1 <= t_end_) {
        ctx.rb_send(MessageValue{RoundMessage{h_.at(t), rc_.at(t)}}, t + 1);
    } else {
        decision_ = h_.at(t);
        ctx.log_decide(*decision_);
    }
}

}  // namespace bcc
