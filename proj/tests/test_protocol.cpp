#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "bcc/protocol.hpp"

using namespace bcc;

namespace {

Point pt1(long num, long den = 1) { return make_point1(make_rational(num, den)); }
Polytope interval(long a, long b) { return hull(1, {pt1(a), pt1(b)}); }

Params params_5_1_1() {
    Params p;
    p.n = 5;
    p.f = 1;
    p.d = 1;
    p.epsilon = make_rational(1, 10);
    p.upper = Rational(1);
    p.lower = Rational(0);
    return p;
}

InputSnapshot snapshot_of(std::initializer_list<std::pair<long, NodeId>> entries) {
    InputSnapshot s;
    for (const auto& [x, j] : entries) set_insert(s, InputTuple{pt1(x), j});
    return s;
}

// Independent oracle for H(V,0): explicit N(x,k) counting over the raw
// tuples, then intersection of hulls of complements-of-f, both written
// directly from the definitions.
Polytope function_H0_oracle(const std::vector<SnapshotTuple>& V, const Params& p) {
    std::map<std::pair<std::string, NodeId>, int> counts;
    std::map<std::pair<std::string, NodeId>, Point> points;
    for (const SnapshotTuple& t : V) {
        for (const InputTuple& e : t.snapshot) {
            auto key = std::make_pair(to_string(e.x[0]), e.sender);
            counts[key] += 1;
            points.emplace(key, e.x);
        }
    }
    std::vector<Point> X;
    for (const auto& [key, n] : counts)
        if (n >= p.f + 1) X.push_back(points.at(key));
    return safe_area(p.d, X, p.f);
}

// Records everything a node does, for handler-level tests.
struct RecordingContext final : NodeContext {
    std::vector<std::pair<MessageValue, RoundIndex>> sent;
    std::vector<std::tuple<NodeId, RoundIndex, bool>> verifies;
    std::vector<RoundIndex> h_computes;
    std::vector<RoundIndex> advances;
    int decides = 0;

    void rb_send(const MessageValue& value, RoundIndex round) override {
        sent.emplace_back(value, round);
    }
    void log_verify(NodeId sender, RoundIndex r, bool ok) override {
        verifies.emplace_back(sender, r, ok);
    }
    void log_add(NodeId, RoundIndex) override {}
    void log_rc_freeze(RoundIndex, const MessageSet&) override {}
    void log_h_compute(RoundIndex round, const Polytope&) override { h_computes.push_back(round); }
    void log_round_advance(RoundIndex round) override { advances.push_back(round); }
    void log_decide(const Polytope&) override { ++decides; }
};

}  // namespace

TEST_CASE("params validation enforces n >= (d+2)f+1 and n >= 2") {
    Params p = params_5_1_1();
    CHECK_NOTHROW(p.validate());
    p.n = 4;  // (1+2)*1+1 = 4 is fine for d=1
    CHECK_NOTHROW(p.validate());
    p.d = 2;  // now needs n >= 5
    CHECK_THROWS_AS(p.validate(), Error);
    p = params_5_1_1();
    p.n = 1;
    p.f = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = params_5_1_1();
    p.lower = Rational(2);
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("compute_t_end spot values and flip property") {
    Params p = params_5_1_1();
    CHECK(compute_t_end(p) == 18);

    // double-precision iteration oracle agrees away from ties
    {
        const double alpha = 1.0 - 1.0 / p.n;
        const double bound = std::sqrt(p.d * p.n * p.n * 1.0);
        double acc = bound;
        int t = 0;
        do {
            acc *= alpha;
            ++t;
        } while (acc >= 0.1);
        CHECK(t == 18);
    }

    // exact flip: alpha^(t-1) bound still >= epsilon
    const Rational alpha_sq = squared(Rational(4, 5));
    Rational acc = Rational(25);  // d n^2 max = 1*25*1
    for (int t = 1; t <= 17; ++t) acc *= alpha_sq;
    CHECK(acc >= squared(p.epsilon));
    acc *= alpha_sq;
    CHECK(acc < squared(p.epsilon));

    p.epsilon = Rational(6);
    CHECK(compute_t_end(p) == 1);  // t=0 is never returned

    p.lower = Rational(-2);  // max(U^2, mu^2) = 4
    p.epsilon = make_rational(1, 10);
    const Rational k4 = Rational(p.d) * Rational(25) * Rational(4);
    Rational acc4 = k4;
    int expected = 0;
    while (true) {
        acc4 *= alpha_sq;
        ++expected;
        if (acc4 < squared(p.epsilon)) break;
    }
    CHECK(compute_t_end(p) == expected);
    CHECK(expected > 18);  // the larger magnitude bound needs more rounds
}

TEST_CASE("function_H at t=0 matches the counting oracle") {
    const Params p = params_5_1_1();
    // four snapshot tuples, each containing the same four input tuples
    InputSnapshot base = snapshot_of({{1, 1}, {2, 2}, {5, 3}, {9, 4}});
    std::vector<SnapshotTuple> V;
    for (NodeId j = 1; j <= 4; ++j) V.push_back(SnapshotTuple{base, j});
    std::sort(V.begin(), V.end());

    Polytope expect = function_H0_oracle(V, p);
    CHECK(expect == interval(2, 5));  // frozen oracle value
    CHECK(function_H(MessageSet{V}, 0, p) == expect);
}

TEST_CASE("function_H at t=0 keeps one multiset entry per qualifying sender") {
    const Params p = params_5_1_1();
    // the same coordinate 5 endorsed under two senders; both pairs reach
    // f+1, so 5 enters the multiset twice: {2,5,5,9} -> [x_2,x_3] = [5,5]
    InputSnapshot base = snapshot_of({{2, 1}, {5, 2}, {5, 3}, {9, 4}});
    std::vector<SnapshotTuple> V;
    for (NodeId j = 1; j <= 4; ++j) V.push_back(SnapshotTuple{base, j});
    std::sort(V.begin(), V.end());

    Polytope got = function_H(MessageSet{V}, 0, p);
    CHECK(got == function_H0_oracle(V, p));
    CHECK(got == Polytope{1, {pt1(5)}});
}

TEST_CASE("function_H at t=0 drops under-endorsed pairs") {
    const Params p = params_5_1_1();
    InputSnapshot common = snapshot_of({{1, 1}, {2, 2}, {5, 3}, {9, 4}});
    InputSnapshot with_forgery = common;
    set_insert(with_forgery, InputTuple{pt1(100), 5});  // claimed by one snapshot only
    std::vector<SnapshotTuple> V{{common, 1}, {common, 2}, {common, 3}, {with_forgery, 4}};
    std::sort(V.begin(), V.end());

    Polytope got = function_H(MessageSet{V}, 0, p);
    CHECK(got == function_H0_oracle(V, p));
    CHECK(got == interval(2, 5));  // N(100,5) = 1 < f+1
}

TEST_CASE("function_H at t>=1 is the uniform-weight combination") {
    const Params p = params_5_1_1();
    std::vector<PolytopeTuple> V{{interval(0, 2), 1, 1}, {interval(2, 4), 2, 1}};
    std::sort(V.begin(), V.end());
    CHECK(function_H(MessageSet{V}, 2, p) == interval(1, 3));
}

TEST_CASE("verify cases follow the three-round structure") {
    const Params p = params_5_1_1();  // n-f = 4

    std::vector<SnapshotTuple> V0;
    InputSnapshot base = snapshot_of({{1, 1}, {2, 2}, {5, 3}, {9, 4}});
    for (NodeId j = 1; j <= 4; ++j) V0.push_back(SnapshotTuple{base, j});
    std::sort(V0.begin(), V0.end());

    SUBCASE("t=0 checks only the size") {
        CHECK(verify(empty_polytope(1), MessageSet{V0}, 2, 0, p));
        std::vector<SnapshotTuple> small(V0.begin(), V0.begin() + 3);
        CHECK(!verify(empty_polytope(1), MessageSet{small}, 2, 0, p));
    }

    SUBCASE("t=1 additionally checks h = H(V,0)") {
        const Polytope good = function_H(MessageSet{V0}, 0, p);
        CHECK(verify(good, MessageSet{V0}, 2, 1, p));
        CHECK(!verify(interval(0, 9), MessageSet{V0}, 2, 1, p));
    }

    SUBCASE("t>=2 additionally requires the sender's own previous tuple") {
        std::vector<PolytopeTuple> V2{{interval(0, 2), 1, 0},
                                      {interval(1, 3), 2, 0},
                                      {interval(2, 4), 3, 0},
                                      {interval(3, 5), 4, 0}};
        std::sort(V2.begin(), V2.end());
        const Polytope good = function_H(MessageSet{V2}, 1, p);
        CHECK(verify(good, MessageSet{V2}, 2, 2, p));   // sender 2 present
        CHECK(!verify(good, MessageSet{V2}, 5, 2, p));  // sender 5 absent
        CHECK(!verify(interval(0, 9), MessageSet{V2}, 2, 2, p));
        // wrong round tags are rejected outright
        std::vector<PolytopeTuple> stale{{interval(0, 2), 1, 0},
                                         {interval(1, 3), 2, 0},
                                         {interval(2, 4), 3, 0},
                                         {interval(3, 5), 4, 1}};
        std::sort(stale.begin(), stale.end());
        CHECK(!verify(good, MessageSet{stale}, 2, 3, p));
    }
}

TEST_CASE("add stores the round-specific tuple and is idempotent") {
    std::vector<SnapshotTuple> R0;
    InputSnapshot snap = snapshot_of({{1, 1}, {2, 2}});
    MessageSet r{R0};
    r = add(std::move(r), interval(0, 9), MessageSet{snap}, 3, 0);
    const auto& stored = std::get<std::vector<SnapshotTuple>>(r);
    REQUIRE(stored.size() == 1);
    CHECK(stored[0].sender == 3);      // (V, j, -1), not (h, j, -1)
    CHECK(stored[0].snapshot == snap);

    MessageSet r3{std::vector<PolytopeTuple>{}};
    r3 = add(std::move(r3), interval(1, 2), MessageSet{snap}, 4, 3);
    const auto& stored3 = std::get<std::vector<PolytopeTuple>>(r3);
    REQUIRE(stored3.size() == 1);
    CHECK(stored3[0].round == 2);  // (h, j, t-1)
    r3 = add(std::move(r3), interval(1, 2), MessageSet{snap}, 4, 3);
    CHECK(std::get<std::vector<PolytopeTuple>>(r3).size() == 1);
}

TEST_CASE("proceed thresholds") {
    const Params p = params_5_1_1();  // n-f = 4
    std::vector<PolytopeTuple> R;
    for (NodeId j = 1; j <= 3; ++j) R.push_back({interval(0, 1), j, 0});
    std::sort(R.begin(), R.end());
    CHECK(!proceed(0, MessageSet{R}, std::nullopt, p));  // |R| = 3 < 4

    PolytopeTuple own{interval(0, 1), 5, 0};
    R.push_back({interval(0, 1), 4, 0});
    std::sort(R.begin(), R.end());
    CHECK(proceed(0, MessageSet{R}, std::nullopt, p));
    CHECK(!proceed(1, MessageSet{R}, own, p));  // own tuple absent

    set_insert(R, own);
    CHECK(proceed(1, MessageSet{R}, own, p));
}

TEST_CASE("node walks round -1 through proceed and parks early messages") {
    Params p;
    p.n = 3;
    p.f = 0;
    p.d = 1;
    p.epsilon = Rational(1);
    p.upper = Rational(9);
    p.lower = Rational(0);

    Node node(1, pt1(0), p);
    RecordingContext ctx;
    node.start(ctx);
    REQUIRE(ctx.sent.size() == 1);
    CHECK(ctx.sent[0].second == -1);

    // a round-0 message arriving before sv_return parks on V ⊆ R[-1]
    InputSnapshot everyone = snapshot_of({{0, 1}, {5, 2}, {9, 3}});
    RoundMessage early{empty_polytope(1), MessageSet{everyone}};
    node.on_rb_receive_round(early, 2, 0, ctx);
    CHECK(node.parked_count() == 1);
    CHECK(ctx.verifies.empty());

    node.on_sv_return(everyone, ctx);
    CHECK(node.round() == 0);
    CHECK(node.parked_count() == 0);  // unblocked by R[-1] growth
    REQUIRE(ctx.verifies.size() == 1);
    CHECK(std::get<2>(ctx.verifies[0]));

    // remaining round-0 messages drive proceed: h[0] = hull of inputs (f=0)
    node.on_rb_receive_round(RoundMessage{empty_polytope(1), MessageSet{everyone}}, 3, 0, ctx);
    node.on_rb_receive_round(RoundMessage{empty_polytope(1), MessageSet{everyone}}, 1, 0, ctx);
    CHECK(node.round() == 1);
    CHECK(node.h(0) == interval(0, 9));
    REQUIRE(!ctx.h_computes.empty());
    CHECK(ctx.h_computes.back() == 0);
    CHECK(ctx.sent.back().second == 1);  // round-1 broadcast carries (h[0], Rc[0])
    const RoundMessage& m = std::get<RoundMessage>(ctx.sent.back().first);
    CHECK(m.h == interval(0, 9));
}

TEST_CASE("message with an unknown tuple in V stays parked forever") {
    Params p;
    p.n = 3;
    p.f = 0;
    p.d = 1;
    p.epsilon = Rational(1);
    p.upper = Rational(9);
    p.lower = Rational(0);

    Node node(1, pt1(0), p);
    RecordingContext ctx;
    node.start(ctx);
    InputSnapshot everyone = snapshot_of({{0, 1}, {5, 2}, {9, 3}});
    node.on_sv_return(everyone, ctx);

    InputSnapshot forged = everyone;
    set_insert(forged, InputTuple{pt1(100), 2});  // node 2 never broadcast 100
    node.on_rb_receive_round(RoundMessage{empty_polytope(1), MessageSet{forged}}, 2, 0, ctx);
    CHECK(node.parked_count() == 1);
    CHECK(ctx.verifies.empty());
}
