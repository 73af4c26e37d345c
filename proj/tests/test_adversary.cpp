#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bcc/analysis.hpp"

using namespace bcc;

namespace {

Point pt1(long num, long den = 1) { return make_point1(make_rational(num, den)); }
Polytope interval(long a, long b) { return hull(1, {pt1(a), pt1(b)}); }

Params params_6_1_1() {
    Params p;
    p.n = 6;
    p.f = 1;
    p.d = 1;
    p.epsilon = make_rational(1, 10);
    p.upper = Rational(1);
    p.lower = Rational(0);
    return p;
}

ExecutionConfig base_config(int n, int f, const char* eps = "1/10") {
    ExecutionConfig cfg;
    cfg.params.n = n;
    cfg.params.f = f;
    cfg.params.d = 1;
    cfg.params.epsilon = parse_rational(eps);
    cfg.params.upper = Rational(1);
    cfg.params.lower = Rational(0);
    for (int i = 1; i <= n; ++i) cfg.inputs.push_back(make_point1(make_rational(i - 1, n)));
    return cfg;
}

MessageValue round_message(const Polytope& h, std::vector<PolytopeTuple> tuples) {
    std::sort(tuples.begin(), tuples.end());
    return MessageValue{RoundMessage{h, MessageSet{tuples}}};
}

}  // namespace

TEST_CASE("silent drops every broadcast after the chosen round") {
    AdversaryStrategy s;
    s.kind = StrategyKind::Silent;
    s.after_round = 0;
    const Params p = params_6_1_1();
    const MessageValue input{pt1(0)};
    CHECK(apply_strategy(s, 6, input, -1, p).has_value());
    const MessageValue m0 = round_message(empty_polytope(1), {});
    CHECK(apply_strategy(s, 6, m0, 0, p).has_value());
    CHECK(!apply_strategy(s, 6, m0, 1, p).has_value());
    CHECK(!apply_strategy(s, 6, m0, 5, p).has_value());
}

TEST_CASE("malformed-polytope corrupts exactly the target broadcast") {
    AdversaryStrategy s;
    s.kind = StrategyKind::MalformedPolytope;
    s.target_round = 0;  // corrupts the round-1 broadcast
    const Params p = params_6_1_1();
    const MessageValue honest = round_message(interval(0, 1), {{interval(0, 1), 6, 0}});

    auto shaped = apply_strategy(s, 6, honest, 1, p);
    REQUIRE(shaped.has_value());
    const RoundMessage& m = std::get<RoundMessage>(shaped->value);
    CHECK(m.h != interval(0, 1));
    CHECK(m.snapshot == std::get<RoundMessage>(honest).snapshot);

    auto other = apply_strategy(s, 6, honest, 2, p);
    CHECK(std::get<RoundMessage>(other->value).h == interval(0, 1));
}

TEST_CASE("short-snapshot truncates V below n-f") {
    AdversaryStrategy s;
    s.kind = StrategyKind::ShortSnapshot;
    s.target_round = 1;
    const Params p = params_6_1_1();  // n-f = 5
    std::vector<PolytopeTuple> tuples;
    for (NodeId j = 1; j <= 6; ++j) tuples.push_back({interval(0, 1), j, 0});
    const MessageValue honest = round_message(interval(0, 1), tuples);

    auto shaped = apply_strategy(s, 6, honest, 2, p);
    REQUIRE(shaped.has_value());
    CHECK(message_set_size(std::get<RoundMessage>(shaped->value).snapshot) == 4);
}

TEST_CASE("stale-omission removes the sender's own tuple and keeps h consistent") {
    AdversaryStrategy s;
    s.kind = StrategyKind::StaleOmission;
    s.target_round = 1;  // corrupts the round-2 broadcast
    const Params p = params_6_1_1();
    std::vector<PolytopeTuple> tuples;
    for (NodeId j = 1; j <= 6; ++j) tuples.push_back({interval(0, static_cast<long>(j)), j, 0});
    const MessageValue honest =
        round_message(function_H(MessageSet{tuples}, 1, p), tuples);

    auto shaped = apply_strategy(s, 6, honest, 2, p);
    REQUIRE(shaped.has_value());
    const RoundMessage& m = std::get<RoundMessage>(shaped->value);
    CHECK(!message_set_has_sender(m.snapshot, 6));
    CHECK(message_set_size(m.snapshot) == 5);
    CHECK(m.h == function_H(m.snapshot, 1, p));  // only the own-tuple check fails
    CHECK(!verify(m.h, m.snapshot, 6, 2, p));
}

TEST_CASE("withhold-partial shapes delivery of one broadcast") {
    AdversaryStrategy s;
    s.kind = StrategyKind::WithholdPartial;
    s.withhold_round = 1;
    s.early_receiver = 3;
    const Params p = params_6_1_1();
    const MessageValue honest = round_message(interval(0, 1), {{interval(0, 1), 6, 0}});
    auto shaped = apply_strategy(s, 6, honest, 1, p);
    REQUIRE(shaped.has_value());
    CHECK(shaped->spec.mode == DeliverySpec::Mode::EarlyOnly);
    CHECK(shaped->spec.early == std::vector<NodeId>{3});
    CHECK(apply_strategy(s, 6, honest, 2, p)->spec.mode == DeliverySpec::Mode::Normal);
}

TEST_CASE("custom-script replays explicit actions") {
    AdversaryStrategy s;
    s.kind = StrategyKind::CustomScript;
    ScriptAction silent;
    silent.round = 1;
    silent.kind = ScriptAction::Kind::Silent;
    ScriptAction replace;
    replace.round = 2;
    replace.kind = ScriptAction::Kind::SendValue;
    replace.value = message_value_to_json(MessageValue{pt1(7)});
    s.script = {silent, replace};

    const Params p = params_6_1_1();
    const MessageValue honest = round_message(interval(0, 1), {{interval(0, 1), 6, 0}});
    CHECK(!apply_strategy(s, 6, honest, 1, p).has_value());
    auto shaped = apply_strategy(s, 6, honest, 2, p);
    REQUIRE(shaped.has_value());
    CHECK(std::get<Point>(shaped->value) == pt1(7));
    CHECK(apply_strategy(s, 6, honest, 0, p).has_value());  // unlisted rounds stay honest
}

TEST_CASE("strategy validation rejects out-of-range parameters") {
    const Params p = params_6_1_1();
    AdversaryStrategy s;
    s.kind = StrategyKind::HonestBadInput;
    CHECK_THROWS_AS(s.validate(p), Error);  // missing bad_input
    s.bad_input = pt1(2);                   // outside [0,1]
    CHECK_THROWS_AS(s.validate(p), Error);
    s.bad_input = pt1(1);
    CHECK_NOTHROW(s.validate(p));

    AdversaryStrategy stale;
    stale.kind = StrategyKind::StaleOmission;
    stale.target_round = 0;
    CHECK_THROWS_AS(stale.validate(p), Error);
}

TEST_CASE("deviating strategies acquire no VerifiedTag for the target round") {
    for (StrategyKind kind : {StrategyKind::MalformedPolytope, StrategyKind::ShortSnapshot,
                              StrategyKind::StaleOmission}) {
        ExecutionConfig cfg = base_config(6, 1);
        AdversaryStrategy s;
        s.kind = kind;
        s.target_round = (kind == StrategyKind::StaleOmission) ? 1 : 0;
        cfg.faulty.emplace(6, s);

        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            const TraceView view = build_trace_view(run_execution(cfg, seed));
            for (int r = s.target_round; r <= view.t_end; ++r)
                CHECK(!view.is_verified(6, r));
            // rounds before the deviation are verified in drained schedules
            for (int r = 0; r < s.target_round; ++r) CHECK(view.is_verified(6, r));
        }
    }
}

TEST_CASE("honest-bad-input nodes are verified through round t_end - 1") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::HonestBadInput;
    s.bad_input = pt1(1);  // far from the honest cluster but in range
    cfg.faulty.emplace(5, s);

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto trace = run_execution(cfg, seed);
        const TraceView view = build_trace_view(trace);
        for (int r = 0; r < view.t_end; ++r) CHECK(view.is_verified(5, r));
        CHECK(check_suite(trace).all_pass());
    }
}

TEST_CASE("unverified node's row becomes uniform 1/n in the transition matrix") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::MalformedPolytope;
    s.target_round = 0;
    cfg.faulty.emplace(5, s);

    const TraceView view = build_trace_view(run_execution(cfg, 4));
    const TransitionMatrix m = build_matrix(view, 1);
    for (int k = 1; k <= 5; ++k) CHECK(m.at(5, k) == make_rational(1, 5));
    // fault-free rows never weight the unverified node
    for (int i = 1; i <= 4; ++i) CHECK(m.at(i, 5) == 0);
}
