#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "bcc/analysis.hpp"

using namespace bcc;

namespace {

ExecutionConfig base_config(int n, int f, int d = 1, const char* eps = "1/10") {
    ExecutionConfig cfg;
    cfg.params.n = n;
    cfg.params.f = f;
    cfg.params.d = d;
    cfg.params.epsilon = parse_rational(eps);
    cfg.params.upper = Rational(1);
    cfg.params.lower = Rational(0);
    for (int i = 1; i <= n; ++i) {
        if (d == 1) {
            cfg.inputs.push_back(make_point1(make_rational(i - 1, n)));
        } else {
            cfg.inputs.push_back(
                make_point2(make_rational(i - 1, n), make_rational((i * 3) % n, n)));
        }
    }
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    ExecutionConfig cfg = base_config(4, 1, 2);  // needs n >= (2+2)*1+1 = 5
    CHECK_THROWS_AS(run_execution(cfg, 1), Error);

    cfg = base_config(5, 1);
    cfg.inputs[0] = make_point1(Rational(3));  // outside [0,1]
    CHECK_THROWS_AS(run_execution(cfg, 1), Error);

    cfg = base_config(5, 0);
    AdversaryStrategy s;
    s.kind = StrategyKind::Silent;
    cfg.faulty.emplace(5, s);  // |faulty| > f
    CHECK_THROWS_AS(run_execution(cfg, 1), Error);
}

TEST_CASE("identical config and seed reproduce the trace byte for byte") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::Silent;
    s.after_round = -1;
    cfg.faulty.emplace(3, s);

    const std::string a = run_execution(cfg, 77).to_jsonl();
    const std::string b = run_execution(cfg, 77).to_jsonl();
    CHECK(a == b);
    const std::string c = run_execution(cfg, 78).to_jsonl();
    CHECK(a != c);
}

TEST_CASE("trace serialization round-trips byte for byte") {
    ExecutionConfig cfg = base_config(5, 0);
    const ExecutionTrace trace = run_execution(cfg, 5);
    const std::string text = trace.to_jsonl();
    std::istringstream in(text);
    const ExecutionTrace parsed = ExecutionTrace::from_jsonl(in);
    CHECK(parsed.to_jsonl() == text);
}

TEST_CASE("identical inputs reach the fixed point immediately") {
    ExecutionConfig cfg = base_config(5, 0);
    for (auto& x : cfg.inputs) x = make_point1(make_rational(1, 2));
    const TraceView view = build_trace_view(run_execution(cfg, 9));
    const Polytope fixed{1, {make_point1(make_rational(1, 2))}};
    for (NodeId id = 1; id <= 5; ++id) {
        for (int t = 0; t <= view.t_end; ++t) CHECK(view.h.at({id, t}) == fixed);
        CHECK(view.decisions.at(id) == fixed);
    }
}

TEST_CASE("silent adversary leaves n-f snapshots in every frozen set") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::Silent;
    s.after_round = -1;  // input only, silent from round 0
    cfg.faulty.emplace(5, s);

    const auto trace = run_execution(cfg, 31);
    const TraceView view = build_trace_view(trace);
    for (NodeId id : view.fault_free)
        for (int t = 0; t <= view.t_end; ++t)
            CHECK(message_set_size(view.rc.at({id, t})) == 4);

    // outputs stay inside the hull of the four fault-free inputs
    const Polytope bound = hull(1, {cfg.inputs[0], cfg.inputs[1], cfg.inputs[2], cfg.inputs[3]});
    for (NodeId id : view.fault_free) CHECK(contains_polytope(bound, view.decisions.at(id)));
    CHECK(check_suite(trace).all_pass());
}

TEST_CASE("stable vector returns nested prefixes of at least n-f messages") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ExecutionConfig cfg = base_config(6, 1);
        AdversaryStrategy s;
        s.kind = StrategyKind::HonestBadInput;
        s.bad_input = make_point1(Rational(1));
        cfg.faulty.emplace(2, s);

        const TraceView view = build_trace_view(run_execution(cfg, seed));
        std::vector<InputSnapshot> sets;
        for (const auto& [id, sv] : view.sv) {
            CHECK(sv.size() >= 5);
            sets.push_back(sv);
        }
        std::sort(sets.begin(), sets.end(),
                  [](const InputSnapshot& a, const InputSnapshot& b) { return a.size() < b.size(); });
        for (std::size_t i = 1; i < sets.size(); ++i)
            CHECK(is_subset(sets[i - 1], sets[i]));  // Fault-free Containment
    }
}

TEST_CASE("round -1 messages outside the sv prefix arrive via later deliveries") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::HonestBadInput;
    s.bad_input = make_point1(Rational(1));
    cfg.faulty.emplace(3, s);
    cfg.scheduler.sv_prefix = SchedulerPolicy::SvPrefix::Min;  // prefixes of exactly n-f

    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto trace = run_execution(cfg, seed);
        std::map<NodeId, std::set<NodeId>> heard;  // receiver -> round -1 senders
        for (const TraceEvent& e : trace.events) {
            if (e.kind == EventKind::SvReturn) {
                CHECK(e.sv_set->size() == 4);
                for (const InputTuple& t : *e.sv_set) heard[e.node].insert(t.sender);
            }
            if (e.kind == EventKind::Delivery && e.round == -1) heard[e.node].insert(e.sender);
        }
        // every registered round -1 broadcast reaches every node in the end
        for (NodeId receiver = 1; receiver <= 5; ++receiver)
            CHECK(heard[receiver] == std::set<NodeId>{1, 2, 3, 4, 5});
    }
}

TEST_CASE("communication properties hold on the trace") {
    ExecutionConfig cfg = base_config(6, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::WithholdPartial;
    s.withhold_round = 1;
    s.early_receiver = 2;
    cfg.faulty.emplace(4, s);

    for (std::uint64_t seed : {3ull, 14ull}) {
        const auto trace = run_execution(cfg, seed);
        const TraceView view = build_trace_view(trace);

        // Global Uniqueness: one registered value per (sender, round)
        std::set<std::pair<NodeId, RoundIndex>> sent;
        std::map<std::pair<NodeId, RoundIndex>, long> send_step;
        for (const TraceEvent& e : trace.events) {
            if (e.kind != EventKind::RbSend) continue;
            CHECK(sent.insert({e.sender, e.round}).second);
            send_step[{e.sender, e.round}] = e.step;
        }

        // Fault-free Liveness: every fault-free broadcast reaches every
        // fault-free node (round -1 may arrive inside the sv prefix).
        std::set<std::tuple<NodeId, RoundIndex, NodeId>> received;
        std::map<std::pair<NodeId, NodeId>, std::vector<long>> channel_rounds;
        for (const TraceEvent& e : trace.events) {
            if (e.kind == EventKind::Delivery) {
                received.insert({e.sender, e.round, e.node});
                channel_rounds[{e.sender, e.node}].push_back(send_step[{e.sender, e.round}]);
            }
            if (e.kind == EventKind::SvReturn)
                for (const InputTuple& t : *e.sv_set) received.insert({t.sender, -1, e.node});
        }
        for (const auto& [key, step_of_send] : send_step) {
            const auto& [sender, round] = key;
            if (view.is_faulty(sender)) continue;
            for (NodeId receiver : view.fault_free)
                CHECK(received.count({sender, round, receiver}) == 1);
        }

        // FIFO per channel: delivery order matches send order
        for (const auto& [channel, steps] : channel_rounds)
            CHECK(std::is_sorted(steps.begin(), steps.end()));

        CHECK(check_suite(trace).all_pass());
    }
}

TEST_CASE("withheld broadcast reaches the early receiver first") {
    ExecutionConfig cfg = base_config(5, 1);
    AdversaryStrategy s;
    s.kind = StrategyKind::WithholdPartial;
    s.withhold_round = 1;
    s.early_receiver = 2;
    cfg.faulty.emplace(4, s);
    cfg.scheduler.order = SchedulerPolicy::Order::FifoGlobal;
    cfg.scheduler.sv_prefix = SchedulerPolicy::SvPrefix::All;

    const auto trace = run_execution(cfg, 1);
    long early_step = -1;
    std::vector<long> late_steps;
    for (const TraceEvent& e : trace.events) {
        if (e.kind != EventKind::Delivery || e.sender != 4 || e.round != 1) continue;
        if (e.node == 2) early_step = e.step;
        else late_steps.push_back(e.step);
    }
    REQUIRE(early_step > 0);
    REQUIRE(late_steps.size() == 4);  // everyone else still gets it (drained)
    for (long step : late_steps) CHECK(step > early_step);
    CHECK(check_suite(trace).all_pass());
}

TEST_CASE("d=2 honest run decides within epsilon") {
    ExecutionConfig cfg = base_config(5, 0, 2, "3/10");
    const auto trace = run_execution(cfg, 11);
    const TraceView view = build_trace_view(trace);
    for (std::size_t a = 0; a < view.fault_free.size(); ++a)
        for (std::size_t b = a + 1; b < view.fault_free.size(); ++b)
            CHECK(hausdorff(view.decisions.at(view.fault_free[a]),
                            view.decisions.at(view.fault_free[b])) <
                  to_double(cfg.params.epsilon) + 1e-9);
    CHECK(check_suite(trace).all_pass());
}

TEST_CASE("scheduler policies are all drained and deterministic") {
    for (auto order : {SchedulerPolicy::Order::Random, SchedulerPolicy::Order::FifoGlobal,
                       SchedulerPolicy::Order::TargetedDelay}) {
        ExecutionConfig cfg = base_config(5, 1);
        AdversaryStrategy s;
        s.kind = StrategyKind::Silent;
        s.after_round = 2;
        cfg.faulty.emplace(1, s);
        cfg.scheduler.order = order;
        cfg.scheduler.delayed_senders = {2};
        const auto trace = run_execution(cfg, 21);
        CHECK(check_suite(trace).all_pass());
        CHECK(trace.to_jsonl() == run_execution(cfg, 21).to_jsonl());
    }
}
