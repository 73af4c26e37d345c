#pragma once

#include <set>

#include "bcc/simharness.hpp"

namespace bcc {

// Row-stochastic n x n rational matrix reconstructed for one round t >= 1.
struct TransitionMatrix {
    int round = 1;
    std::vector<std::vector<Rational>> entries;

    int n() const { return static_cast<int>(entries.size()); }
    const Rational& at(int i, int k) const {
        return entries[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)];
    }
};

using PolytopeVector = std::vector<Polytope>;  // index 0 holds node 1

struct ErgodicityCoefficients {
    Rational delta;
    Rational lambda;
};

// Typed view of a trace, indexed for the checks below.
struct TraceView {
    ExecutionConfig config;
    std::uint64_t seed = 0;
    int t_end = 0;
    std::set<NodeId> faulty;
    std::vector<NodeId> fault_free;
    std::map<NodeId, InputSnapshot> sv;                        // R^c[-1], fault-free
    std::map<std::pair<NodeId, int>, Polytope> h;              // h_compute by (node, t)
    std::map<std::pair<NodeId, int>, MessageSet> rc;           // rc_freeze by (node, t)
    std::map<std::pair<NodeId, int>, RoundMessage> broadcasts; // rb_send values, round >= 0
    std::set<std::pair<NodeId, int>> verified;                 // (subject, execution round)
    std::map<NodeId, Polytope> decisions;
    std::map<NodeId, int> decided_t_end;

    bool is_faulty(NodeId id) const { return faulty.count(id) > 0; }
    bool is_verified(NodeId id, int round) const { return verified.count({id, round}) > 0; }
    // V - F_v_bar[t]: fault-free nodes plus faulty nodes verified at t.
    bool in_v_minus_fvbar(NodeId id, int round) const {
        return !is_faulty(id) || is_verified(id, round);
    }
};

TraceView build_trace_view(const ExecutionTrace& trace);

// R^c_i[t] as the matrix construction sees it: the frozen snapshot for
// fault-free nodes, the snapshot recovered from the verified round t+1
// broadcast for verified-faulty nodes.
const MessageSet& recovered_rc(const TraceView& view, NodeId id, int t);
const Polytope& recovered_h(const TraceView& view, NodeId id, int t);

TransitionMatrix build_matrix(const TraceView& view, int t);

PolytopeVector matrix_apply(const TransitionMatrix& m, const PolytopeVector& v);

ErgodicityCoefficients ergodicity(const TransitionMatrix& m);  // throws NotStochastic

TransitionMatrix matrix_product(const TransitionMatrix& a, const TransitionMatrix& b);  // a*b

// Initial polytope vector v[0] per (I1)-(I3): traced h for fault-free,
// recovered h for verified-faulty, the origin for unverified-faulty.
PolytopeVector initial_vector(const TraceView& view);

Polytope compute_I_Z(const TraceView& view);

struct CheckResult {
    std::string name;
    bool pass = true;
    std::string witness;  // failure details
};

struct CheckReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const CheckResult& c : checks)
            if (!c.pass) return false;
        return true;
    }
    nlohmann::json to_json() const;
};

// Runs every per-trace claim check: termination, validity, epsilon
// agreement, nonemptiness, the contraction-bound chain, matrix
// equivalence, ergodicity bounds, unverified-column vanishing, I_Z
// containment, and snapshot replay.
CheckReport check_suite(const ExecutionTrace& trace);

}  // namespace bcc
