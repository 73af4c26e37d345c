#include "bcc/analysis.hpp"

#include <algorithm>
#include <sstream>

namespace bcc {

using nlohmann::json;

TraceView build_trace_view(const ExecutionTrace& trace) {
    TraceView view;
    view.config = execution_config_from_json(trace.config_json);
    view.seed = trace.seed;
    view.t_end = compute_t_end(view.config.params);
    for (const auto& [id, strategy] : view.config.faulty) view.faulty.insert(id);
    for (NodeId id = 1; id <= view.config.params.n; ++id)
        if (!view.faulty.count(id)) view.fault_free.push_back(id);

    for (const TraceEvent& e : trace.events) {
        switch (e.kind) {
            case EventKind::SvReturn:
                if (!view.faulty.count(e.node)) view.sv[e.node] = *e.sv_set;
                break;
            case EventKind::RbSend:
                if (e.round >= 0)
                    view.broadcasts.emplace(std::make_pair(e.sender, e.round),
                                            std::get<RoundMessage>(*e.value));
                break;
            case EventKind::Verify:
                // Definition 5: a fault-free verifier adding (h,j,t-1)
                // marks node j's round t-1 execution verified.
                if (e.ok && e.round >= 1 && !view.faulty.count(e.node))
                    view.verified.insert({e.sender, e.round - 1});
                break;
            case EventKind::HCompute:
                view.h.emplace(std::make_pair(e.node, e.round), *e.polytope);
                break;
            case EventKind::RcFreeze:
                view.rc.emplace(std::make_pair(e.node, e.round), *e.rc);
                break;
            case EventKind::Decide:
                view.decisions.emplace(e.node, *e.polytope);
                view.decided_t_end.emplace(e.node, e.t_end);
                break;
            default: break;
        }
    }
    return view;
}

const MessageSet& recovered_rc(const TraceView& view, NodeId id, int t) {
    if (!view.is_faulty(id)) {
        auto it = view.rc.find({id, t});
        if (it == view.rc.end())
            throw Error(Errc::IncompleteTrace,
                        "missing rc_freeze for node " + std::to_string(id));
        return it->second;
    }
    auto it = view.broadcasts.find({id, t + 1});
    if (it == view.broadcasts.end())
        throw Error(Errc::IncompleteTrace,
                    "missing verified round " + std::to_string(t + 1) + " broadcast of node " +
                        std::to_string(id));
    return it->second.snapshot;
}

const Polytope& recovered_h(const TraceView& view, NodeId id, int t) {
    if (!view.is_faulty(id)) {
        auto it = view.h.find({id, t});
        if (it == view.h.end())
            throw Error(Errc::IncompleteTrace, "missing h_compute for node " + std::to_string(id));
        return it->second;
    }
    auto it = view.broadcasts.find({id, t + 1});
    if (it == view.broadcasts.end())
        throw Error(Errc::IncompleteTrace, "missing broadcast for verified-faulty node");
    return it->second.h;
}

TransitionMatrix build_matrix(const TraceView& view, int t) {
    if (t < 1) throw Error(Errc::IncompleteTrace, "transition matrices start at round 1");
    const int n = view.config.params.n;
    TransitionMatrix m;
    m.round = t;
    m.entries.assign(static_cast<std::size_t>(n),
                     std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));

    for (NodeId i = 1; i <= n; ++i) {
        auto& row = m.entries[static_cast<std::size_t>(i - 1)];
        if (!view.in_v_minus_fvbar(i, t)) {
            for (auto& cell : row) cell = Rational(1, n);
            continue;
        }
        const MessageSet& rc = recovered_rc(view, i, t);
        const auto& tuples = std::get<std::vector<PolytopeTuple>>(rc);
        const Rational weight(1, static_cast<long>(tuples.size()));
        for (const PolytopeTuple& tuple : tuples) {
            if (tuple.round != t - 1) continue;
            row[static_cast<std::size_t>(tuple.sender - 1)] = weight;
        }
    }
    return m;
}

PolytopeVector matrix_apply(const TransitionMatrix& m, const PolytopeVector& v) {
    if (v.size() != static_cast<std::size_t>(m.n()))
        throw Error(Errc::WeightMismatch, "matrix/vector size mismatch");
    PolytopeVector out;
    out.reserve(v.size());
    for (const auto& row : m.entries) {
        WeightVector weights;
        weights.weights = row;
        out.push_back(linear_combination(v, weights));
    }
    return out;
}

ErgodicityCoefficients ergodicity(const TransitionMatrix& m) {
    const int n = m.n();
    for (const auto& row : m.entries) {
        Rational sum(0);
        for (const Rational& cell : row) {
            if (cell < 0) throw Error(Errc::NotStochastic, "negative matrix entry");
            sum += cell;
        }
        if (sum != 1) throw Error(Errc::NotStochastic, "row does not sum to 1");
    }
    ErgodicityCoefficients out{Rational(0), Rational(0)};
    Rational min_overlap(2);
    for (int i1 = 1; i1 <= n; ++i1) {
        for (int i2 = i1 + 1; i2 <= n; ++i2) {
            Rational overlap(0);
            for (int k = 1; k <= n; ++k) {
                Rational diff = abs(m.at(i1, k) - m.at(i2, k));
                if (diff > out.delta) out.delta = diff;
                overlap += std::min(m.at(i1, k), m.at(i2, k));
            }
            if (overlap < min_overlap) min_overlap = overlap;
        }
    }
    if (n > 1) out.lambda = 1 - min_overlap;
    return out;
}

TransitionMatrix matrix_product(const TransitionMatrix& a, const TransitionMatrix& b) {
    const int n = a.n();
    TransitionMatrix out;
    out.round = a.round;
    out.entries.assign(static_cast<std::size_t>(n),
                       std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= n; ++k) {
            Rational sum(0);
            for (int q = 1; q <= n; ++q) sum += a.at(i, q) * b.at(q, k);
            out.entries[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] = sum;
        }
    return out;
}

PolytopeVector initial_vector(const TraceView& view) {
    const int d = view.config.params.d;
    PolytopeVector v;
    for (NodeId id = 1; id <= view.config.params.n; ++id) {
        if (view.in_v_minus_fvbar(id, 0)) {
            v.push_back(recovered_h(view, id, 0));
        } else {
            Point origin;
            origin.coords.assign(static_cast<std::size_t>(d), Rational(0));
            v.push_back(Polytope{d, {origin}});
        }
    }
    return v;
}

Polytope compute_I_Z(const TraceView& view) {
    if (view.sv.empty()) throw Error(Errc::IncompleteTrace, "no stable-vector snapshots");
    auto it = view.sv.begin();
    InputSnapshot z = it->second;
    for (++it; it != view.sv.end(); ++it) {
        InputSnapshot next;
        std::set_intersection(z.begin(), z.end(), it->second.begin(), it->second.end(),
                              std::back_inserter(next));
        z = std::move(next);
    }
    std::vector<Point> xz;
    xz.reserve(z.size());
    for (const InputTuple& t : z) xz.push_back(t.x);
    return safe_area(view.config.params.d, xz, view.config.params.f);
}

namespace {

std::string fmt_pair(NodeId i, NodeId j, int t) {
    std::ostringstream out;
    out << "nodes " << i << "," << j << " round " << t;
    return out.str();
}

// A tampered or truncated trace must surface as a failing check, not as
// an exception escaping the suite.
template <typename Fn>
void run_check(CheckReport& report, const char* name, Fn&& body) {
    CheckResult c{name, true, ""};
    try {
        body(c);
    } catch (const std::exception& e) {
        c.pass = false;
        c.witness = e.what();
    }
    report.checks.push_back(std::move(c));
}

Polytope fault_free_input_hull(const TraceView& view) {
    std::vector<Point> inputs;
    for (NodeId id : view.fault_free)
        inputs.push_back(view.config.inputs[static_cast<std::size_t>(id - 1)]);
    return hull(view.config.params.d, inputs);
}

void check_termination(const TraceView& view, CheckResult& c) {
    for (NodeId id : view.fault_free) {
        auto it = view.decisions.find(id);
        if (it == view.decisions.end()) {
            c.pass = false;
            c.witness = "node " + std::to_string(id) + " never decided";
            return;
        }
        if (view.decided_t_end.at(id) != view.t_end) {
            c.pass = false;
            c.witness = "node " + std::to_string(id) + " decided at wrong round";
            return;
        }
        if (it->second != view.h.at({id, view.t_end})) {
            c.pass = false;
            c.witness = "node " + std::to_string(id) + " decision differs from h[t_end]";
            return;
        }
    }
}

void check_validity(const TraceView& view, CheckResult& c) {
    const Polytope bound = fault_free_input_hull(view);
    for (NodeId id : view.fault_free) {
        for (int t = 0; t <= view.t_end; ++t) {
            auto it = view.h.find({id, t});
            if (it == view.h.end()) {
                c.pass = false;
                c.witness = "missing h for node " + std::to_string(id) + " round " +
                            std::to_string(t);
                return;
            }
            if (!contains_polytope(bound, it->second)) {
                c.pass = false;
                c.witness = "h escapes input hull: node " + std::to_string(id) + " round " +
                            std::to_string(t);
                return;
            }
        }
    }
}

void check_nonemptiness(const TraceView& view, CheckResult& c) {
    for (NodeId id = 1; id <= view.config.params.n; ++id) {
        for (int t = 0; t <= view.t_end; ++t) {
            if (!view.in_v_minus_fvbar(id, t)) continue;
            if (view.is_faulty(id) && t == view.t_end) continue;  // no round t_end+1 message
            if (recovered_h(view, id, t).empty()) {
                c.pass = false;
                c.witness = "empty h: node " + std::to_string(id) + " round " + std::to_string(t);
                return;
            }
        }
    }
}

void check_agreement(const TraceView& view, CheckResult& c) {
    const Rational eps_sq = squared(view.config.params.epsilon);
    for (std::size_t a = 0; a < view.fault_free.size(); ++a) {
        for (std::size_t b = a + 1; b < view.fault_free.size(); ++b) {
            const NodeId i = view.fault_free[a], j = view.fault_free[b];
            Rational dsq = hausdorff_squared(view.decisions.at(i), view.decisions.at(j));
            if (dsq >= eps_sq) {
                c.pass = false;
                c.witness = "decision Hausdorff >= epsilon: " + fmt_pair(i, j, view.t_end);
                return;
            }
        }
    }
}

void check_round_bound(const TraceView& view, CheckResult& c) {
    const Params& p = view.config.params;
    const Rational alpha_sq = squared(Rational(p.n - 1, p.n));
    Rational bound = Rational(p.d) * Rational(p.n) * Rational(p.n) *
                     std::max(squared(p.upper), squared(p.lower));
    for (int t = 0; t <= view.t_end; ++t) {
        if (t >= 1) bound *= alpha_sq;
        for (std::size_t a = 0; a < view.fault_free.size(); ++a) {
            for (std::size_t b = a + 1; b < view.fault_free.size(); ++b) {
                const NodeId i = view.fault_free[a], j = view.fault_free[b];
                Rational dsq = hausdorff_squared(view.h.at({i, t}), view.h.at({j, t}));
                if (dsq > bound) {
                    c.pass = false;
                    c.witness = "alpha^t bound violated: " + fmt_pair(i, j, t);
                    return;
                }
            }
        }
    }
}

void check_replay(const TraceView& view, CheckResult& c) {
    for (const auto& [key, rc] : view.rc) {
        const auto& [id, t] = key;
        if (t < 0) continue;
        if (function_H(rc, t, view.config.params) != view.h.at(key)) {
            c.pass = false;
            c.witness = "H(Rc) mismatch: node " + std::to_string(id) + " round " + std::to_string(t);
            return;
        }
    }
}

void check_matrices(const TraceView& view, CheckReport& report) {
    CheckResult equiv{"matrix-equivalence", true, ""};
    CheckResult lemma4{"ergodicity-lambda-bound", true, ""};
    CheckResult claim1{"delta-product-bound", true, ""};
    CheckResult vanish{"unverified-column-vanishing", true, ""};

    const Params& p = view.config.params;
    const Rational alpha(p.n - 1, p.n);

    try {
        PolytopeVector v = initial_vector(view);
        TransitionMatrix product;
        Rational lambda_product(1);

        for (int t = 1; t <= view.t_end; ++t) {
            TransitionMatrix m = build_matrix(view, t);
            ErgodicityCoefficients coeffs = ergodicity(m);
            if (coeffs.lambda > alpha && lemma4.pass) {
                lemma4.pass = false;
                lemma4.witness = "lambda(M[" + std::to_string(t) + "]) > 1-1/n";
            }
            // Lemma 4 first bullet: every row pair shares a fault-free
            // column with entries >= 1/n.
            for (int i = 1; i <= p.n && lemma4.pass; ++i) {
                for (int j = 1; j <= p.n && lemma4.pass; ++j) {
                    bool found = false;
                    for (NodeId g : view.fault_free) {
                        if (m.at(i, g) >= Rational(1, p.n) && m.at(j, g) >= Rational(1, p.n)) {
                            found = true;
                            break;
                        }
                    }
                    if (!found) {
                        lemma4.pass = false;
                        lemma4.witness = "no common fault-free column: " + fmt_pair(i, j, t);
                    }
                }
            }

            lambda_product *= coeffs.lambda;
            product = (t == 1) ? m : matrix_product(m, product);  // backward product
            ErgodicityCoefficients star = ergodicity(product);
            if (star.delta > lambda_product && claim1.pass) {
                claim1.pass = false;
                claim1.witness = "delta(M*) > prod lambda at round " + std::to_string(t);
            }

            for (NodeId b = 1; b <= p.n && vanish.pass; ++b) {
                if (view.in_v_minus_fvbar(b, 0)) continue;
                for (NodeId i = 1; i <= p.n; ++i) {
                    if (!view.in_v_minus_fvbar(i, t)) continue;
                    if (product.at(i, b) != 0) {
                        vanish.pass = false;
                        vanish.witness =
                            "M*[" + std::to_string(t) + "] column " + std::to_string(b) +
                            " non-zero in row " + std::to_string(i);
                        break;
                    }
                }
            }

            v = matrix_apply(m, v);
            for (NodeId i = 1; i <= p.n && equiv.pass; ++i) {
                if (!view.in_v_minus_fvbar(i, t)) continue;
                if (view.is_faulty(i) && t == view.t_end) continue;
                if (v[static_cast<std::size_t>(i - 1)] != recovered_h(view, i, t)) {
                    equiv.pass = false;
                    equiv.witness = "v[" + std::to_string(t) + "] != h for node " + std::to_string(i);
                }
            }
        }
    } catch (const std::exception& e) {
        equiv.pass = false;
        equiv.witness = std::string("matrix reconstruction failed: ") + e.what();
    }

    report.checks.push_back(std::move(equiv));
    report.checks.push_back(std::move(lemma4));
    report.checks.push_back(std::move(claim1));
    report.checks.push_back(std::move(vanish));
}

void check_iz(const TraceView& view, CheckResult& c) {
    const Polytope iz = compute_I_Z(view);
    for (NodeId id = 1; id <= view.config.params.n; ++id) {
        for (int t = 0; t <= view.t_end; ++t) {
            if (!view.in_v_minus_fvbar(id, t)) continue;
            if (view.is_faulty(id) && t == view.t_end) continue;
            if (!contains_polytope(recovered_h(view, id, t), iz)) {
                c.pass = false;
                c.witness = "I_Z not contained: node " + std::to_string(id) + " round " +
                            std::to_string(t);
                return;
            }
        }
    }
}

void check_unverified_exclusion(const TraceView& view, CheckResult& c) {
    for (NodeId b : view.faulty) {
        // verified rounds of a faulty node must form a prefix
        int first_unverified = 0;
        while (view.is_verified(b, first_unverified)) ++first_unverified;
        for (int r = first_unverified; r < view.t_end; ++r) {
            if (view.is_verified(b, r)) {
                c.pass = false;
                c.witness = "node " + std::to_string(b) + " re-verified at round " +
                            std::to_string(r) + " after being unverified";
                return;
            }
        }
        // and its tuples must be absent from later fault-free snapshots
        for (int tau = first_unverified; tau < view.t_end; ++tau) {
            for (NodeId i : view.fault_free) {
                auto it = view.rc.find({i, tau + 1});
                if (it == view.rc.end()) continue;
                const auto& tuples = std::get<std::vector<PolytopeTuple>>(it->second);
                for (const PolytopeTuple& tuple : tuples) {
                    if (tuple.sender == b && tuple.round == tau) {
                        c.pass = false;
                        c.witness = "unverified node " + std::to_string(b) + " present in Rc[" +
                                    std::to_string(tau + 1) + "] of node " + std::to_string(i);
                        return;
                    }
                }
            }
        }
    }
}

}  // namespace

json CheckReport::to_json() const {
    json arr = json::array();
    for (const CheckResult& c : checks) {
        json e{{"name", c.name}, {"pass", c.pass}};
        if (!c.pass) e["witness"] = c.witness;
        arr.push_back(e);
    }
    return json{{"pass", all_pass()}, {"checks", arr}};
}

CheckReport check_suite(const ExecutionTrace& trace) {
    const TraceView view = build_trace_view(trace);
    CheckReport report;
    run_check(report, "termination", [&](CheckResult& c) { check_termination(view, c); });
    run_check(report, "validity", [&](CheckResult& c) { check_validity(view, c); });
    run_check(report, "epsilon-agreement", [&](CheckResult& c) { check_agreement(view, c); });
    run_check(report, "nonemptiness", [&](CheckResult& c) { check_nonemptiness(view, c); });
    run_check(report, "contraction-bound", [&](CheckResult& c) { check_round_bound(view, c); });
    run_check(report, "h-recompute", [&](CheckResult& c) { check_replay(view, c); });
    check_matrices(view, report);
    run_check(report, "optimality-lower-bound", [&](CheckResult& c) { check_iz(view, c); });
    run_check(report, "unverified-exclusion",
              [&](CheckResult& c) { check_unverified_exclusion(view, c); });
    return report;
}

}  // namespace bcc
