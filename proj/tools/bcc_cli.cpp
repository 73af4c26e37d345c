#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bcc/analysis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bcc::Error(bcc::Errc::ConfigInvalid, "cannot open " + path);
    json j;
    in >> j;
    return j;
}

int exit_code_for(const bcc::Error& e) {
    switch (e.code()) {
        case bcc::Errc::ConfigInvalid: return 2;
        case bcc::Errc::DeadlockDetected: return 3;
        default: return 1;
    }
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("SEED")) return std::strtoull(env, nullptr, 10);
    return flag_seed;
}

void print_decisions(const bcc::ExecutionTrace& trace) {
    for (const bcc::TraceEvent& e : trace.events) {
        if (e.kind != bcc::EventKind::Decide) continue;
        std::cout << "node " << e.node << " decided at t_end=" << e.t_end << ": "
                  << bcc::polytope_to_json(*e.polytope).dump() << "\n";
    }
}

void write_round_csv(const bcc::ExecutionTrace& trace, const std::string& path) {
    const bcc::TraceView view = bcc::build_trace_view(trace);
    std::ofstream out(path);
    out << "round,max_pairwise_hausdorff\n";
    for (int t = 0; t <= view.t_end; ++t) {
        double worst = 0.0;
        for (std::size_t a = 0; a < view.fault_free.size(); ++a)
            for (std::size_t b = a + 1; b < view.fault_free.size(); ++b)
                worst = std::max(worst, bcc::hausdorff(view.h.at({view.fault_free[a], t}),
                                                       view.h.at({view.fault_free[b], t})));
        out << t << "," << worst << "\n";
    }
}

int cmd_run(const std::string& config_path, std::uint64_t seed, const std::string& trace_path,
            const std::string& csv_path) {
    const auto config = bcc::execution_config_from_json(load_json(config_path));
    const auto trace = bcc::run_execution(config, effective_seed(seed));
    if (!trace_path.empty()) trace.write_file(trace_path);
    if (!csv_path.empty()) write_round_csv(trace, csv_path);
    print_decisions(trace);
    return 0;
}

int cmd_check(const std::string& trace_path) {
    const auto trace = bcc::ExecutionTrace::from_file(trace_path);
    const auto report = bcc::check_suite(trace);
    std::cout << report.to_json().dump(2) << "\n";
    return report.all_pass() ? 0 : 1;
}

int cmd_oracle(const std::string& op, const std::string& input_path) {
    const json in = load_json(input_path);
    json out;
    if (op == "safe-area") {
        std::vector<bcc::Point> points;
        for (const auto& p : in.at("points")) points.push_back(bcc::point_from_json(p));
        out = bcc::polytope_to_json(
            bcc::safe_area(in.at("d").get<int>(), points, in.at("f").get<int>()));
    } else if (op == "hausdorff") {
        const auto h1 = bcc::polytope_from_json(in.at("h1"));
        const auto h2 = bcc::polytope_from_json(in.at("h2"));
        out = json{{"distance", bcc::hausdorff(h1, h2)},
                   {"distance_squared", bcc::rational_to_json(bcc::hausdorff_squared(h1, h2))}};
    } else if (op == "hl") {
        std::vector<bcc::Polytope> polytopes;
        for (const auto& h : in.at("polytopes")) polytopes.push_back(bcc::polytope_from_json(h));
        bcc::WeightVector weights;
        for (const auto& w : in.at("weights")) weights.weights.push_back(bcc::rational_from_json(w));
        out = bcc::polytope_to_json(bcc::linear_combination(polytopes, weights));
    } else if (op == "t-end") {
        bcc::Params params;
        params.n = in.at("n").get<int>();
        params.f = in.value("f", 0);
        params.d = in.at("d").get<int>();
        params.epsilon = bcc::rational_from_json(in.at("epsilon"));
        params.upper = bcc::rational_from_json(in.at("U"));
        params.lower = bcc::rational_from_json(in.at("mu"));
        out = json{{"t_end", bcc::compute_t_end(params)}};
    } else if (op == "i-z") {
        const int d = in.at("d").get<int>();
        const int f = in.at("f").get<int>();
        std::vector<bcc::InputSnapshot> snapshots;
        for (const auto& s : in.at("snapshots"))
            snapshots.push_back(bcc::input_snapshot_from_json(s));
        if (snapshots.empty()) throw bcc::Error(bcc::Errc::ConfigInvalid, "need snapshots");
        bcc::InputSnapshot z = snapshots[0];
        for (std::size_t i = 1; i < snapshots.size(); ++i) {
            bcc::InputSnapshot next;
            std::set_intersection(z.begin(), z.end(), snapshots[i].begin(), snapshots[i].end(),
                                  std::back_inserter(next));
            z = std::move(next);
        }
        std::vector<bcc::Point> xz;
        for (const auto& t : z) xz.push_back(t.x);
        out = bcc::polytope_to_json(bcc::safe_area(d, xz, f));
    } else {
        throw bcc::Error(bcc::Errc::ConfigInvalid, "unknown oracle op '" + op + "'");
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_campaign(const std::string& config_dir, int seeds) {
    std::vector<fs::path> configs;
    if (fs::is_directory(config_dir))
        for (const auto& entry : fs::directory_iterator(config_dir))
            if (entry.path().extension() == ".json") configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) {
        std::cerr << "campaign: no config files in " << config_dir << "\n";
        return 2;
    }

    int total = 0, failed = 0;
    for (const fs::path& path : configs) {
        const auto config = bcc::execution_config_from_json(load_json(path.string()));
        int pass_count = 0;
        for (int seed = 1; seed <= seeds; ++seed) {
            ++total;
            try {
                const auto trace = bcc::run_execution(config, static_cast<std::uint64_t>(seed));
                const auto report = bcc::check_suite(trace);
                if (report.all_pass()) {
                    ++pass_count;
                } else {
                    ++failed;
                    for (const auto& c : report.checks)
                        if (!c.pass)
                            std::cout << "FAIL " << path.filename().string() << " seed " << seed
                                      << ": " << c.name << " (" << c.witness << ")\n";
                }
            } catch (const bcc::Error& e) {
                ++failed;
                std::cout << "FAIL " << path.filename().string() << " seed " << seed << ": "
                          << e.what() << "\n";
            }
        }
        std::cout << path.filename().string() << ": " << pass_count << "/" << seeds << " pass\n";
    }
    std::cout << "campaign total: " << (total - failed) << "/" << total << " pass\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Byzantine convex consensus simulator and trace checker"};
    app.require_subcommand(1);

    std::string config_path, trace_path, csv_path, input_path, op, config_dir;
    std::uint64_t seed = 1;
    int seeds = 10;

    auto* run = app.add_subcommand("run", "run one execution");
    run->add_option("--config", config_path, "execution config JSON")->required();
    run->add_option("--seed", seed, "scheduler seed (env SEED overrides)");
    run->add_option("--trace", trace_path, "write the trace JSONL here");
    run->add_option("--csv", csv_path, "write per-round max Hausdorff CSV here");

    auto* check = app.add_subcommand("check", "verify a trace against every claim");
    check->add_option("--trace", trace_path, "trace JSONL file")->required();

    auto* oracle = app.add_subcommand("oracle", "exact geometry/protocol computations");
    oracle->add_option("--op", op, "safe-area|hausdorff|hl|t-end|i-z")->required();
    oracle->add_option("--input", input_path, "operation input JSON")->required();

    auto* campaign = app.add_subcommand("campaign", "run + check configs x seeds");
    campaign->add_option("--config-dir", config_dir, "directory of config JSON files")->required();
    campaign->add_option("--seeds", seeds, "seeds per config (1..k)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, trace_path, csv_path);
        if (check->parsed()) return cmd_check(trace_path);
        if (oracle->parsed()) return cmd_oracle(op, input_path);
        if (campaign->parsed()) return cmd_campaign(config_dir, seeds);
    } catch (const bcc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
