#pragma once

#include <map>

#include "bcc/adversary.hpp"
#include "bcc/trace.hpp"

namespace bcc {

struct ExecutionConfig {
    Params params;
    std::vector<Point> inputs;  // one per node, id order
    std::map<NodeId, AdversaryStrategy> faulty;
    SchedulerPolicy scheduler;

    void validate() const;  // throws ConfigInvalid
};

nlohmann::json execution_config_to_json(const ExecutionConfig& config);
ExecutionConfig execution_config_from_json(const nlohmann::json& j);

// Runs one execution to completion: starts every node, performs the
// stable-vector phase, then drains deliveries under the seeded scheduler.
// Throws DeadlockDetected if the queue empties before every fault-free
// node has decided.
ExecutionTrace run_execution(const ExecutionConfig& config, std::uint64_t seed);

}  // namespace bcc
