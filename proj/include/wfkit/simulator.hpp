#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "wfkit/trace.hpp"

namespace wfkit {

/// Homogeneous cluster with a shared filesystem. The reference configuration
/// is one 48-core node at unit speed behind a 10 Gbps (1.25e9 bytes/s) link.
struct PlatformSpec {
    int node_count = 1;
    int cores_per_node = 48;
    double speed_factor = 1.0;
    double fs_bandwidth_bytes_per_sec = 1.25e9;
    double per_file_latency_sec = 0.0;
};

struct TaskTimeline {
    std::string task_id;
    double submit_sec = 0.0;      // all parents complete, enqueued
    double start_sec = 0.0;       // cores allocated
    double completion_sec = 0.0;  // transfers + compute done
};

struct SimulationResult {
    std::vector<TaskTimeline> timelines;  // in trace task order
    double makespan_sec = 0.0;
};

class SimulationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Discrete-event execution: tasks are submitted the instant their last
/// parent completes (sources at t=0); the ready queue is FCFS ordered by
/// (submit time, topological rank, id) and scanned work-conservingly; cores
/// are taken first-fit by node index. A task occupies its cores for
///   sum(input bytes)/bandwidth + latency * #inputs
///   + runtime / speedFactor
///   + sum(output bytes)/bandwidth + latency * #outputs.
/// Throws SimulationError if a task wants more cores than a node has.
SimulationResult simulate(const WorkflowTrace& trace, const PlatformSpec& platform);

/// Max completion time; rejects an empty result.
double makespan(const SimulationResult& result);

/// {"makespanSec": m, "tasks": [{"id", "submitSec", "startSec",
/// "completionSec"}, ...]} with tasks in trace order.
std::string result_to_json(const SimulationResult& result);
SimulationResult result_from_json(const std::string& text);

/// One `id,submit,start,completion` row per task, with a header.
std::string result_to_csv(const SimulationResult& result);

}  // namespace wfkit
