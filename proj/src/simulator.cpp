#include "wfkit/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace wfkit {

namespace {

using json = nlohmann::ordered_json;

double transfer_time(const TaskSpec& task, FileLink link, const PlatformSpec& platform) {
    double bytes = 0.0;
    int count = 0;
    for (const auto& file : task.files) {
        if (file.link != link) continue;
        bytes += static_cast<double>(file.size_bytes);
        ++count;
    }
    return bytes / platform.fs_bandwidth_bytes_per_sec +
           platform.per_file_latency_sec * count;
}

double task_duration(const TaskSpec& task, const PlatformSpec& platform) {
    return transfer_time(task, FileLink::kInput, platform) +
           task.runtime_seconds / platform.speed_factor +
           transfer_time(task, FileLink::kOutput, platform);
}

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

}  // namespace

SimulationResult simulate(const WorkflowTrace& trace, const PlatformSpec& platform) {
    if (platform.node_count < 1 || platform.cores_per_node < 1) {
        throw SimulationError("platform must have at least one node and one core");
    }
    if (platform.speed_factor <= 0 || platform.fs_bandwidth_bytes_per_sec <= 0 ||
        platform.per_file_latency_sec < 0) {
        throw SimulationError("platform rates must be positive");
    }
    for (const auto& task : trace.tasks) {
        if (task.cores > platform.cores_per_node) {
            throw SimulationError("task \"" + task.id + "\" needs " +
                                  std::to_string(task.cores) + " cores but nodes have " +
                                  std::to_string(platform.cores_per_node));
        }
    }

    const std::size_t n = trace.tasks.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(trace.tasks[i].id, i);

    // Rank in the deterministic topological order breaks FCFS ties. Ranks
    // are unique, so ordering by (submit, rank) is already total and the id
    // tie-break never has to fire.
    std::vector<std::size_t> rank(n);
    {
        auto order = topological_order(trace);  // throws CycleError on cycles
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            rank[index.at(order[pos])] = pos;
        }
    }

    std::vector<std::vector<std::size_t>> children(n);
    std::vector<int> pending(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& parent : trace.tasks[i].parents) {
            children[index.at(parent)].push_back(i);
            ++pending[i];
        }
    }

    std::vector<TaskTimeline> timelines(n);
    for (std::size_t i = 0; i < n; ++i) timelines[i].task_id = trace.tasks[i].id;

    std::vector<int> free_cores(static_cast<std::size_t>(platform.node_count),
                                platform.cores_per_node);
    std::vector<int> node_of(n, -1);

    // Ready tasks keyed by (submit, rank); rank is unique so the key is too.
    std::set<std::pair<double, std::size_t>> ready;
    auto submit = [&](std::size_t task, double when) {
        timelines[task].submit_sec = when;
        ready.emplace(when, rank[task]);
    };

    std::vector<std::size_t> by_rank(n);
    for (std::size_t i = 0; i < n; ++i) by_rank[rank[i]] = i;

    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) submit(i, 0.0);
    }

    using Event = std::pair<double, std::size_t>;  // (completion, task index)
    std::priority_queue<Event, std::vector<Event>, std::greater<>> completions;
    std::size_t remaining = n;

    auto start_fitting = [&](double now) {
        for (auto it = ready.begin(); it != ready.end();) {
            std::size_t task = by_rank[it->second];
            int want = trace.tasks[task].cores;
            int node = -1;
            for (int c = 0; c < platform.node_count; ++c) {
                if (free_cores[static_cast<std::size_t>(c)] >= want) {
                    node = c;
                    break;
                }
            }
            if (node < 0) {
                ++it;  // keep scanning: a narrower task behind may still fit
                continue;
            }
            free_cores[static_cast<std::size_t>(node)] -= want;
            node_of[task] = node;
            timelines[task].start_sec = now;
            timelines[task].completion_sec = now + task_duration(trace.tasks[task], platform);
            completions.emplace(timelines[task].completion_sec, task);
            it = ready.erase(it);
        }
    };

    start_fitting(0.0);
    double makespan_sec = 0.0;
    while (!completions.empty()) {
        double now = completions.top().first;
        // Drain every completion at this instant before reallocating, so the
        // outcome is independent of ordering within a simultaneous batch.
        while (!completions.empty() && completions.top().first == now) {
            std::size_t task = completions.top().second;
            completions.pop();
            free_cores[static_cast<std::size_t>(node_of[task])] += trace.tasks[task].cores;
            --remaining;
            for (std::size_t child : children[task]) {
                if (--pending[child] == 0) submit(child, now);
            }
        }
        makespan_sec = std::max(makespan_sec, now);
        start_fitting(now);
    }

    if (remaining != 0 || !ready.empty()) {
        // Unreachable for validated traces (cycles are caught above), but a
        // stalled loop must never silently return a partial schedule.
        throw SimulationError("simulation stalled with tasks still pending");
    }

    return SimulationResult{std::move(timelines), makespan_sec};
}

double makespan(const SimulationResult& result) {
    if (result.timelines.empty()) {
        throw std::invalid_argument("makespan of an empty simulation result");
    }
    double best = 0.0;
    for (const auto& t : result.timelines) best = std::max(best, t.completion_sec);
    return best;
}

std::string result_to_json(const SimulationResult& result) {
    json tasks = json::array();
    for (const auto& t : result.timelines) {
        tasks.push_back({{"id", t.task_id},
                         {"submitSec", t.submit_sec},
                         {"startSec", t.start_sec},
                         {"completionSec", t.completion_sec}});
    }
    json doc{{"makespanSec", result.makespan_sec}, {"tasks", std::move(tasks)}};
    return doc.dump(2) + "\n";
}

SimulationResult result_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::runtime_error(std::string("simulation result is not valid JSON: ") +
                                 err.what());
    }
    if (!doc.is_object() || !doc.contains("makespanSec") || !doc.contains("tasks") ||
        !doc["makespanSec"].is_number() || !doc["tasks"].is_array()) {
        throw std::runtime_error(
            "simulation result must be {\"makespanSec\": number, \"tasks\": [...]}");
    }
    SimulationResult result;
    result.makespan_sec = doc["makespanSec"].get<double>();
    for (const auto& entry : doc["tasks"]) {
        if (!entry.is_object() || !entry.contains("id") || !entry["id"].is_string() ||
            !entry.contains("submitSec") || !entry["submitSec"].is_number() ||
            !entry.contains("startSec") || !entry["startSec"].is_number() ||
            !entry.contains("completionSec") || !entry["completionSec"].is_number()) {
            throw std::runtime_error(
                "each task entry needs id, submitSec, startSec, completionSec");
        }
        result.timelines.push_back({entry["id"].get<std::string>(),
                                    entry["submitSec"].get<double>(),
                                    entry["startSec"].get<double>(),
                                    entry["completionSec"].get<double>()});
    }
    return result;
}

std::string result_to_csv(const SimulationResult& result) {
    std::string out = "id,submit,start,completion\n";
    for (const auto& t : result.timelines) {
        out += t.task_id;
        out += ',';
        out += format_double(t.submit_sec);
        out += ',';
        out += format_double(t.start_sec);
        out += ',';
        out += format_double(t.completion_sec);
        out += '\n';
    }
    return out;
}

}  // namespace wfkit
